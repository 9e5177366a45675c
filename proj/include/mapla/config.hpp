#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "mapla/body.hpp"
#include "mapla/io.hpp"
#include "mapla/metric.hpp"
#include "mapla/potential.hpp"
#include "mapla/sampler.hpp"

namespace mapla {

/// A body plus the metric built for it and a natural interior point when
/// the body type has one (simplex barycenter, box/ellipsoid center).
struct BodySpec {
  BodyPtr body;
  std::optional<Vec> center;
};

/// A bare {"A": ..., "b": ...} object is read as a polytope.
/// {"type": "simplex"|"box"|"polytope"|"ellipsoid"|"epigraph_quadratic"|
///  "lp_ball_extended"|"entropic_ball_extended", ...} or {"file": "path"}
/// with the path taken relative to `base_dir`.
BodySpec parse_body(const JsonView& node, const std::filesystem::path& base_dir);

/// {"type": "barrier"|"logbarrier"|"vaidya"|"identity"|"corrupted", ...}.
MetricPtr parse_metric(const JsonView& node, const BodySpec& body);

/// {"type": "zero"|"dirichlet"|"linear"|"quadratic"|"blr", ...}; blr reads
/// {"data": "file.csv"} relative to `base_dir`.
PotentialPtr parse_potential(const JsonView& node, Eigen::Index dim,
                             const std::filesystem::path& base_dir = {});

/// {"type": "point", "x": [...]} or {"type": "dikin", "center": [...], "radius": r};
/// a missing center falls back to the body's natural center.
InitialDistribution parse_init(const JsonView& node, const MetricPtr& metric, const BodySpec& body);

Algorithm parse_algorithm(const std::string& name);

/// Configuration of the `sample` command.
struct SampleSettings {
  BodySpec body;
  MetricPtr metric;
  PotentialPtr potential;
  InitialDistribution init;
  SamplerConfig sampler;
  RunOptions run;
};

/// Accepts either the config object itself or a manifest carrying it
/// under "config".
SampleSettings parse_sample_config(const JsonDoc& doc, const std::filesystem::path& base_dir);

/// The config object inside `doc`: root, or root["config"] for manifests.
JsonView config_root(const JsonDoc& doc);

}  // namespace mapla
