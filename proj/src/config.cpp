#include "mapla/config.hpp"

#include "mapla/errors.hpp"

namespace mapla {

namespace {

SpdMatrix symmetric_matrix(const JsonView& node, Eigen::Index n) {
  const Mat m = node.matrix();
  if (m.rows() != n || m.cols() != n) {
    node.fail("expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  if (!m.isApprox(m.transpose(), 1e-12)) node.fail("matrix must be symmetric");
  return m;
}

Eigen::Index positive_dim(const JsonView& node) {
  const long d = node.integer();
  if (d < 1) node.fail("dimension must be >= 1");
  return static_cast<Eigen::Index>(d);
}

}  // namespace

BodySpec parse_body(const JsonView& node, const std::filesystem::path& base_dir) {
  if (node.has("file")) {
    node.only_keys({"file"});
    const std::filesystem::path path = base_dir / node.at("file").string();
    const JsonDoc sub = JsonDoc::load(path);
    return parse_body(JsonView(sub, ""), path.parent_path());
  }
  // Bare polytope files carry only {"A": ..., "b": ...}.
  const std::string type =
      !node.has("type") && node.has("A") && node.has("b") ? "polytope" : node.at("type").string();
  BodySpec out;
  try {
    if (type == "simplex") {
      node.only_keys({"type", "dim"});
      const Eigen::Index d = positive_dim(node.at("dim"));
      out.body = make_simplex(d);
      out.center = Vec::Constant(d, 1.0 / static_cast<double>(d + 1));
    } else if (type == "box") {
      node.only_keys({"type", "lo", "hi"});
      const Vec lo = node.at("lo").vector();
      const Vec hi = node.at("hi").vector();
      if (lo.size() != hi.size() || lo.size() == 0) node.fail("lo and hi must have equal nonzero length");
      if ((hi.array() <= lo.array()).any()) node.fail("need lo < hi in every coordinate");
      out.body = make_box(lo, hi);
      out.center = 0.5 * (lo + hi);
    } else if (type == "polytope") {
      node.only_keys({"type", "A", "b"});
      const Mat a = node.at("A").matrix();
      const Vec b = node.at("b").vector();
      if (b.size() != a.rows()) node.at("b").fail("length must equal the row count of A");
      out.body = std::make_shared<PolytopeBody>(a, b);
    } else if (type == "ellipsoid") {
      node.only_keys({"type", "center", "D"});
      const Vec c = node.at("center").vector();
      const SpdMatrix d = symmetric_matrix(node.at("D"), c.size());
      out.body = std::make_shared<EllipsoidBody>(c, d);
      out.center = c;
    } else if (type == "epigraph_quadratic") {
      node.only_keys({"type", "center", "D"});
      const Vec c = node.at("center").vector();
      const SpdMatrix d = symmetric_matrix(node.at("D"), c.size());
      out.body = std::make_shared<EpigraphQuadraticBody>(c, d);
      Vec y(c.size() + 1);
      y << c, 1.0;
      out.center = y;
    } else if (type == "lp_ball_extended") {
      node.only_keys({"type", "p", "dim"});
      const double p = node.at("p").number();
      if (!(p >= 1.0)) node.at("p").fail("p must be >= 1");
      const Eigen::Index d = positive_dim(node.at("dim"));
      out.body = std::make_shared<LpBallExtendedBody>(p, d);
      Vec y = Vec::Zero(2 * d);
      y.tail(d).setConstant(0.5 / static_cast<double>(d));
      out.center = y;
    } else if (type == "entropic_ball_extended") {
      node.only_keys({"type", "dim"});
      const Eigen::Index d = positive_dim(node.at("dim"));
      out.body = std::make_shared<EntropicBallExtendedBody>(d);
      Vec y(2 * d);
      y.head(d).setConstant(0.5);
      y.tail(d).setConstant(0.5 / static_cast<double>(d));
      out.center = y;
    } else {
      node.at("type").fail("unknown body type '" + type + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    node.fail(e.what());
  }
  if (out.center && !out.body->interior_contains(*out.center)) out.center.reset();
  return out;
}

MetricPtr parse_metric(const JsonView& node, const BodySpec& spec) {
  const std::string type = node.at("type").string();
  const BodyPtr& body = spec.body;
  auto polytope = std::dynamic_pointer_cast<const PolytopeBody>(body);
  try {
    if (type == "identity") {
      node.only_keys({"type"});
      return identity_metric(body);
    }
    if (type == "vaidya") {
      node.only_keys({"type"});
      if (!polytope) node.at("type").fail("vaidya needs a polytope body");
      return std::make_shared<VaidyaMetric>(polytope);
    }
    if (type == "logbarrier" || type == "barrier") {
      node.only_keys({"type", "weights"});
      if (polytope) {
        std::optional<Vec> w;
        if (node.has("weights")) w = node.at("weights").vector();
        return std::make_shared<PolytopeBarrierMetric>(polytope, w);
      }
      if (node.has("weights")) node.at("weights").fail("weights apply to polytope bodies only");
      if (type == "logbarrier") node.at("type").fail("logbarrier needs a polytope body");
      if (auto e = std::dynamic_pointer_cast<const EllipsoidBody>(body)) {
        return std::make_shared<EllipsoidBarrierMetric>(e);
      }
      if (auto e = std::dynamic_pointer_cast<const EpigraphQuadraticBody>(body)) {
        return std::make_shared<EpigraphQuadraticMetric>(e);
      }
      if (auto e = std::dynamic_pointer_cast<const LpBallExtendedBody>(body)) {
        return std::make_shared<LpBallExtendedMetric>(e);
      }
      if (auto e = std::dynamic_pointer_cast<const EntropicBallExtendedBody>(body)) {
        return std::make_shared<EntropicBallExtendedMetric>(e);
      }
      node.at("type").fail("no barrier for body " + body->describe());
    }
    if (type == "corrupted") {
      node.only_keys({"type", "base", "amplitude", "period"});
      MetricPtr base = parse_metric(node.at("base"), spec);
      return corrupted(std::move(base), node.number("amplitude", 0.5), node.number("period", 1e-5));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    node.fail(e.what());
  }
  node.at("type").fail("unknown metric type '" + type + "'");
}

PotentialPtr parse_potential(const JsonView& node, Eigen::Index dim, const std::filesystem::path& base_dir) {
  const std::string type = node.at("type").string();
  try {
    if (type == "zero") {
      node.only_keys({"type"});
      return zero_potential(dim);
    }
    if (type == "dirichlet") {
      node.only_keys({"type", "a"});
      const Vec a = node.at("a").vector();
      if (a.size() != dim + 1) node.at("a").fail("needs d + 1 = " + std::to_string(dim + 1) + " entries");
      if ((a.array() <= -1.0).any()) node.at("a").fail("entries must exceed -1");
      return dirichlet_potential(a);
    }
    if (type == "linear") {
      node.only_keys({"type", "sigma"});
      const Vec s = node.at("sigma").vector();
      if (s.size() != dim) node.at("sigma").fail("needs " + std::to_string(dim) + " entries");
      return linear_potential(s);
    }
    if (type == "blr") {
      node.only_keys({"type", "data"});
      const JsonView file = node.at("data");
      BlrData data = load_blr_csv(base_dir / file.string());
      if (data.d() != dim) {
        file.fail("data has " + std::to_string(data.d()) + " features, body has " + std::to_string(dim));
      }
      return blr_potential(std::move(data));
    }
    if (type == "quadratic") {
      node.only_keys({"type", "center", "D", "scale"});
      const Vec c = node.at("center").vector();
      if (c.size() != dim) node.at("center").fail("needs " + std::to_string(dim) + " entries");
      return quadratic_potential(c, symmetric_matrix(node.at("D"), dim), node.number("scale", 1.0));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    node.fail(e.what());
  }
  node.at("type").fail("unknown potential type '" + type + "'");
}

InitialDistribution parse_init(const JsonView& node, const MetricPtr& metric, const BodySpec& body) {
  const std::string type = node.at("type").string();
  const Eigen::Index d = metric->dim();
  auto point_at = [&](const std::string& key) {
    if (!node.has(key)) {
      if (!body.center) node.fail("missing '" + key + "' and the body has no default center");
      return *body.center;
    }
    const Vec x = node.at(key).vector();
    if (x.size() != d) node.at(key).fail("needs " + std::to_string(d) + " entries");
    if (!body.body->interior_contains(x)) node.at(key).fail("point is not interior to the body");
    return x;
  };
  if (type == "point") {
    node.only_keys({"type", "x"});
    return point_mass(point_at("x"));
  }
  if (type == "dikin") {
    node.only_keys({"type", "center", "radius"});
    const double r = node.number("radius", 0.5);
    if (!(r > 0.0 && r < 1.0)) node.at("radius").fail("radius must lie in (0, 1)");
    try {
      return dikin_ball_uniform(metric, point_at("center"), r);
    } catch (const NotPositiveDefinite& e) {
      node.fail(e.what());
    }
  }
  node.at("type").fail("unknown init type '" + type + "'");
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "MAPLA" || name == "mapla") return Algorithm::Mapla;
  if (name == "DikinWalk" || name == "dikin" || name == "dikinwalk") return Algorithm::DikinWalk;
  throw ConfigError("unknown algorithm '" + name + "' (expected MAPLA or DikinWalk)");
}

JsonView config_root(const JsonDoc& doc) {
  JsonView root(doc, "");
  if (!root.value().is_object()) root.fail("expected a JSON object");
  if (root.has("config") && root.value().contains("command")) return root.at("config");
  return root;
}

SampleSettings parse_sample_config(const JsonDoc& doc, const std::filesystem::path& base_dir) {
  const JsonView cfg = config_root(doc);
  cfg.only_keys({"body", "metric", "potential", "algorithm", "step_size", "n_chains", "n_iters",
                 "record_every", "seed", "workers", "lazy_probability", "init"});
  SampleSettings s;
  s.body = parse_body(cfg.at("body"), base_dir);
  s.metric = parse_metric(cfg.at("metric"), s.body);
  s.potential = cfg.has("potential") ? parse_potential(cfg.at("potential"), s.body.body->dim(), base_dir)
                                     : zero_potential(s.body.body->dim());
  if (cfg.has("init")) {
    s.init = parse_init(cfg.at("init"), s.metric, s.body);
  } else {
    if (!s.body.center) cfg.fail("missing 'init' and the body has no default center");
    s.init = point_mass(*s.body.center);
  }

  try {
    s.sampler.algorithm = parse_algorithm(cfg.string("algorithm", "MAPLA"));
  } catch (const ConfigError& e) {
    cfg.at("algorithm").fail(e.what());
  }
  s.sampler.metric = s.metric;
  s.sampler.potential = s.potential;
  s.sampler.step_size = cfg.at("step_size").number();
  if (!(s.sampler.step_size > 0.0)) cfg.at("step_size").fail("step size must be positive");
  const long seed = cfg.integer("seed", 0);
  if (seed < 0) cfg.at("seed").fail("seed must be nonnegative");
  s.sampler.master_seed = static_cast<std::uint64_t>(seed);
  s.sampler.lazy_probability = cfg.number("lazy_probability", 0.0);
  if (!(s.sampler.lazy_probability >= 0.0 && s.sampler.lazy_probability < 1.0)) {
    cfg.at("lazy_probability").fail("must lie in [0, 1)");
  }

  const long chains = cfg.integer("n_chains", 1);
  if (chains < 1) cfg.at("n_chains").fail("need at least one chain");
  const long iters = cfg.integer("n_iters", 0);
  if (iters < 0) cfg.at("n_iters").fail("must be >= 0");
  const long every = cfg.integer("record_every", 1);
  if (every < 1) cfg.at("record_every").fail("must be >= 1");
  const long workers = cfg.integer("workers", 1);
  if (workers < 1) cfg.at("workers").fail("must be >= 1");
  s.run = RunOptions{static_cast<std::size_t>(chains), iters, every, static_cast<unsigned>(workers)};
  return s;
}

}  // namespace mapla
