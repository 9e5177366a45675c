#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mapla/linalg.hpp"
#include "mapla/metric.hpp"
#include "mapla/potential.hpp"
#include "mapla/rng.hpp"

namespace mapla {

enum class Algorithm {
  Mapla,      ///< preconditioned Langevin proposal with MH filter
  DikinWalk,  ///< same proposal without the drift term
};

const char* algorithm_name(Algorithm alg);

struct SamplerConfig {
  MetricPtr metric;
  PotentialPtr potential;
  double step_size = 0.0;
  Algorithm algorithm = Algorithm::Mapla;
  std::uint64_t master_seed = 0;
  /// Probability of holding in place before proposing. 0 runs the
  /// non-lazy chain; 0.5 gives the lazy chain used in mixing analyses.
  double lazy_probability = 0.0;

  /// Throws std::invalid_argument for h <= 0 or mismatched dimensions.
  void validate() const;
};

struct Tallies {
  long accepted = 0;
  long rejected_mh = 0;
  long rejected_outside = 0;
  /// Subset of rejected_outside: proposal was interior but G(z) did not factor.
  long rejected_factorization = 0;
  long held = 0;  ///< lazy holds; not proposals

  long proposals() const { return accepted + rejected_mh + rejected_outside; }
  Tallies& operator+=(const Tallies& other);
};

/// Everything evaluated at a point that the next step reuses.
struct PointCache {
  Vec x;
  CholFactor factor;    ///< L with L L^T = G(x)
  Vec natural_grad;     ///< G(x)^-1 grad f(x); zero for DikinWalk
  double half_logdet;   ///< sum log L_ii
  double f;
};

/// Throws NotInterior / NotPositiveDefinite when x is unusable.
PointCache evaluate_point(const Metric& metric, const Potential& potential, const Vec& x,
                          Algorithm alg);

struct ChainState {
  PointCache cache;
  RngStream rng;
  Tallies tallies;
};

struct Proposal {
  Vec z;
  Vec xi;         ///< standard normal draw
  Vec xi_scaled;  ///< L_x^-T xi
};

/// z = x - h v_x + sqrt(2h) L_x^-T xi for a given xi.
Proposal propose_with_noise(const PointCache& at, double h, Vec xi);

/// Draws xi from the state's stream and forms the proposal.
Proposal propose(ChainState& state, double h);

struct AcceptRatio {
  double log_ratio;
  PointCache z_cache;
};

/// log [pi(z) p_z(x)] / [pi(x) p_x(z)] through the cached factors.
///
/// Evaluation order is fixed:
///   (f(x) - f(z)) + (half_logdet(z) - half_logdet(x))
///     + (2h ||xi||^2 - ||L_z^T (h (v_z + v_x) - sqrt(2h) xi~)||^2) / (4h)
/// Throws NotPositiveDefinite if G(z) does not factor.
AcceptRatio log_accept_ratio(const PointCache& at, const Proposal& proposal, double h,
                             const Metric& metric, const Potential& potential, Algorithm alg);

enum class StepOutcome { AcceptedMove, RejectedByMH, RejectedOutsideK, Held };

struct StepRecord {
  Vec z;
  StepOutcome outcome = StepOutcome::Held;
  double log_ratio = 0.0;  ///< NaN when z was rejected as outside
  bool factorization_failure = false;
};

/// One MAPLA iteration. Outside proposals are rejected before f or G is
/// evaluated at z; U ~ Unif[0,1) is drawn for every interior proposal.
StepRecord step(ChainState& state, const SamplerConfig& config);

/// Creates a chain at x0; throws InitNotInterior if x0 is unusable.
ChainState make_chain(const SamplerConfig& config, const Vec& x0, RngStream rng);

/// Draws the initial point of chain `index` from the chain's own stream.
using InitialDistribution = std::function<Vec(std::size_t index, RngStream& rng)>;

InitialDistribution point_mass(Vec x0);
/// Uniform over the Dikin ellipsoid E_{x0}(r) of `metric`.
InitialDistribution dikin_ball_uniform(MetricPtr metric, Vec x0, double radius);
/// Row i of `points` for chain i.
InitialDistribution from_points(Mat points);

struct SampleBatch {
  long iteration = 0;
  Mat points;                       ///< one row per chain
  std::vector<Tallies> per_chain;   ///< cumulative up to `iteration`

  Tallies tallies() const;
};

struct RunOptions {
  std::size_t n_chains = 1;
  long n_iters = 0;
  long record_every = 1;
  unsigned workers = 1;
};

/// Runs independent chains; chain i uses RngStream::derive(master_seed, i).
/// Batches are emitted at iteration 0, every `record_every` iterations and
/// at n_iters, in increasing order. Output depends only on (config, options
/// minus workers, init).
void run_chains(const SamplerConfig& config, const RunOptions& opts, const InitialDistribution& init,
                const std::function<void(const SampleBatch&)>& observer);

std::vector<SampleBatch> run_chains(const SamplerConfig& config, const RunOptions& opts,
                                    const InitialDistribution& init);

}  // namespace mapla
