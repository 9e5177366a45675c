#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mapla/body.hpp"
#include "mapla/diagnostics.hpp"
#include "mapla/metric.hpp"
#include "mapla/potential.hpp"
#include "mapla/sampler.hpp"

namespace mapla {

/// Auxiliary stream for problem generation and reference batches, kept
/// apart from the chain streams derive(seed, i).
RngStream aux_stream(std::uint64_t seed, std::uint64_t tag);

// ---- Dirichlet on the simplex ----------------------------------------------

/// a_i = a_min + ((i - 1) / d) (a_max - a_min), i = 1..d+1.
Vec ramp_concentration(Eigen::Index d, double a_min, double a_max);

struct DirichletSetup {
  Vec a;
  std::shared_ptr<const PolytopeBody> body;
  MetricPtr metric;  ///< log-barrier of the simplex
  PotentialPtr potential;
  Vec barycenter;    ///< 1 / (d + 1)

  Eigen::Index dim() const { return barycenter.size(); }
};

DirichletSetup make_dirichlet_setup(const Vec& a);

/// Uniform on the Dikin ellipsoid of the given radius at the barycenter.
InitialDistribution dirichlet_init(const DirichletSetup& setup, double radius = 0.5);

/// C_h / (a_max d)
double ramp_step_size(double c_h, double a_max, Eigen::Index d);
/// (10 d^gamma)^-1
double sweep_step_size(double gamma, Eigen::Index d);

struct SeriesRun {
  std::vector<DistanceSeries> series;  ///< ED first, then W2sq when requested
  Tallies tallies;                     ///< aggregate at the end
  long sinkhorn_unconverged = 0;
};

struct SeriesOptions {
  std::size_t n_chains = 200;
  long n_iters = 1000;
  long record_every = 10;
  long w2_every = 0;  ///< 0 disables W2sq; else a multiple of record_every
  unsigned workers = 1;
  SinkhornOptions sinkhorn;
};

SeriesRun run_distance_series(const SamplerConfig& config, const SeriesOptions& opts,
                              const InitialDistribution& init, const EnergyReference& reference);

/// Post-burn-in acceptance rate of a run of n_iters from `init`.
double run_acceptance(const SamplerConfig& config, std::size_t n_chains, long n_iters, long burn_in,
                      const InitialDistribution& init, unsigned workers = 1);

// ---- Bayesian logistic regression -----------------------------------------

struct BlrProblem {
  std::shared_ptr<const BlrPotential> potential;
  Vec theta_star;
  Vec angles;       ///< Givens angle for plane (2i-1, 2i), i = 1..floor(d/2)
  Vec translation;
  Mat rotation;     ///< R; Theta = {theta : |R^T (theta - t)|_inf <= 2}
  std::shared_ptr<const PolytopeBody> body;
  MetricPtr metric;
  double lambda_max = 0.0;  ///< largest eigenvalue of X^T X
};

/// Product of Givens rotations, one per recorded angle, in planes (2i-1, 2i).
Mat givens_product(Eigen::Index d, const Vec& angles);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration(const Mat& s, RngStream& rng, int max_iter = 10000, double tol = 1e-12);

BlrProblem generate_blr_problem(Eigen::Index d, int n_factor, std::uint64_t seed);

/// C_h / (lambda_max d)
double blr_step_size(const BlrProblem& problem, double c_h);

/// Uniform on the Dikin ellipsoid of the given radius at the translation.
InitialDistribution blr_init(const BlrProblem& problem, double radius = 0.5);

struct BlrRecord {
  long iteration;
  BlrMeasures measures;
  Quartiles diff;
};

std::vector<BlrRecord> run_blr_series(const SamplerConfig& config, const BlrProblem& problem,
                                      std::size_t n_chains, long n_iters, long record_every,
                                      const InitialDistribution& init, unsigned workers = 1);

}  // namespace mapla
