#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mapla/linalg.hpp"
#include "mapla/potential.hpp"
#include "mapla/rng.hpp"
#include "mapla/sampler.hpp"

namespace mapla {

// ---- energy distance ------------------------------------------------------

/// V-statistic energy distance between the rows of X and Y:
///   2/(NM) sum ||X_i - Y_j|| - 1/N^2 sum ||X_i - X_j|| - 1/M^2 sum ||Y_i - Y_j||.
double energy_distance(const Mat& x, const Mat& y);

/// Mean pairwise distance (1/N^2) sum_ij ||X_i - X_j||.
double mean_self_distance(const Mat& x);

/// Reference batch with its self term computed once.
class EnergyReference {
 public:
  explicit EnergyReference(Mat y);
  double distance_to(const Mat& x) const;
  const Mat& points() const { return y_; }
  double self_term() const { return self_; }

 private:
  Mat y_;
  double self_;
};

// ---- entropic W2 ----------------------------------------------------------

struct SinkhornOptions {
  double reg = 1e-3;        ///< on the median-normalized cost
  int max_iter = 20000;
  double tol = 1e-9;        ///< max abs marginal violation
  bool normalize_cost = true;
};

struct SinkhornResult {
  double value = 0.0;       ///< <P, C> in original units
  bool converged = false;
  int iterations = 0;
  double marginal_error = 0.0;
  double cost_scale = 1.0;  ///< median pairwise squared distance (1 if not normalized)
};

/// Entropic OT between uniform empirical measures on the rows of X and Y,
/// squared Euclidean cost, log-domain updates with eps-scaling down to reg.
SinkhornResult sinkhorn_w2sq(const Mat& x, const Mat& y, const SinkhornOptions& opts = {});

// ---- series and mixing ----------------------------------------------------

enum class Measure { W2sq, ED };
const char* measure_name(Measure m);

struct DistanceSeries {
  Measure measure = Measure::ED;
  std::vector<long> iterations;
  std::vector<double> values;

  void push(long iteration, double value);
};

/// First recorded iteration k >= 1 with value <= delta; nullopt if never.
std::optional<long> empirical_mixing_time(const DistanceSeries& series, double delta);

// ---- acceptance -----------------------------------------------------------

/// Per-chain accepted / proposals between the two snapshots, averaged over
/// chains that proposed at least once. Throws EmptyBatch if none did.
double acceptance_rate(const SampleBatch& at_burn_in, const SampleBatch& final_batch);
/// Uses the last batch with iteration <= burn_in and the final batch.
double acceptance_rate(const std::vector<SampleBatch>& batches, long burn_in);

// ---- BLR measures ---------------------------------------------------------

struct BlrMeasures {
  double err;  ///< ||theta_hat - theta*||_1 / d
  double nll;  ///< f(theta_hat) / n
};

/// theta_hat is the mean of the batch rows.
BlrMeasures blr_measures(const Mat& batch, const Vec& theta_star, const BlrPotential& potential);

struct Quartiles {
  double q25;
  double q75;
};

/// Nearest-rank quantile: the ceil(p N)-th smallest value (p in (0, 1]).
double nearest_rank_quantile(std::vector<double> values, double p);

/// Quartiles of 1^T (theta - theta*) / d over the batch rows.
Quartiles diff_quantiles(const Mat& batch, const Vec& theta_star);

// ---- one-dimensional checks ----------------------------------------------

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `samples`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// N draws from the Dirichlet target with density prop. to prod x_i^{a_i}:
/// Gamma(a_i + 1) variates normalized, first d coordinates kept.
Mat dirichlet_reference_sample(const Vec& a, std::size_t n, RngStream& rng);

}  // namespace mapla
