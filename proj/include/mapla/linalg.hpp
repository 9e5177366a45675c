#pragma once

#include <Eigen/Dense>

#include "mapla/rng.hpp"

namespace mapla {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dense symmetric positive-definite matrix. Positivity is checked lazily,
/// by cholesky().
using SpdMatrix = Eigen::MatrixXd;

/// Relative pivot tolerance: factorization fails when a pivot is at or
/// below this times the largest diagonal entry.
inline constexpr double kPivotTolerance = 1e-13;

/// Lower-triangular L with positive diagonal and L * L^T = S.
class CholFactor {
 public:
  /// Wraps an already-computed lower factor. The upper triangle is ignored.
  explicit CholFactor(Mat lower);

  Eigen::Index dim() const { return lower_.rows(); }
  const Mat& lower() const { return lower_; }
  Mat reconstruct() const;

 private:
  Mat lower_;
};

/// Throws NotPositiveDefinite on a non-finite entry or a small pivot.
CholFactor cholesky(const SpdMatrix& s);

/// Solves L y = rhs, or L^T y = rhs when `transposed`.
Vec tri_solve(const CholFactor& l, const Vec& rhs, bool transposed = false);

/// Solves (L L^T) v = rhs with two triangular solves.
Vec solve_spd(const CholFactor& l, const Vec& rhs);

/// L v, or L^T v when `transposed`.
Vec tri_multiply(const CholFactor& l, const Vec& v, bool transposed = false);

/// log det(L L^T) = 2 sum log L_ii.
double logdet(const CholFactor& l);

/// sum log L_ii, i.e. half of logdet(). This is the quantity the acceptance
/// ratio uses directly.
double log_diag_sum(const CholFactor& l);

/// ||v||_S where S = L L^T, computed as ||L^T v||.
double local_norm(const CholFactor& l, const Vec& v);

/// ||v||_{S^-1}, computed as ||L^-1 v||.
double dual_norm(const CholFactor& l, const Vec& v);

struct PrecisionGaussianDraw {
  Vec xi;      ///< standard normal draw
  Vec scaled;  ///< L^-T xi ~ N(0, (L L^T)^-1)
};

/// Draws xi ~ N(0, I) from `rng` and returns it together with L^-T xi.
PrecisionGaussianDraw sample_precision_gaussian(const CholFactor& l, RngStream& rng);

/// Smallest pivot of an unpivoted Cholesky of S + shift * I. Stops at, and
/// returns, the first non-positive pivot.
double shifted_min_pivot(const SpdMatrix& s, double shift);

/// PSD test by attempted Cholesky of S + shift * I. The zero matrix is PSD
/// for any shift.
bool is_psd(const SpdMatrix& s, double shift);

}  // namespace mapla
