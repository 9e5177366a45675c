#include "mapla/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mapla/errors.hpp"

namespace mapla {

namespace {

void require_dim(const CholFactor& l, const Vec& v, const char* what) {
  if (v.size() != l.dim()) {
    std::ostringstream msg;
    msg << what << ": factor has dim " << l.dim() << ", vector has " << v.size();
    throw DimensionMismatch(msg.str());
  }
}

}  // namespace

CholFactor::CholFactor(Mat lower) : lower_(std::move(lower)) {
  lower_.triangularView<Eigen::StrictlyUpper>().setZero();
}

Mat CholFactor::reconstruct() const { return lower_ * lower_.transpose(); }

CholFactor cholesky(const SpdMatrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw DimensionMismatch("cholesky: matrix must be square with dim >= 1");
  }
  if (!s.allFinite()) throw NotPositiveDefinite("cholesky: non-finite entry");
  const double max_diag = s.diagonal().maxCoeff();
  if (!(max_diag > 0.0)) throw NotPositiveDefinite("cholesky: non-positive diagonal");

  Eigen::LLT<Mat> llt(s);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("cholesky: factorization failed");
  Mat lower = llt.matrixL();
  const double floor = kPivotTolerance * max_diag;
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    const double pivot = lower(i, i) * lower(i, i);
    if (!(pivot > floor)) {
      std::ostringstream msg;
      msg << "cholesky: pivot " << pivot << " at index " << i << " below tolerance " << floor;
      throw NotPositiveDefinite(msg.str());
    }
  }
  return CholFactor(std::move(lower));
}

Vec tri_solve(const CholFactor& l, const Vec& rhs, bool transposed) {
  require_dim(l, rhs, "tri_solve");
  if (transposed) return l.lower().transpose().triangularView<Eigen::Upper>().solve(rhs);
  return l.lower().triangularView<Eigen::Lower>().solve(rhs);
}

Vec solve_spd(const CholFactor& l, const Vec& rhs) {
  return tri_solve(l, tri_solve(l, rhs, false), true);
}

Vec tri_multiply(const CholFactor& l, const Vec& v, bool transposed) {
  require_dim(l, v, "tri_multiply");
  if (transposed) return l.lower().transpose().triangularView<Eigen::Upper>() * v;
  return l.lower().triangularView<Eigen::Lower>() * v;
}

double log_diag_sum(const CholFactor& l) {
  return l.lower().diagonal().array().log().sum();
}

double logdet(const CholFactor& l) { return 2.0 * log_diag_sum(l); }

double local_norm(const CholFactor& l, const Vec& v) {
  return tri_multiply(l, v, true).norm();
}

double dual_norm(const CholFactor& l, const Vec& v) {
  return tri_solve(l, v, false).norm();
}

PrecisionGaussianDraw sample_precision_gaussian(const CholFactor& l, RngStream& rng) {
  PrecisionGaussianDraw draw;
  draw.xi = rng.normal_vector(l.dim());
  draw.scaled = tri_solve(l, draw.xi, true);
  return draw;
}

double shifted_min_pivot(const SpdMatrix& s, double shift) {
  const Eigen::Index n = s.rows();
  Mat a = s;
  a.diagonal().array() += shift;
  double min_pivot = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j) - a.row(j).head(j).squaredNorm();
    min_pivot = std::min(min_pivot, pivot);
    if (!(pivot > 0.0)) return pivot;
    const double ljj = std::sqrt(pivot);
    a(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      a(i, j) = (a(i, j) - a.row(i).head(j).dot(a.row(j).head(j))) / ljj;
    }
  }
  return min_pivot;
}

bool is_psd(const SpdMatrix& s, double shift) {
  if (s.norm() == 0.0) return true;
  return shifted_min_pivot(s, shift) > 0.0;
}

}  // namespace mapla
