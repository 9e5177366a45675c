#pragma once

#include <algorithm>
#include <cmath>
#include <memory>

#include "mapla/body.hpp"
#include "mapla/linalg.hpp"
#include "mapla/metric.hpp"
#include "mapla/rng.hpp"

namespace mapla::testing {

/// A^T A + eps I with A standard normal, d x d.
inline Mat random_spd(Eigen::Index d, RngStream& rng, double eps = 1e-1) {
  Mat a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.normal();
  return a.transpose() * a + eps * Mat::Identity(d, d);
}

inline Vec random_unit(Eigen::Index d, RngStream& rng) {
  Vec u = rng.normal_vector(d);
  return u / u.norm();
}

/// Beta(2, 2) CDF: 3x^2 - 2x^3 on [0, 1].
inline double beta22_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * (3.0 - 2.0 * x);
}

/// Inverse of beta22_cdf by bisection.
inline double beta22_quantile(double p) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (beta22_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// [lo, hi] as {-x <= -lo, x <= hi}.
inline std::shared_ptr<const PolytopeBody> interval(double lo = 0.0, double hi = 1.0) {
  Mat a(2, 1);
  a << -1, 1;
  Vec b(2);
  b << -lo, hi;
  return std::make_shared<const PolytopeBody>(a, b);
}

inline Vec scalar(double x) { return Vec::Constant(1, x); }

/// A point a random fraction (at most `reach`) of the way from `center` to
/// the boundary along a random direction; rays that never leave stop at 10.
inline Vec random_interior(const ConvexBody& body, const Vec& center, RngStream& rng,
                           double reach = 0.95) {
  const Vec u = random_unit(center.size(), rng);
  const double t = std::min(body.exit_distance(center, u), 10.0);
  return center + reach * rng.uniform() * t * u;
}

/// Random polytope with `center` strictly inside: rows N(0, I), slacks in [0.2, 1.2).
inline std::shared_ptr<const PolytopeBody> random_polytope(Eigen::Index m, const Vec& center,
                                                           RngStream& rng) {
  Mat a(m, center.size());
  for (Eigen::Index i = 0; i < m; ++i) a.row(i) = rng.normal_vector(center.size()).transpose();
  Vec b = a * center;
  for (Eigen::Index i = 0; i < m; ++i) b(i) += 0.2 + rng.uniform();
  return std::make_shared<const PolytopeBody>(a, b);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace mapla::testing
