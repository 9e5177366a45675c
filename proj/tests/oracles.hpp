#pragma once

// Independent reference computations. These deliberately avoid the library's
// Cholesky pipeline so that agreement means something.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "mapla/metric.hpp"
#include "mapla/potential.hpp"
#include "mapla/rng.hpp"

namespace mapla::testing {

/// log N(y; m, 2h G^-1) up to the shared constant.
inline double log_proposal_density(const Mat& g, const Vec& m, const Vec& y, double h) {
  const Vec r = y - m;
  return 0.5 * std::log(g.determinant()) - r.dot(g * r) / (4.0 * h);
}

/// log [pi(z) p_z(x)] / [pi(x) p_x(z)] from dense inverses and determinants.
inline double dense_log_ratio(const Metric& metric, const Potential& potential, const Vec& x,
                              const Vec& z, double h, bool drift = true) {
  const Mat gx = metric.eval(x);
  const Mat gz = metric.eval(z);
  const Vec mx = drift ? Vec(x - h * gx.inverse() * potential.gradient(x)) : x;
  const Vec mz = drift ? Vec(z - h * gz.inverse() * potential.gradient(z)) : z;
  return (potential.value(x) - potential.value(z)) + log_proposal_density(gz, mz, x, h) -
         log_proposal_density(gx, mx, z, h);
}

struct MalaTrace {
  std::vector<int> decisions;  ///< 1 accept, 0 MH reject, -1 outside
  Vec final_x;
};

/// Textbook MALA on a box, drawing xi then (for interior z only) U from `rng`.
inline MalaTrace reference_mala(const Potential& f, const Vec& lo, const Vec& hi, Vec x, double h,
                                long steps, RngStream rng) {
  MalaTrace out;
  out.decisions.reserve(static_cast<std::size_t>(steps));
  auto inside = [&](const Vec& y) {
    return (y.array() > lo.array()).all() && (y.array() < hi.array()).all();
  };
  for (long k = 0; k < steps; ++k) {
    const Vec xi = rng.normal_vector(x.size());
    const Vec gx = f.gradient(x);
    const Vec z = x - h * gx + std::sqrt(2.0 * h) * xi;
    if (!inside(z)) {
      out.decisions.push_back(-1);
      continue;
    }
    const Vec gz = f.gradient(z);
    const double fwd = (z - x + h * gx).squaredNorm();
    const double rev = (x - z + h * gz).squaredNorm();
    const double lr = f.value(x) - f.value(z) + (fwd - rev) / (4.0 * h);
    const double u = rng.uniform();
    if (u <= std::exp(std::min(0.0, lr))) {
      x = z;
      out.decisions.push_back(1);
    } else {
      out.decisions.push_back(0);
    }
  }
  out.final_x = x;
  return out;
}

}  // namespace mapla::testing
