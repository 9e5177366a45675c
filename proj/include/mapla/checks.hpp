#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "mapla/metric.hpp"
#include "mapla/potential.hpp"
#include "mapla/rng.hpp"

namespace mapla {

/// One inequality test. `pass` compares lhs with rhs under the tolerances
/// of the specific check.
struct CheckReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

struct FdOptions {
  /// Finite-difference step along v. Default: min(1e-4 * t, 1e-4) where t
  /// is the distance (in units of v) from x to the boundary along +-v.
  std::optional<double> h_fd;
  double tol_rel = 1e-3;
  double tol_abs = 1e-10;
};

/// Default step used by the directional checks.
double default_fd_step(const Metric& metric, const Vec& x, const Vec& v);

/// |D G(x)[v, v, v]| <= 2 ||v||^3_{G(x)}.
CheckReport check_self_concordance(const Metric& metric, const Vec& x, const Vec& v,
                                   const FdOptions& opts = {});

/// ||G^-1/2 D G(x)[v] G^-1/2||_F <= 2 ||v||_{G(x)}.
CheckReport check_strong_self_concordance(const Metric& metric, const Vec& x, const Vec& v,
                                          const FdOptions& opts = {});

/// trace(G(x)^-1 D^2 G(x)[v, v]) >= -alpha ||v||^2_{G(x)}.
/// alpha defaults to 4; no per-metric value is known to be tight.
CheckReport check_lower_trace(const Metric& metric, const Vec& x, const Vec& v,
                              double alpha = 4.0, const FdOptions& opts = {});

struct CurvatureReport {
  CheckReport lower;  ///< Hess f - mu G is PSD; lhs = min shifted pivot
  CheckReport upper;  ///< lambda G - Hess f is PSD
};

/// Relative shift used by the PSD tests, applied to the Frobenius norms of
/// the matrices being compared.
inline constexpr double kPsdRelShift = 1e-10;

CurvatureReport check_curvature_bounds(const Potential& potential, const Metric& metric,
                                       const Vec& x, double mu, double lambda);

/// ||grad f(x)||_{G(x)^-1} <= beta.
CheckReport check_gradient_bound(const Potential& potential, const Metric& metric, const Vec& x,
                                 double beta, double tol_rel = 1e-9);

struct AverageScReport {
  double estimate = 0.0;  ///< fraction of draws satisfying the event
  double lower = 0.0;     ///< Wilson interval
  double upper = 0.0;
  long escapes = 0;       ///< draws outside int(K), counted as violations
  long draws = 0;
  bool pass = false;
};

/// Monte-Carlo estimate of
///   P(||xi - x||^2_{G(xi)} - ||xi - x||^2_{G(x)} <= 4 h eps),  xi ~ N(x, 2h G(x)^-1).
/// pass iff the Wilson lower bound (z = 1.96) is >= 1 - eps - slack.
AverageScReport check_average_self_concordance(const Metric& metric, const Vec& x, double h,
                                               double eps, long n_mc, RngStream& rng,
                                               double slack = 0.0);

/// ||y - x||_{G(x)} exit radius: distance to the boundary along u,
/// measured in the local norm at x.
double dikin_exit_radius(const Metric& metric, const Vec& x, const Vec& u);

struct SymmetryReport {
  double nu_hat = 0.0;             ///< max_u ||rho* u||^2_{G(x)}, rho* the symmetrized exit
  double min_exit_radius = 0.0;    ///< min_u of the K-exit radius in G-norm
  double min_symmetric_radius = 0.0;
  long directions = 0;
  long unbounded = 0;              ///< directions along which the body never ends
};

/// Probes K and K cap (2x - K) along random unit directions. A Monte-Carlo
/// estimate, not a certificate.
SymmetryReport symmetry_probe(const Metric& metric, const Vec& x, long n_dirs, RngStream& rng);

// ---- property sweep -------------------------------------------------------

struct SuiteOptions {
  long n_probes = 200;
  std::uint64_t seed = 0;
  double tol_rel = 1e-3;
  double alpha = 4.0;         ///< lower-trace parameter
  double asc_eps = 0.1;
  long asc_draws = 200;
  double asc_r_factor = 0.1;  ///< ASC step h = r^2 / (2d), r = factor * eps / d
  long dikin_dirs = 5;
};

struct SuiteRow {
  long probe;
  const char* property;  ///< SC, SSC, LT, ASC, Dikin, curvature_lower, curvature_upper, gradient_bound
  double lhs;
  double rhs;
  bool pass;
};

/// Probes x = center + 0.95 U min(exit, 10) u along random unit rays u and
/// runs SC plus every property the metric claims; with a potential that
/// carries metadata, also the curvature and gradient bounds. Returns the
/// number of failed rows.
long run_property_suite(const Metric& metric, const Potential* potential, const Vec& center,
                        const SuiteOptions& opts, const std::function<void(const SuiteRow&)>& row);

}  // namespace mapla
