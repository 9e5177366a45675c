#include "mapla/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "mapla/errors.hpp"

namespace mapla {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_interior(const Metric& metric, const Vec& x, const char* who) {
  if (x.size() != metric.dim()) throw DimensionMismatch(std::string(who) + ": dimension mismatch");
  if (!metric.body()->interior_contains(x)) {
    throw NotInterior(std::string(who) + ": point is not interior");
  }
}

double step_for(const Metric& metric, const Vec& x, const Vec& v, const FdOptions& opts) {
  return opts.h_fd ? *opts.h_fd : default_fd_step(metric, x, v);
}

// Fourth-order central first derivative of s -> F(x + s v) at 0; the
// outermost stencil points sit at s = +-2h.
template <typename F>
auto central_first(F&& f, const Vec& x, const Vec& v, double h) {
  using Result = std::decay_t<decltype(f(x))>;
  const Result m2 = f(x - 2.0 * h * v);
  const Result m1 = f(x - h * v);
  const Result p1 = f(x + h * v);
  const Result p2 = f(x + 2.0 * h * v);
  Result out = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
  return out;
}

}  // namespace

double default_fd_step(const Metric& metric, const Vec& x, const Vec& v) {
  const auto& body = *metric.body();
  const double t = std::min(body.exit_distance(x, v), body.exit_distance(x, -v));
  if (!std::isfinite(t)) return 1e-4;
  return std::min(1e-4 * t, 1e-4);
}

CheckReport check_self_concordance(const Metric& metric, const Vec& x, const Vec& v,
                                   const FdOptions& opts) {
  require_interior(metric, x, "check_self_concordance");
  CheckReport r;
  if (v.squaredNorm() == 0.0) return r;
  const CholFactor l = cholesky(metric.eval(x));
  const double h = step_for(metric, x, v, opts);
  auto quad = [&](const Vec& y) { return v.dot(metric.eval(y) * v); };
  r.lhs = std::abs(central_first(quad, x, v, 0.5 * h));
  r.rhs = 2.0 * std::pow(local_norm(l, v), 3);
  r.pass = r.lhs <= r.rhs * (1.0 + opts.tol_rel) + opts.tol_abs;
  return r;
}

CheckReport check_strong_self_concordance(const Metric& metric, const Vec& x, const Vec& v,
                                          const FdOptions& opts) {
  require_interior(metric, x, "check_strong_self_concordance");
  CheckReport r;
  if (v.squaredNorm() == 0.0) return r;
  const CholFactor l = cholesky(metric.eval(x));
  const double h = step_for(metric, x, v, opts);
  auto g = [&](const Vec& y) -> Mat { return metric.eval(y); };
  const Mat dg = central_first(g, x, v, 0.5 * h);
  // ||L^-1 DG L^-T||_F equals ||G^-1/2 DG G^-1/2||_F.
  const Mat left = l.lower().triangularView<Eigen::Lower>().solve(dg);
  const Mat both = l.lower().triangularView<Eigen::Lower>().solve(left.transpose());
  r.lhs = both.norm();
  r.rhs = 2.0 * local_norm(l, v);
  r.pass = r.lhs <= r.rhs * (1.0 + opts.tol_rel) + opts.tol_abs;
  return r;
}

CheckReport check_lower_trace(const Metric& metric, const Vec& x, const Vec& v, double alpha,
                              const FdOptions& opts) {
  require_interior(metric, x, "check_lower_trace");
  CheckReport r;
  if (v.squaredNorm() == 0.0) return r;
  const Mat g0 = metric.eval(x);
  const CholFactor l = cholesky(g0);
  const double h = step_for(metric, x, v, opts);
  const Mat d2g = (metric.eval(x + h * v) - 2.0 * g0 + metric.eval(x - h * v)) / (h * h);
  const Mat left = l.lower().triangularView<Eigen::Lower>().solve(d2g);
  const Mat both = l.lower().triangularView<Eigen::Lower>().solve(left.transpose());
  const double vg2 = std::pow(local_norm(l, v), 2);
  r.lhs = both.trace();
  r.rhs = -alpha * vg2;
  r.pass = r.lhs >= r.rhs - opts.tol_rel * vg2 * std::max(alpha, 1.0) - opts.tol_abs;
  return r;
}

CurvatureReport check_curvature_bounds(const Potential& potential, const Metric& metric,
                                       const Vec& x, double mu, double lambda) {
  require_interior(metric, x, "check_curvature_bounds");
  const Mat hess = potential.hessian(x);
  const Mat g = metric.eval(x);
  CurvatureReport out;
  {
    const Mat s = hess - mu * g;
    const double shift = kPsdRelShift * (hess.norm() + std::abs(mu) * g.norm());
    out.lower.pass = is_psd(s, shift);
    out.lower.lhs = s.norm() == 0.0 ? 0.0 : shifted_min_pivot(s, shift);
    out.lower.rhs = 0.0;
  }
  {
    const Mat s = lambda * g - hess;
    const double shift = kPsdRelShift * (hess.norm() + std::abs(lambda) * g.norm());
    out.upper.pass = is_psd(s, shift);
    out.upper.lhs = s.norm() == 0.0 ? 0.0 : shifted_min_pivot(s, shift);
    out.upper.rhs = 0.0;
  }
  return out;
}

CheckReport check_gradient_bound(const Potential& potential, const Metric& metric, const Vec& x,
                                 double beta, double tol_rel) {
  require_interior(metric, x, "check_gradient_bound");
  const CholFactor l = cholesky(metric.eval(x));
  CheckReport r;
  r.lhs = dual_norm(l, potential.gradient(x));
  r.rhs = beta;
  r.pass = r.lhs <= beta * (1.0 + tol_rel);
  return r;
}

AverageScReport check_average_self_concordance(const Metric& metric, const Vec& x, double h,
                                               double eps, long n_mc, RngStream& rng,
                                               double slack) {
  require_interior(metric, x, "check_average_self_concordance");
  const CholFactor lx = cholesky(metric.eval(x));
  const double scale = std::sqrt(2.0 * h);
  AverageScReport rep;
  long good = 0;
  for (long i = 0; i < n_mc; ++i) {
    const Vec step = scale * sample_precision_gaussian(lx, rng).scaled;
    const Vec xi = x + step;
    ++rep.draws;
    if (!metric.body()->interior_contains(xi)) {
      ++rep.escapes;
      continue;
    }
    const Mat g_xi = metric.eval(xi);
    const double diff = step.dot(g_xi * step) - std::pow(local_norm(lx, step), 2);
    if (diff <= 4.0 * h * eps) ++good;
  }
  if (rep.draws == 0) return rep;
  const double n = static_cast<double>(rep.draws);
  const double p = static_cast<double>(good) / n;
  const double z = 1.96;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  rep.estimate = p;
  rep.lower = std::max(0.0, centre - half);
  rep.upper = std::min(1.0, centre + half);
  rep.pass = rep.lower >= 1.0 - eps - slack;
  return rep;
}

double dikin_exit_radius(const Metric& metric, const Vec& x, const Vec& u) {
  require_interior(metric, x, "dikin_exit_radius");
  const CholFactor l = cholesky(metric.eval(x));
  return metric.body()->exit_distance(x, u) * local_norm(l, u);
}

SymmetryReport symmetry_probe(const Metric& metric, const Vec& x, long n_dirs, RngStream& rng) {
  require_interior(metric, x, "symmetry_probe");
  const CholFactor l = cholesky(metric.eval(x));
  const auto& body = *metric.body();
  SymmetryReport rep;
  rep.min_exit_radius = kInf;
  rep.min_symmetric_radius = kInf;
  for (long i = 0; i < n_dirs; ++i) {
    Vec u = rng.normal_vector(x.size());
    u /= u.norm();
    const double gu = local_norm(l, u);
    const double forward = body.exit_distance(x, u);
    const double backward = body.exit_distance(x, -u);
    const double rho = std::min(forward, backward);
    ++rep.directions;
    if (!std::isfinite(forward)) ++rep.unbounded;
    rep.min_exit_radius = std::min(rep.min_exit_radius, forward * gu);
    rep.min_symmetric_radius = std::min(rep.min_symmetric_radius, rho * gu);
    if (std::isfinite(rho)) rep.nu_hat = std::max(rep.nu_hat, (rho * gu) * (rho * gu));
  }
  return rep;
}

long run_property_suite(const Metric& metric, const Potential* potential, const Vec& center,
                        const SuiteOptions& opts, const std::function<void(const SuiteRow&)>& row) {
  const MetricClaims claims = metric.claims();
  const Eigen::Index d = metric.dim();
  const ConvexBody& body = *metric.body();
  RngStream rng(opts.seed);
  FdOptions fd;
  fd.tol_rel = opts.tol_rel;
  long failures = 0;
  auto emit = [&](long probe, const char* name, double lhs, double rhs, bool pass) {
    if (!pass) ++failures;
    row(SuiteRow{probe, name, lhs, rhs, pass});
  };

  // The definition only asserts that some r works; the third-order term is
  // about r^3 against 2 r^2 eps / d, so r has to be well below eps / d.
  const double asc_r = opts.asc_r_factor * opts.asc_eps / static_cast<double>(d);
  const double asc_h = asc_r * asc_r / (2.0 * static_cast<double>(d));

  for (long k = 0; k < opts.n_probes; ++k) {
    Vec u = rng.normal_vector(d);
    u /= u.norm();
    const double reach = std::min(body.exit_distance(center, u), 10.0);
    const Vec x = center + 0.95 * rng.uniform() * reach * u;
    const Vec v = rng.normal_vector(d);

    const CheckReport sc = check_self_concordance(metric, x, v, fd);
    emit(k, "SC", sc.lhs, sc.rhs, sc.pass);
    if (claims.strongly_self_concordant) {
      const CheckReport r = check_strong_self_concordance(metric, x, v, fd);
      emit(k, "SSC", r.lhs, r.rhs, r.pass);
    }
    if (claims.lower_trace) {
      const CheckReport r = check_lower_trace(metric, x, v, opts.alpha, fd);
      emit(k, "LT", r.lhs, r.rhs, r.pass);
    }
    if (claims.average_self_concordant) {
      const AverageScReport r =
          check_average_self_concordance(metric, x, asc_h, opts.asc_eps, opts.asc_draws, rng);
      emit(k, "ASC", r.lower, 1.0 - opts.asc_eps, r.pass);
    }
    if (claims.dikin_contained) {
      double worst = std::numeric_limits<double>::infinity();
      for (long j = 0; j < opts.dikin_dirs; ++j) {
        Vec w = rng.normal_vector(d);
        worst = std::min(worst, dikin_exit_radius(metric, x, w / w.norm()));
      }
      emit(k, "Dikin", worst, 1.0 - 1e-6, worst >= 1.0 - 1e-6);
    }
    if (!potential) continue;
    const auto meta = potential->metadata();
    if (!meta) continue;
    if (meta->mu || meta->lambda) {
      const CurvatureReport c =
          check_curvature_bounds(*potential, metric, x, meta->mu.value_or(0.0), meta->lambda.value_or(0.0));
      if (meta->mu) emit(k, "curvature_lower", c.lower.lhs, c.lower.rhs, c.lower.pass);
      if (meta->lambda) emit(k, "curvature_upper", c.upper.lhs, c.upper.rhs, c.upper.pass);
    }
    if (meta->beta) {
      const CheckReport g = check_gradient_bound(*potential, metric, x, *meta->beta);
      emit(k, "gradient_bound", g.lhs, g.rhs, g.pass);
    }
  }
  return failures;
}

}  // namespace mapla
