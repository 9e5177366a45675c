#include "mapla/experiments.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mapla/errors.hpp"

namespace mapla {

RngStream aux_stream(std::uint64_t seed, std::uint64_t tag) {
  return RngStream(splitmix64(seed ^ splitmix64(tag + 0x5eedULL)));
}

Vec ramp_concentration(Eigen::Index d, double a_min, double a_max) {
  if (d < 1) throw std::invalid_argument("ramp_concentration: d >= 1");
  Vec a(d + 1);
  for (Eigen::Index i = 0; i <= d; ++i) {
    a(i) = a_min + (static_cast<double>(i) / static_cast<double>(d)) * (a_max - a_min);
  }
  return a;
}

DirichletSetup make_dirichlet_setup(const Vec& a) {
  if (a.size() < 2) throw std::invalid_argument("dirichlet: need at least two weights");
  if ((a.array() <= -1.0).any()) throw std::invalid_argument("dirichlet: weights must exceed -1");
  const Eigen::Index d = a.size() - 1;
  DirichletSetup s;
  s.a = a;
  s.body = make_simplex(d);
  s.metric = polytope_logbarrier(s.body);
  s.potential = dirichlet_potential(a);
  s.barycenter = Vec::Constant(d, 1.0 / static_cast<double>(d + 1));
  return s;
}

InitialDistribution dirichlet_init(const DirichletSetup& setup, double radius) {
  return dikin_ball_uniform(setup.metric, setup.barycenter, radius);
}

double ramp_step_size(double c_h, double a_max, Eigen::Index d) {
  return c_h / (a_max * static_cast<double>(d));
}

double sweep_step_size(double gamma, Eigen::Index d) {
  return 1.0 / (10.0 * std::pow(static_cast<double>(d), gamma));
}

SeriesRun run_distance_series(const SamplerConfig& config, const SeriesOptions& opts,
                              const InitialDistribution& init, const EnergyReference& reference) {
  if (opts.w2_every < 0 || (opts.w2_every > 0 && opts.w2_every % opts.record_every != 0)) {
    throw std::invalid_argument("w2_every must be 0 or a multiple of record_every");
  }
  SeriesRun out;
  out.series.push_back(DistanceSeries{Measure::ED, {}, {}});
  if (opts.w2_every > 0) out.series.push_back(DistanceSeries{Measure::W2sq, {}, {}});

  RunOptions ro{opts.n_chains, opts.n_iters, opts.record_every, opts.workers};
  run_chains(config, ro, init, [&](const SampleBatch& b) {
    out.series[0].push(b.iteration, reference.distance_to(b.points));
    if (opts.w2_every > 0 && (b.iteration % opts.w2_every == 0 || b.iteration == opts.n_iters)) {
      const SinkhornResult r = sinkhorn_w2sq(b.points, reference.points(), opts.sinkhorn);
      if (!r.converged) ++out.sinkhorn_unconverged;
      out.series[1].push(b.iteration, r.value);
    }
    if (b.iteration == opts.n_iters) out.tallies = b.tallies();
  });
  return out;
}

double run_acceptance(const SamplerConfig& config, std::size_t n_chains, long n_iters, long burn_in,
                      const InitialDistribution& init, unsigned workers) {
  if (burn_in < 0 || burn_in >= n_iters) {
    throw std::invalid_argument("run_acceptance: need 0 <= burn_in < n_iters");
  }
  // Only the snapshots at burn-in and at the end matter.
  std::optional<SampleBatch> start;
  std::optional<SampleBatch> last;
  RunOptions ro{n_chains, n_iters, burn_in > 0 ? burn_in : n_iters, workers};
  run_chains(config, ro, init, [&](const SampleBatch& b) {
    if (b.iteration == burn_in) start = b;
    if (b.iteration == n_iters) last = b;
  });
  return acceptance_rate(*start, *last);
}

// ---------------------------------------------------------------------------

Mat givens_product(Eigen::Index d, const Vec& angles) {
  if (2 * angles.size() > d) throw DimensionMismatch("givens_product: too many angles");
  Mat r = Mat::Identity(d, d);
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    const double c = std::cos(angles(i));
    const double s = std::sin(angles(i));
    Mat g = Mat::Identity(d, d);
    g(2 * i, 2 * i) = c;
    g(2 * i, 2 * i + 1) = -s;
    g(2 * i + 1, 2 * i) = s;
    g(2 * i + 1, 2 * i + 1) = c;
    r = g * r;
  }
  return r;
}

double power_iteration(const Mat& s, RngStream& rng, int max_iter, double tol) {
  Vec v = rng.normal_vector(s.rows());
  v.normalize();
  double lambda = 0.0;
  for (int k = 0; k < max_iter; ++k) {
    Vec w = s * v;
    const double next = v.dot(w);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    v = w / nrm;
    if (std::abs(next - lambda) <= tol * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

BlrProblem generate_blr_problem(Eigen::Index d, int n_factor, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("blr: d >= 2");
  if (n_factor < 1) throw std::invalid_argument("blr: n_factor >= 1");
  const Eigen::Index n = static_cast<Eigen::Index>(n_factor) * d;
  BlrProblem p;
  p.theta_star = Vec::Ones(d);

  RngStream data_rng = aux_stream(seed, 1);
  const double entry = 1.0 / std::sqrt(static_cast<double>(d));
  Mat x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = (data_rng.next_u64() >> 63) ? entry : -entry;
  }
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = data_rng.uniform() < logistic(x.row(i).dot(p.theta_star)) ? 1.0 : 0.0;
  }

  RngStream geo_rng = aux_stream(seed, 2);
  p.angles.resize(d / 2);
  for (Eigen::Index i = 0; i < p.angles.size(); ++i) {
    p.angles(i) = 2.0 * std::numbers::pi * geo_rng.uniform();
  }
  p.translation = Vec::Constant(d, 0.5);
  p.rotation = givens_product(d, p.angles);

  // |R^T (theta - t)|_inf <= 2  as  [R^T; -R^T] theta <= [2 + R^T t; 2 - R^T t].
  const Mat rt = p.rotation.transpose();
  const Vec shift = rt * p.translation;
  Mat a(2 * d, d);
  a << rt, -rt;
  Vec b(2 * d);
  b << (2.0 + shift.array()).matrix(), (2.0 - shift.array()).matrix();
  p.body = std::make_shared<const PolytopeBody>(a, b);
  p.metric = polytope_logbarrier(p.body);

  RngStream pw_rng = aux_stream(seed, 3);
  p.lambda_max = power_iteration(x.transpose() * x, pw_rng);
  p.potential = std::make_shared<const BlrPotential>(BlrData(std::move(x), std::move(y)));
  return p;
}

double blr_step_size(const BlrProblem& problem, double c_h) {
  return c_h / (problem.lambda_max * static_cast<double>(problem.theta_star.size()));
}

InitialDistribution blr_init(const BlrProblem& problem, double radius) {
  return dikin_ball_uniform(problem.metric, problem.translation, radius);
}

std::vector<BlrRecord> run_blr_series(const SamplerConfig& config, const BlrProblem& problem,
                                      std::size_t n_chains, long n_iters, long record_every,
                                      const InitialDistribution& init, unsigned workers) {
  std::vector<BlrRecord> out;
  RunOptions ro{n_chains, n_iters, record_every, workers};
  run_chains(config, ro, init, [&](const SampleBatch& b) {
    out.push_back(BlrRecord{b.iteration, blr_measures(b.points, problem.theta_star, *problem.potential),
                            diff_quantiles(b.points, problem.theta_star)});
  });
  return out;
}

}  // namespace mapla
