#include <doctest.h>

#include <atomic>
#include <cmath>

#include "mapla/errors.hpp"
#include "mapla/experiments.hpp"
#include "mapla/sampler.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mapla;
using namespace mapla::testing;

namespace {

// Wraps a potential and counts every evaluation.
class CountingPotential final : public Potential {
 public:
  explicit CountingPotential(PotentialPtr inner) : inner_(std::move(inner)) {}
  Eigen::Index dim() const override { return inner_->dim(); }
  double value(const Vec& x) const override {
    ++calls;
    return inner_->value(x);
  }
  Vec gradient(const Vec& x) const override {
    ++calls;
    return inner_->gradient(x);
  }
  std::string name() const override { return "counting"; }
  mutable std::atomic<long> calls{0};

 private:
  PotentialPtr inner_;
};

SamplerConfig interval_config(double h, Algorithm alg = Algorithm::Mapla) {
  SamplerConfig c;
  c.metric = polytope_logbarrier(interval());
  c.potential = dirichlet_potential(Vec::Ones(2));
  c.step_size = h;
  c.algorithm = alg;
  c.master_seed = 42;
  return c;
}

}  // namespace

TEST_CASE("proposal examples") {
  const auto g = polytope_logbarrier(interval());
  const auto zero = zero_potential(1);
  const PointCache at = evaluate_point(*g, *zero, scalar(0.5), Algorithm::Mapla);
  CHECK(at.natural_grad(0) == 0.0);
  const Proposal p = propose_with_noise(at, 0.02, scalar(1.0));
  CHECK(p.z(0) == doctest::Approx(0.5 + 0.2 / std::sqrt(8.0)).epsilon(1e-14));
  CHECK(p.xi_scaled(0) == doctest::Approx(1 / std::sqrt(8.0)));

  // xi = 0: natural gradient step
  RngStream rng(1);
  const auto box = polytope_logbarrier(make_box(Vec::Constant(3, -1.0), Vec::Constant(3, 1.0)));
  const auto lin = linear_potential(rng.normal_vector(3));
  const Vec x = Vec::Constant(3, 0.2);
  const PointCache c = evaluate_point(*box, *lin, x, Algorithm::Mapla);
  const Proposal q = propose_with_noise(c, 0.1, Vec::Zero(3));
  const Vec expect = x - 0.1 * box->eval(x).ldlt().solve(lin->gradient(x));
  CHECK((q.z - expect).norm() < 1e-14);
  // cache invariants
  CHECK((c.factor.reconstruct() - box->eval(x)).norm() < 1e-12 * box->eval(x).norm());
  CHECK((box->eval(x) * c.natural_grad - lin->gradient(x)).norm() < 1e-10);

  // DikinWalk drops the drift
  const PointCache dw = evaluate_point(*box, *lin, x, Algorithm::DikinWalk);
  CHECK(propose_with_noise(dw, 0.1, Vec::Zero(3)).z == x);
}

TEST_CASE("log ratio: symmetric proposal and scalar oracle") {
  RngStream rng(2);
  const auto body = make_box(Vec::Constant(2, -5.0), Vec::Constant(2, 5.0));
  const auto m = std::make_shared<ConstantMetric>(body, random_spd(2, rng));
  const auto zero = zero_potential(2);
  const PointCache at = evaluate_point(*m, *zero, Vec::Zero(2), Algorithm::Mapla);
  for (int k = 0; k < 20; ++k) {
    const Proposal p = propose_with_noise(at, 0.3, rng.normal_vector(2));
    // zero up to rounding in L_z^T L_x^-T xi
    const double lr = log_accept_ratio(at, p, 0.3, *m, *zero, Algorithm::Mapla).log_ratio;
    CHECK(std::abs(lr) <= 1e-12);
    CHECK(std::exp(std::min(0.0, lr)) >= 1.0 - 1e-12);
  }

  const auto g = polytope_logbarrier(interval());
  const auto z1 = zero_potential(1);
  const double h = 0.02;
  const PointCache ax = evaluate_point(*g, *z1, scalar(0.5), Algorithm::Mapla);
  const Proposal p = propose_with_noise(ax, h, scalar(1.0));
  const double x = 0.5, z = p.z(0);
  const double gx = 1 / (x * x) + 1 / ((1 - x) * (1 - x));
  const double gz = 1 / (z * z) + 1 / ((1 - z) * (1 - z));
  const double direct = 0.5 * std::log(gz / gx) + ((z - x) * (z - x) * gx - (x - z) * (x - z) * gz) / (4 * h);
  CHECK(std::abs(log_accept_ratio(ax, p, h, *g, *z1, Algorithm::Mapla).log_ratio - direct) < 1e-10);
}

TEST_CASE("log ratio matches the dense density oracle") {
  RngStream rng(3);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    Vec lo(2), hi(2);
    lo << -1 - rng.uniform(), -rng.uniform();
    hi << 1 + rng.uniform(), 0.5 + rng.uniform();
    const auto body = make_box(lo, hi);
    const bool identity = k % 2 == 0;
    const MetricPtr g = identity ? identity_metric(body) : polytope_logbarrier(body);
    const PotentialPtr f = quadratic_potential(rng.normal_vector(2), random_spd(2, rng), 0.5);
    Vec u(2);
    u << rng.uniform(), rng.uniform();
    const Vec x = lo + (hi - lo).cwiseProduct(Vec::Constant(2, 0.1) + 0.8 * u);
    for (Algorithm alg : {Algorithm::Mapla, Algorithm::DikinWalk}) {
      const PointCache at = evaluate_point(*g, *f, x, alg);
      const double h = 0.01 + 0.1 * rng.uniform();
      const Proposal p = propose_with_noise(at, h, rng.normal_vector(2));
      if (!body->interior_contains(p.z)) continue;
      const double lr = log_accept_ratio(at, p, h, *g, *f, alg).log_ratio;
      const double oracle = dense_log_ratio(*g, *f, x, p.z, h, alg == Algorithm::Mapla);
      worst = std::max(worst, std::abs(lr - oracle));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("outside proposals never touch the potential") {
  SamplerConfig c = interval_config(5.0);
  auto counting = std::make_shared<CountingPotential>(c.potential);
  c.potential = counting;
  ChainState s = make_chain(c, scalar(0.5), RngStream(9));
  long outside = 0;
  for (int k = 0; k < 200; ++k) {
    const long before = counting->calls;
    const Vec x_before = s.cache.x;
    const StepRecord r = step(s, c);
    if (r.outcome == StepOutcome::RejectedOutsideK) {
      ++outside;
      CHECK(counting->calls == before);
      CHECK(s.cache.x == x_before);
      CHECK(std::isnan(r.log_ratio));
      CHECK_FALSE(c.metric->body()->interior_contains(r.z));
    } else {
      CHECK(c.metric->body()->interior_contains(r.z));
    }
  }
  CHECK(outside > 0);
  CHECK(s.tallies.rejected_outside == outside);
}

TEST_CASE("identity metric reproduces reference MALA") {
  const Vec lo = Vec::Constant(3, -1e3), hi = Vec::Constant(3, 1e3);
  SamplerConfig c;
  c.metric = identity_metric(make_box(lo, hi));
  c.potential = quadratic_potential(Vec::Zero(3), Mat::Identity(3, 3), 0.5);
  c.step_size = 0.4;
  const Vec x0 = Vec::Constant(3, 2.0);
  ChainState s = make_chain(c, x0, RngStream(77));
  const MalaTrace ref = reference_mala(*c.potential, lo, hi, x0, 0.4, 2000, RngStream(77));
  for (long k = 0; k < 2000; ++k) {
    const StepRecord r = step(s, c);
    const int d = r.outcome == StepOutcome::AcceptedMove ? 1 : r.outcome == StepOutcome::RejectedByMH ? 0 : -1;
    REQUIRE(d == ref.decisions[static_cast<std::size_t>(k)]);
  }
  CHECK(s.cache.x == ref.final_x);
}

TEST_CASE("zero potential: MAPLA and DikinWalk agree") {
  RngStream rng(8);
  const auto body = make_box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  const auto g = polytope_logbarrier(body);
  const auto zero = zero_potential(2);
  for (int k = 0; k < 50; ++k) {
    const Vec x = random_interior(*body, Vec::Zero(2), rng, 0.9);
    const PointCache a = evaluate_point(*g, *zero, x, Algorithm::Mapla);
    const PointCache b = evaluate_point(*g, *zero, x, Algorithm::DikinWalk);
    const Vec xi = rng.normal_vector(2);
    const Proposal pa = propose_with_noise(a, 0.05, xi);
    const Proposal pb = propose_with_noise(b, 0.05, xi);
    CHECK(pa.z == pb.z);
    if (!body->interior_contains(pa.z)) continue;
    const double la = log_accept_ratio(a, pa, 0.05, *g, *zero, Algorithm::Mapla).log_ratio;
    const double lb = log_accept_ratio(b, pb, 0.05, *g, *zero, Algorithm::DikinWalk).log_ratio;
    CHECK(std::abs(la - lb) <= 1e-12);
  }
}

TEST_CASE("chains stay interior") {
  const DirichletSetup s = make_dirichlet_setup(ramp_concentration(3, 1, 3));
  SamplerConfig c;
  c.metric = s.metric;
  c.potential = s.potential;
  c.step_size = 0.5;  // large: plenty of outside proposals
  c.master_seed = 5;
  RunOptions o;
  o.n_chains = 20;
  o.n_iters = 300;
  const auto batches = run_chains(c, o, dirichlet_init(s));
  CHECK(batches.size() == 301);
  for (const auto& b : batches)
    for (Eigen::Index i = 0; i < b.points.rows(); ++i)
      REQUIRE(s.body->interior_contains(b.points.row(i).transpose()));
  CHECK(batches.back().tallies().rejected_outside > 0);
}

TEST_CASE("run_chains bookkeeping") {
  SamplerConfig c = interval_config(0.1);
  RunOptions o;
  o.n_chains = 7;
  o.n_iters = 0;
  const Mat init = Mat::Constant(7, 1, 0.25);
  auto b0 = run_chains(c, o, from_points(init));
  REQUIRE(b0.size() == 1);
  CHECK(b0[0].points == init);
  CHECK(b0[0].tallies().proposals() == 0);

  o.n_iters = 25;
  o.record_every = 10;
  auto b = run_chains(c, o, point_mass(scalar(0.5)));
  REQUIRE(b.size() == 4);
  CHECK(b[0].iteration == 0);
  CHECK(b[1].iteration == 10);
  CHECK(b[2].iteration == 20);
  CHECK(b[3].iteration == 25);
  CHECK(b[3].tallies().proposals() == 7 * 25);

  o.workers = 4;
  auto w = run_chains(c, o, point_mass(scalar(0.5)));
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(w[i].points == b[i].points);

  c.master_seed = 43;
  auto other = run_chains(c, o, point_mass(scalar(0.5)));
  CHECK(other.back().points != b.back().points);
}

TEST_CASE("lazy chain holds about half the time") {
  SamplerConfig c = interval_config(0.1);
  c.lazy_probability = 0.5;
  RunOptions o;
  o.n_chains = 10;
  o.n_iters = 2000;
  o.record_every = 2000;
  const Tallies t = run_chains(c, o, point_mass(scalar(0.5))).back().tallies();
  CHECK(t.held + t.proposals() == 20000);
  CHECK(std::abs(static_cast<double>(t.held) / 20000 - 0.5) < 0.02);
}

TEST_CASE("invalid inputs") {
  SamplerConfig c = interval_config(0.1);
  CHECK_THROWS_AS(make_chain(c, scalar(1.5), RngStream(1)), InitNotInterior);
  CHECK_THROWS_AS(make_chain(c, scalar(0.0), RngStream(1)), InitNotInterior);
  RunOptions o;
  o.n_chains = 2;
  o.n_iters = 5;
  CHECK_THROWS_AS(run_chains(c, o, point_mass(scalar(2.0))), InitNotInterior);
  c.step_size = 0.0;
  CHECK_THROWS(c.validate());
  c.step_size = 0.1;
  c.potential = zero_potential(2);
  CHECK_THROWS_AS(c.validate(), DimensionMismatch);
}

TEST_CASE("factorization failure at an interior proposal is an outside rejection") {
  // Zero weights on the upper face: G vanishes off the left half, so any
  // move to x > 0.5 is interior but has a singular metric there.
  class HalfMetric final : public Metric {
   public:
    HalfMetric() : body_(interval()) {}
    const BodyPtr& body() const override { return body_; }
    SpdMatrix eval(const Vec& x) const override {
      return SpdMatrix::Constant(1, 1, x(0) < 0.5 ? 1.0 : 0.0);
    }
    std::string name() const override { return "half"; }

   private:
    BodyPtr body_;
  };
  SamplerConfig c;
  c.metric = std::make_shared<HalfMetric>();
  c.potential = zero_potential(1);
  c.step_size = 0.01;
  ChainState s = make_chain(c, scalar(0.45), RngStream(4));
  for (int k = 0; k < 500; ++k) {
    const StepRecord r = step(s, c);
    if (r.factorization_failure) CHECK(r.outcome == StepOutcome::RejectedOutsideK);
    CHECK(s.cache.x(0) < 0.5);
  }
  CHECK(s.tallies.rejected_factorization > 0);
  CHECK(s.tallies.rejected_factorization <= s.tallies.rejected_outside);
}

TEST_CASE("Beta(2,2) marginal") {
  SamplerConfig c = interval_config(0.1);
  RunOptions o;
  o.n_chains = 100;
  o.n_iters = 600;
  o.record_every = 100;
  std::vector<double> xs;
  run_chains(c, o, point_mass(scalar(0.5)), [&](const SampleBatch& b) {
    if (b.iteration < 100) return;
    for (Eigen::Index i = 0; i < b.points.rows(); ++i) xs.push_back(b.points(i, 0));
  });
  CHECK(xs.size() == 600);
  CHECK(ks_statistic(xs, beta22_cdf) < 0.08);
}
