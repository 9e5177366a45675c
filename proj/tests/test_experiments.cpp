#include <doctest.h>

#include <cmath>

#include "mapla/experiments.hpp"
#include "support.hpp"

using namespace mapla;
using namespace mapla::testing;

TEST_CASE("ramp concentration and step rules") {
  const Vec a = ramp_concentration(4, 1.0, 3.0);
  REQUIRE(a.size() == 5);
  CHECK(a(0) == 1.0);
  CHECK(a(2) == doctest::Approx(2.0));
  CHECK(a(4) == doctest::Approx(3.0));
  CHECK(ramp_step_size(0.1, 3.0, 10) == doctest::Approx(0.1 / 30));
  CHECK(sweep_step_size(1.5, 16) == doctest::Approx(1.0 / (10 * 64)));

  const DirichletSetup s = make_dirichlet_setup(a);
  CHECK(s.dim() == 4);
  CHECK(s.barycenter == Vec::Constant(4, 0.2));
  RngStream rng(1);
  const auto init = dirichlet_init(s);
  for (int k = 0; k < 100; ++k) {
    const Vec x = init(0, rng);
    CHECK(dikin_contains(*s.metric, s.barycenter, 0.5 + 1e-12, x));
  }
}

TEST_CASE("aux streams are separated by tag") {
  RngStream a = aux_stream(7, 1), b = aux_stream(7, 2), c = aux_stream(7, 1);
  const auto x = a.next_u64();
  CHECK(x != b.next_u64());
  CHECK(x == c.next_u64());
  CHECK(x != RngStream::derive(7, 1).next_u64());
}

TEST_CASE("givens product is orthogonal") {
  RngStream rng(2);
  for (Eigen::Index d : {2, 5, 8}) {
    Vec ang(d / 2);
    for (Eigen::Index i = 0; i < ang.size(); ++i) ang(i) = 2 * M_PI * rng.uniform();
    const Mat r = givens_product(d, ang);
    CHECK((r.transpose() * r - Mat::Identity(d, d)).norm() < 1e-12);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
  }
  Vec one(1);
  one << M_PI / 2;
  const Mat r = givens_product(3, one);
  CHECK(std::abs(r(2, 2) - 1.0) < 1e-15);
  CHECK(std::abs(std::abs(r(0, 1)) - 1.0) < 1e-15);
}

TEST_CASE("power iteration") {
  RngStream rng(3);
  const Mat s = random_spd(6, rng);
  const double top = Eigen::SelfAdjointEigenSolver<Mat>(s).eigenvalues().maxCoeff();
  CHECK(power_iteration(s, rng) == doctest::Approx(top).epsilon(1e-8));
}

TEST_CASE("blr problem construction") {
  const BlrProblem p = generate_blr_problem(8, 20, 5);
  CHECK(p.potential->data().n() == 160);
  CHECK(p.theta_star == Vec::Ones(8));
  CHECK(p.translation == Vec::Constant(8, 0.5));
  CHECK(p.angles.size() == 4);
  CHECK(p.body->interior_contains(p.theta_star));
  CHECK(p.body->interior_contains(p.translation));
  const Mat& x = p.potential->data().x;
  CHECK((x.array().abs() - 1.0 / std::sqrt(8.0)).abs().maxCoeff() < 1e-15);
  const Vec& y = p.potential->data().y;
  CHECK(((y.array() == 0.0) || (y.array() == 1.0)).all());
  const double top = Eigen::SelfAdjointEigenSolver<Mat>(x.transpose() * x).eigenvalues().maxCoeff();
  CHECK(p.lambda_max == doctest::Approx(top).epsilon(1e-8));
  CHECK(blr_step_size(p, 0.2) == doctest::Approx(0.2 / (top * 8)));

  // Theta is the rotated [-2, 2]^d box around t: corners map to the boundary.
  const Vec corner = p.rotation * Vec::Constant(8, 2.0);
  CHECK(p.body->interior_contains(p.translation + (1 - 1e-9) * corner));
  CHECK_FALSE(p.body->contains(p.translation + (1 + 1e-9) * corner));

  const BlrProblem q = generate_blr_problem(8, 20, 5);
  CHECK(q.potential->data().x == x);
  CHECK(q.angles == p.angles);
}

TEST_CASE("Bai-Yin scale of lambda_max at d = 64") {
  const BlrProblem p = generate_blr_problem(64, 20, 1);
  const double pred = std::pow(std::sqrt(20.0) + 1.0, 2);
  CHECK(std::abs(p.lambda_max - pred) <= 0.3 * pred);
}

TEST_CASE("BLR error shrinks for MAPLA at d = 8") {
  const BlrProblem p = generate_blr_problem(8, 20, 1);
  SamplerConfig c;
  c.metric = p.metric;
  c.potential = p.potential;
  c.step_size = blr_step_size(p, 0.2);
  c.master_seed = 1;
  const auto recs = run_blr_series(c, p, 100, 1000, 100, blr_init(p));
  REQUIRE(recs.size() == 11);
  CHECK(recs.back().measures.err < recs.front().measures.err);
  CHECK(recs.back().diff.q25 <= recs.back().diff.q75);
}

TEST_CASE("distance series run") {
  const DirichletSetup s = make_dirichlet_setup(ramp_concentration(2, 1, 3));
  RngStream rng = aux_stream(1, 10);
  const EnergyReference ref(dirichlet_reference_sample(s.a, 100, rng));
  SamplerConfig c;
  c.metric = s.metric;
  c.potential = s.potential;
  c.step_size = ramp_step_size(0.2, 3, 2);
  c.master_seed = 3;
  SeriesOptions o;
  o.n_chains = 50;
  o.n_iters = 100;
  o.record_every = 10;
  o.w2_every = 50;
  const SeriesRun r = run_distance_series(c, o, dirichlet_init(s), ref);
  REQUIRE(r.series.size() == 2);
  CHECK(r.series[0].measure == Measure::ED);
  CHECK(r.series[0].iterations.size() == 11);
  CHECK(r.series[1].measure == Measure::W2sq);
  CHECK(r.series[1].iterations == std::vector<long>{0, 50, 100});
  CHECK(r.tallies.proposals() == 50 * 100);
  // the Dikin ball start is far from the target
  CHECK(r.series[0].values.back() < r.series[0].values.front());
}
