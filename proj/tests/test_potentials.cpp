#include <doctest.h>

#include <cmath>

#include "mapla/checks.hpp"
#include "mapla/errors.hpp"
#include "mapla/experiments.hpp"
#include "mapla/potential.hpp"
#include "support.hpp"

using namespace mapla;
using namespace mapla::testing;

namespace {

// Central differences of value(), relative error against gradient().
double grad_fd_error(const Potential& f, const Vec& x, double h = 1e-6) {
  const Vec g = f.gradient(x);
  Vec fd(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec p = x, m = x;
    p(i) += h;
    m(i) -= h;
    fd(i) = (f.value(p) - f.value(m)) / (2 * h);
  }
  return (fd - g).norm() / std::max(1.0, g.norm());
}

// Interior simplex point with every slack at least `margin`.
Vec simplex_point(Eigen::Index d, RngStream& rng, double margin) {
  Vec w(d + 1);
  for (Eigen::Index i = 0; i <= d; ++i) w(i) = rng.gamma(1.0) + 1e-12;
  w /= w.sum();
  w = margin + (1.0 - (d + 1) * margin) * w.array();
  return w.head(d);
}

}  // namespace

TEST_CASE("dirichlet values") {
  const PotentialPtr f = dirichlet_potential(Vec::Ones(2));
  CHECK(f->value(scalar(0.5)) == doctest::Approx(2 * std::log(2.0)));
  CHECK(std::abs(f->gradient(scalar(0.5))(0)) < 1e-15);
  CHECK_THROWS_AS(f->value(scalar(1.0)), NotInterior);
  CHECK_THROWS_AS(f->gradient(scalar(-0.2)), NotInterior);

  const PotentialPtr flat = dirichlet_potential(Vec::Zero(4));
  const Vec x = Vec::Constant(3, 0.2);
  CHECK(flat->value(x) == 0.0);
  CHECK(flat->gradient(x).norm() == 0.0);

  CHECK(DirichletPotential(Vec::Ones(3)).log_concave());
  Vec neg(3);
  neg << 1.0, -0.5, 2.0;
  CHECK_FALSE(DirichletPotential(neg).log_concave());
}

TEST_CASE("dirichlet metadata matches the simplex barrier") {
  RngStream rng(3);
  const Vec a = ramp_concentration(4, 1.0, 3.0);
  const auto pot = dirichlet_potential(a);
  const auto g = polytope_logbarrier(make_simplex(4));
  const auto meta = pot->metadata();
  REQUIRE(meta.has_value());
  CHECK(*meta->mu == doctest::Approx(1.0));
  CHECK(*meta->lambda == doctest::Approx(3.0));
  CHECK(*meta->beta == doctest::Approx(a.norm()));
  for (int k = 0; k < 100; ++k) {
    const Vec x = simplex_point(4, rng, 1e-3);
    const CurvatureReport c = check_curvature_bounds(*pot, *g, x, *meta->mu, *meta->lambda);
    CHECK(c.lower.pass);
    CHECK(c.upper.pass);
    CHECK(check_gradient_bound(*pot, *g, x, *meta->beta).pass);
  }
}

TEST_CASE("linear and quadratic values") {
  Vec s(2), x(2);
  s << 1, -1;
  x << 0.3, 0.4;
  const PotentialPtr f = linear_potential(s);
  CHECK(f->value(x) == doctest::Approx(-0.1));
  CHECK(f->gradient(x) == s);
  const auto g = polytope_logbarrier(make_box(Vec::Zero(2), Vec::Ones(2)));
  const CurvatureReport c = check_curvature_bounds(*f, *g, x, 0.0, 0.0);
  CHECK(c.lower.pass);
  CHECK(c.upper.pass);
  CHECK(linear_potential(Vec::Zero(2))->value(x) == 0.0);

  const PotentialPtr q = quadratic_potential(Vec::Zero(1), Mat::Identity(1, 1), 0.5);
  CHECK(q->value(scalar(2.0)) == doctest::Approx(2.0));
  CHECK(q->gradient(scalar(2.0))(0) == doctest::Approx(2.0));
  CHECK(quadratic_potential(Vec::Zero(1), Mat::Identity(1, 1), 0.0)->value(scalar(3.0)) == 0.0);
}

TEST_CASE("blr values and overflow") {
  Mat x = Mat::Zero(1, 2);
  x(0, 0) = 1.0;
  const auto f = blr_potential(BlrData(x, Vec::Ones(1)));
  CHECK(f->value(Vec::Zero(2)) == doctest::Approx(std::log(2.0)));
  Vec g = f->gradient(Vec::Zero(2));
  CHECK(g(0) == doctest::Approx(-0.5));
  CHECK(g(1) == 0.0);

  // margin 50 with label 1: log(1 + e^50) - 50 = log1p(e^-50)
  Vec th(2);
  th << 50.0, 0.0;
  const double v = f->value(th);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(std::exp(-50.0)).epsilon(1e-10));
  CHECK(softplus(50.0) - 50.0 == doctest::Approx(std::exp(-50.0)).epsilon(1e-6));
  CHECK(softplus(800.0) == 800.0);
  CHECK(softplus(-800.0) == 0.0);
  CHECK(logistic(-800.0) == 0.0);
  CHECK(logistic(800.0) == 1.0);
  th << -50.0, 0.0;
  CHECK(f->value(th) == doctest::Approx(50.0));
}

TEST_CASE("blr matches naive evaluation at small margins") {
  RngStream rng(5);
  const Eigen::Index n = 40, d = 4;
  Mat x(n, d);
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.uniform() < 0.5 ? -0.5 : 0.5;
    y(i) = rng.uniform() < 0.5 ? 0.0 : 1.0;
  }
  const auto f = blr_potential(BlrData(x, y));
  auto naive = [&](const Vec& th) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = x.row(i).dot(th);
      s -= y(i) * m - std::log(1.0 + std::exp(m));
    }
    return s;
  };
  for (int k = 0; k < 20; ++k) {
    const Vec th = rng.normal_vector(d);
    CHECK(std::abs((f->value(th) - f->value(Vec::Zero(d))) - (naive(th) - naive(Vec::Zero(d)))) < 1e-9);
  }
}

TEST_CASE("gradients agree with finite differences") {
  RngStream rng(7);
  const Vec a = ramp_concentration(3, 0.5, 2.0);
  const auto dir = dirichlet_potential(a);
  for (int k = 0; k < 50; ++k) CHECK(grad_fd_error(*dir, simplex_point(3, rng, 1e-3), 1e-8) < 1e-6);

  Vec c(3);
  c << 0.1, -0.2, 0.3;
  const auto q = quadratic_potential(c, random_spd(3, rng), 0.7);
  for (int k = 0; k < 50; ++k) CHECK(grad_fd_error(*q, rng.normal_vector(3)) < 1e-6);

  const auto lin = linear_potential(rng.normal_vector(3));
  for (int k = 0; k < 10; ++k) CHECK(grad_fd_error(*lin, rng.normal_vector(3)) < 1e-6);

  const BlrProblem p = generate_blr_problem(6, 20, 11);
  for (int k = 0; k < 20; ++k) CHECK(grad_fd_error(*p.potential, rng.normal_vector(6)) < 1e-6);
}

TEST_CASE("dirichlet with a >= 0 is convex") {
  RngStream rng(13);
  const auto f = dirichlet_potential(ramp_concentration(3, 0.0, 2.0));
  for (int k = 0; k < 50; ++k) {
    const Vec x = simplex_point(3, rng, 1e-2);
    // Hessian from finite differences of the gradient.
    Mat h(3, 3);
    const double e = 1e-6;
    for (Eigen::Index j = 0; j < 3; ++j) {
      Vec p = x, m = x;
      p(j) += e;
      m(j) -= e;
      h.col(j) = (f->gradient(p) - f->gradient(m)) / (2 * e);
    }
    const Vec v = rng.normal_vector(3);
    CHECK(v.dot(h * v) >= -1e-6 * h.norm());
  }
}

TEST_CASE("blr curvature upper bound against the rotated-box barrier") {
  RngStream rng(17);
  const BlrProblem p = generate_blr_problem(8, 20, 4);
  for (int k = 0; k < 30; ++k) {
    const Vec th = random_interior(*p.body, p.translation, rng);
    CHECK(is_psd(p.metric->eval(th) - 0.5 * Mat::Identity(8, 8), 1e-12));
    const CurvatureReport c = check_curvature_bounds(*p.potential, *p.metric, th, 0.0, p.lambda_max / 2);
    CHECK(c.lower.pass);
    CHECK(c.upper.pass);
  }
}
