#include <doctest.h>

#include <cmath>

#include "mapla/errors.hpp"
#include "mapla/linalg.hpp"
#include "support.hpp"

using namespace mapla;
using mapla::testing::random_spd;

TEST_CASE("cholesky: small fixed cases") {
  const CholFactor id = cholesky(Mat::Identity(3, 3));
  CHECK((id.lower() - Mat::Identity(3, 3)).norm() == 0.0);

  Mat s(2, 2);
  s << 4, 2, 2, 3;
  const CholFactor l = cholesky(s);
  CHECK((l.lower() * l.lower().transpose() - s).norm() < 1e-14);
  CHECK(l.lower()(0, 1) == 0.0);
  CHECK(l.lower()(0, 0) > 0.0);
  CHECK(l.lower()(1, 1) > 0.0);

  Mat four(1, 1);
  four << 4;
  CHECK(cholesky(four).lower()(0, 0) == 2.0);
}

TEST_CASE("cholesky: rejects indefinite, singular and non-finite input") {
  Mat s(2, 2);
  s << 1, 2, 2, 1;
  CHECK_THROWS_AS(cholesky(s), NotPositiveDefinite);
  CHECK_THROWS_AS(cholesky(Mat::Zero(3, 3)), NotPositiveDefinite);
  Mat t = Mat::Identity(2, 2);
  t(1, 1) = std::nan("");
  CHECK_THROWS_AS(cholesky(t), NotPositiveDefinite);
  // Pivot below 1e-13 of the largest diagonal.
  Mat u(2, 2);
  u << 1, 0, 0, 1e-15;
  CHECK_THROWS_AS(cholesky(u), NotPositiveDefinite);
}

TEST_CASE("tri_solve: hand example and construct-then-solve") {
  Mat lm(2, 2);
  lm << 2, 0, 1, std::sqrt(2.0);
  const CholFactor l(lm);
  Vec rhs(2);
  rhs << 2, 1 + std::sqrt(2.0);
  const Vec y = tri_solve(l, rhs);
  CHECK(y(0) == doctest::Approx(1.0));
  CHECK(y(1) == doctest::Approx(1.0));

  const Vec v = Vec::Random(2);
  CHECK((tri_solve(CholFactor(Mat::Identity(2, 2)), v) - v).norm() == 0.0);

  RngStream rng(11);
  const CholFactor f = cholesky(random_spd(5, rng));
  const Vec w = rng.normal_vector(5);
  CHECK((tri_solve(f, tri_multiply(f, w)) - w).norm() < 1e-12);
  CHECK((tri_solve(f, tri_multiply(f, w, true), true) - w).norm() < 1e-12);
  CHECK_THROWS_AS(tri_solve(f, Vec::Zero(4)), DimensionMismatch);
}

TEST_CASE("solve_spd: 2x2 adjugate oracle and residuals") {
  Mat s(2, 2);
  s << 4, 2, 2, 3;
  Vec rhs(2);
  rhs << 6, 5;
  const Vec v = solve_spd(cholesky(s), rhs);
  // inverse = [[3, -2], [-2, 4]] / 8
  CHECK(v(0) == doctest::Approx((3 * 6 - 2 * 5) / 8.0));
  CHECK(v(1) == doctest::Approx((-2 * 6 + 4 * 5) / 8.0));

  RngStream rng(3);
  const Mat big = random_spd(8, rng);
  const Vec r = rng.normal_vector(8);
  CHECK((big * solve_spd(cholesky(big), r) - r).norm() <= 1e-10 * r.norm());
  CHECK_THROWS_AS(solve_spd(cholesky(big), Vec::Zero(3)), DimensionMismatch);
}

TEST_CASE("logdet: scalar, identity and eigenvalue oracle") {
  CHECK(logdet(cholesky(Mat::Identity(4, 4))) == 0.0);
  Mat four(1, 1);
  four << 4;
  CHECK(logdet(cholesky(four)) == doctest::Approx(std::log(4.0)));
  RngStream rng(5);
  const Mat s = random_spd(6, rng);
  const Eigen::SelfAdjointEigenSolver<Mat> eig(s);
  CHECK(logdet(cholesky(s)) == doctest::Approx(eig.eigenvalues().array().log().sum()).epsilon(1e-12));
  CHECK(log_diag_sum(cholesky(s)) == doctest::Approx(0.5 * logdet(cholesky(s))));
}

TEST_CASE("norms through the factor") {
  RngStream rng(8);
  const Mat s = random_spd(4, rng);
  const CholFactor l = cholesky(s);
  const Vec v = rng.normal_vector(4);
  CHECK(local_norm(l, v) == doctest::Approx(std::sqrt(v.dot(s * v))).epsilon(1e-12));
  CHECK(dual_norm(l, v) == doctest::Approx(std::sqrt(v.dot(s.inverse() * v))).epsilon(1e-12));
}

TEST_CASE("sample_precision_gaussian: identity, scalar, determinism") {
  RngStream a(42);
  const auto d = sample_precision_gaussian(CholFactor(Mat::Identity(3, 3)), a);
  CHECK((d.xi - d.scaled).norm() == 0.0);

  Mat two(1, 1);
  two << 2;
  RngStream b(7), c(7);
  const auto e = sample_precision_gaussian(CholFactor(two), b);
  const auto f = sample_precision_gaussian(CholFactor(two), c);
  CHECK(e.xi(0) == f.xi(0));
  CHECK(e.scaled(0) == e.xi(0) / 2.0);
}

TEST_CASE("sample_precision_gaussian: covariance of the scaled draw") {
  RngStream rng(2024);
  const Mat s = random_spd(4, rng, 1.0);
  const CholFactor l = cholesky(s);
  const Mat target = s.inverse();
  const int n = 100000;
  Mat acc = Mat::Zero(4, 4);
  for (int i = 0; i < n; ++i) {
    const Vec z = sample_precision_gaussian(l, rng).scaled;
    acc += z * z.transpose();
  }
  acc /= n;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(acc(i, j) - target(i, j)) <= std::max(0.05 * std::abs(target(i, j)), 0.02));
}

TEST_CASE("PSD test with shift") {
  CHECK(is_psd(Mat::Zero(3, 3), 1e-12));
  CHECK(is_psd(Mat::Identity(3, 3), 0.0));
  Mat s(2, 2);
  s << 1, 0, 0, -1e-3;
  CHECK_FALSE(is_psd(s, 1e-10));
  CHECK(is_psd(s, 1e-2));
}
