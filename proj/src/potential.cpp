#include "mapla/potential.hpp"

#include <cmath>
#include <sstream>

#include "mapla/errors.hpp"

namespace mapla {

namespace {

void require_size(const Vec& x, Eigen::Index n, const char* who) {
  if (x.size() != n) {
    std::ostringstream msg;
    msg << who << ": expected dimension " << n << ", got " << x.size();
    throw DimensionMismatch(msg.str());
  }
}

// 1 - 1^T x for x in the open simplex; throws otherwise.
double simplex_slack(const Vec& x) {
  const double s = 1.0 - x.sum();
  if (!(x.array() > 0.0).all() || !(s > 0.0)) {
    throw NotInterior("dirichlet: point is not in the open simplex");
  }
  return s;
}

}  // namespace

Mat Potential::hessian(const Vec& x) const {
  const Eigen::Index n = dim();
  Mat h(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = 1e-5 * std::max(1.0, std::abs(x[j]));
    Vec xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    h.col(j) = (gradient(xp) - gradient(xm)) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

double softplus(double m) {
  return std::max(m, 0.0) + std::log1p(std::exp(-std::abs(m)));
}

double logistic(double m) {
  if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

// ---- Dirichlet -----------------------------------------------------------

DirichletPotential::DirichletPotential(Vec a) : a_(std::move(a)) {
  if (a_.size() < 2) throw DimensionMismatch("dirichlet: need at least two concentration entries");
  if (!(a_.array() > -1.0).all()) throw std::invalid_argument("dirichlet: entries must exceed -1");
}

double DirichletPotential::value(const Vec& x) const {
  require_size(x, dim(), "dirichlet");
  const double s = simplex_slack(x);
  const Eigen::Index d = dim();
  return -a_.head(d).dot(x.array().log().matrix()) - a_[d] * std::log(s);
}

Vec DirichletPotential::gradient(const Vec& x) const {
  require_size(x, dim(), "dirichlet");
  const double s = simplex_slack(x);
  const Eigen::Index d = dim();
  return (-a_.head(d).array() / x.array() + a_[d] / s).matrix();
}

Mat DirichletPotential::hessian(const Vec& x) const {
  require_size(x, dim(), "dirichlet");
  const double s = simplex_slack(x);
  const Eigen::Index d = dim();
  Mat h = Mat::Constant(d, d, a_[d] / (s * s));
  h.diagonal().array() += a_.head(d).array() / x.array().square();
  return h;
}

std::optional<CurvatureMetadata> DirichletPotential::metadata() const {
  CurvatureMetadata m;
  m.mu = a_.minCoeff();
  m.lambda = a_.maxCoeff();
  m.beta = a_.norm();
  m.metric = "simplex_logbarrier";
  return m;
}

// ---- linear --------------------------------------------------------------

LinearPotential::LinearPotential(Vec sigma) : sigma_(std::move(sigma)) {}

double LinearPotential::value(const Vec& x) const {
  require_size(x, dim(), "linear");
  return sigma_.dot(x);
}

Vec LinearPotential::gradient(const Vec& x) const {
  require_size(x, dim(), "linear");
  return sigma_;
}

Mat LinearPotential::hessian(const Vec& x) const {
  require_size(x, dim(), "linear");
  return Mat::Zero(dim(), dim());
}

std::optional<CurvatureMetadata> LinearPotential::metadata() const {
  CurvatureMetadata m;
  m.mu = 0.0;
  m.lambda = 0.0;
  m.metric = "any";
  return m;
}

// ---- Bayesian logistic regression -----------------------------------------

BlrData::BlrData(Mat covariates, Vec labels) : x(std::move(covariates)), y(std::move(labels)) {
  if (x.rows() < 1) throw std::invalid_argument("blr: need at least one observation");
  if (x.rows() != y.size()) throw DimensionMismatch("blr: one label per covariate row");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) throw std::invalid_argument("blr: labels must be 0 or 1");
  }
}

BlrPotential::BlrPotential(BlrData data) : data_(std::move(data)) {}

double BlrPotential::value(const Vec& theta) const {
  require_size(theta, dim(), "blr");
  const Vec margin = data_.x * theta;
  // softplus(m) - y m equals softplus(-m) when y = 1 and softplus(m) when y = 0.
  double total = 0.0;
  for (Eigen::Index i = 0; i < margin.size(); ++i) {
    total += data_.y[i] == 1.0 ? softplus(-margin[i]) : softplus(margin[i]);
  }
  return total;
}

Vec BlrPotential::gradient(const Vec& theta) const {
  require_size(theta, dim(), "blr");
  const Vec margin = data_.x * theta;
  Vec resid(margin.size());
  for (Eigen::Index i = 0; i < margin.size(); ++i) resid[i] = logistic(margin[i]) - data_.y[i];
  return data_.x.transpose() * resid;
}

Mat BlrPotential::hessian(const Vec& theta) const {
  require_size(theta, dim(), "blr");
  const Vec margin = data_.x * theta;
  Vec w(margin.size());
  for (Eigen::Index i = 0; i < margin.size(); ++i) {
    const double s = logistic(margin[i]);
    w[i] = s * (1.0 - s);
  }
  return data_.x.transpose() * w.asDiagonal() * data_.x;
}

// ---- quadratic -----------------------------------------------------------

QuadraticPotential::QuadraticPotential(Vec c, SpdMatrix d, double scale)
    : c_(std::move(c)), d_(std::move(d)), scale_(scale) {
  if (d_.rows() != c_.size() || d_.cols() != c_.size()) {
    throw DimensionMismatch("quadratic: D must be d x d");
  }
}

double QuadraticPotential::value(const Vec& x) const {
  require_size(x, dim(), "quadratic");
  const Vec u = x - c_;
  return scale_ * u.dot(d_ * u);
}

Vec QuadraticPotential::gradient(const Vec& x) const {
  require_size(x, dim(), "quadratic");
  return 2.0 * scale_ * (d_ * (x - c_));
}

Mat QuadraticPotential::hessian(const Vec& x) const {
  require_size(x, dim(), "quadratic");
  return 2.0 * scale_ * d_;
}

PotentialPtr dirichlet_potential(const Vec& a) { return std::make_shared<DirichletPotential>(a); }
PotentialPtr linear_potential(const Vec& sigma) { return std::make_shared<LinearPotential>(sigma); }
PotentialPtr zero_potential(Eigen::Index d) { return linear_potential(Vec::Zero(d)); }
PotentialPtr blr_potential(BlrData data) { return std::make_shared<BlrPotential>(std::move(data)); }
PotentialPtr quadratic_potential(const Vec& c, const SpdMatrix& d, double scale) {
  return std::make_shared<QuadraticPotential>(c, d, scale);
}

}  // namespace mapla
