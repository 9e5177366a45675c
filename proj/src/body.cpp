#include "mapla/body.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mapla/errors.hpp"

namespace mapla {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_size(const Vec& x, Eigen::Index n, const char* what) {
  if (x.size() != n) {
    std::ostringstream msg;
    msg << what << ": expected dimension " << n << ", got " << x.size();
    throw DimensionMismatch(msg.str());
  }
}

}  // namespace

double ConvexBody::exit_distance(const Vec& x, const Vec& u) const {
  if (u.squaredNorm() == 0.0) return kInf;
  double lo = 0.0;
  double hi = 1.0;
  while (interior_contains(x + hi * u)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) return kInf;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (interior_contains(x + mid * u)) lo = mid;
    else hi = mid;
  }
  return lo;
}

PolytopeBody::PolytopeBody(Mat a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size()) throw DimensionMismatch("polytope: rows of A must match size of b");
  if (a_.cols() == 0) throw DimensionMismatch("polytope: dimension must be positive");
}

std::string PolytopeBody::describe() const {
  std::ostringstream out;
  out << "polytope(m=" << a_.rows() << ", d=" << a_.cols() << ")";
  return out.str();
}

bool PolytopeBody::contains(const Vec& x) const {
  require_size(x, dim(), "polytope");
  return (slack(x).array() >= 0.0).all();
}

bool PolytopeBody::interior_contains(const Vec& x) const {
  require_size(x, dim(), "polytope");
  return (slack(x).array() > 0.0).all();
}

double PolytopeBody::exit_distance(const Vec& x, const Vec& u) const {
  const Vec s = slack(x);
  const Vec rate = a_ * u;
  double t = kInf;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (rate[i] > 0.0) t = std::min(t, s[i] / rate[i]);
  }
  return t;
}

EllipsoidBody::EllipsoidBody(Vec c, SpdMatrix d) : c_(std::move(c)), d_(std::move(d)) {
  if (d_.rows() != c_.size() || d_.cols() != c_.size()) {
    throw DimensionMismatch("ellipsoid: D must be d x d");
  }
}

double EllipsoidBody::slack(const Vec& x) const {
  require_size(x, dim(), "ellipsoid");
  const Vec u = x - c_;
  return 1.0 - u.dot(d_ * u);
}

bool EllipsoidBody::contains(const Vec& x) const { return slack(x) >= 0.0; }
bool EllipsoidBody::interior_contains(const Vec& x) const { return slack(x) > 0.0; }

double EllipsoidBody::exit_distance(const Vec& x, const Vec& u) const {
  // ||x - c + t u||_D^2 = 1, positive root.
  const Vec w = x - c_;
  const double qa = u.dot(d_ * u);
  if (qa == 0.0) return kInf;
  const double qb = w.dot(d_ * u);
  const double qc = w.dot(d_ * w) - 1.0;
  const double disc = std::max(0.0, qb * qb - qa * qc);
  // Numerically stable root: -qc / (qb + sqrt(disc)) when qb >= 0.
  if (qb >= 0.0) return -qc / (qb + std::sqrt(disc));
  return (-qb + std::sqrt(disc)) / qa;
}

EpigraphQuadraticBody::EpigraphQuadraticBody(Vec c, SpdMatrix d)
    : c_(std::move(c)), d_(std::move(d)) {
  if (d_.rows() != c_.size() || d_.cols() != c_.size()) {
    throw DimensionMismatch("epigraph: D must be d x d");
  }
}

double EpigraphQuadraticBody::slack(const Vec& y) const {
  require_size(y, dim(), "epigraph");
  const Eigen::Index d = c_.size();
  const Vec u = y.head(d) - c_;
  return y[d] - u.dot(d_ * u);
}

LpBallExtendedBody::LpBallExtendedBody(double p, Eigen::Index base_dim)
    : p_(p), base_dim_(base_dim) {
  if (!(p_ >= 1.0)) throw std::invalid_argument("lp ball: p must be >= 1");
  if (base_dim_ < 1) throw DimensionMismatch("lp ball: base dimension must be positive");
}

std::string LpBallExtendedBody::describe() const {
  std::ostringstream out;
  out << "lp_ball_extended(p=" << p_ << ", d=" << base_dim_ << ")";
  return out.str();
}

bool LpBallExtendedBody::contains(const Vec& y) const {
  require_size(y, dim(), "lp ball");
  const auto x = y.head(base_dim_);
  const auto v = y.tail(base_dim_);
  for (Eigen::Index i = 0; i < base_dim_; ++i) {
    if (!(std::pow(std::abs(x[i]), p_) <= v[i])) return false;
  }
  return v.sum() <= 1.0;
}

bool LpBallExtendedBody::interior_contains(const Vec& y) const {
  require_size(y, dim(), "lp ball");
  const auto x = y.head(base_dim_);
  const auto v = y.tail(base_dim_);
  for (Eigen::Index i = 0; i < base_dim_; ++i) {
    // Same test the barrier uses: v > 0 and v^{2/p} - x^2 > 0.
    if (!(v[i] > 0.0)) return false;
    if (!(std::pow(v[i], 2.0 / p_) - x[i] * x[i] > 0.0)) return false;
  }
  return 1.0 - v.sum() > 0.0;
}

EntropicBallExtendedBody::EntropicBallExtendedBody(Eigen::Index base_dim) : base_dim_(base_dim) {
  if (base_dim_ < 1) throw DimensionMismatch("entropic ball: base dimension must be positive");
}

std::string EntropicBallExtendedBody::describe() const {
  std::ostringstream out;
  out << "entropic_ball_extended(d=" << base_dim_ << ")";
  return out.str();
}

bool EntropicBallExtendedBody::contains(const Vec& y) const {
  require_size(y, dim(), "entropic ball");
  const auto x = y.head(base_dim_);
  const auto v = y.tail(base_dim_);
  for (Eigen::Index i = 0; i < base_dim_; ++i) {
    if (!(x[i] >= 0.0)) return false;
    const double xlogx = x[i] > 0.0 ? x[i] * std::log(x[i]) : 0.0;
    if (!(xlogx <= v[i])) return false;
  }
  return v.sum() <= 1.0;
}

bool EntropicBallExtendedBody::interior_contains(const Vec& y) const {
  require_size(y, dim(), "entropic ball");
  const auto x = y.head(base_dim_);
  const auto v = y.tail(base_dim_);
  for (Eigen::Index i = 0; i < base_dim_; ++i) {
    if (!(x[i] > 0.0)) return false;
    if (!(v[i] - x[i] * std::log(x[i]) > 0.0)) return false;
  }
  return 1.0 - v.sum() > 0.0;
}

ProductBody::ProductBody(std::vector<BodyPtr> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw DimensionMismatch("product: need at least one factor");
  for (const auto& f : factors_) dim_ += f->dim();
}

std::string ProductBody::describe() const {
  std::ostringstream out;
  out << "product(";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out << ", ";
    out << factors_[i]->describe();
  }
  out << ")";
  return out.str();
}

bool ProductBody::contains(const Vec& x) const {
  require_size(x, dim_, "product");
  Eigen::Index offset = 0;
  for (const auto& f : factors_) {
    if (!f->contains(x.segment(offset, f->dim()))) return false;
    offset += f->dim();
  }
  return true;
}

bool ProductBody::interior_contains(const Vec& x) const {
  require_size(x, dim_, "product");
  Eigen::Index offset = 0;
  for (const auto& f : factors_) {
    if (!f->interior_contains(x.segment(offset, f->dim()))) return false;
    offset += f->dim();
  }
  return true;
}

double ProductBody::exit_distance(const Vec& x, const Vec& u) const {
  double t = kInf;
  Eigen::Index offset = 0;
  for (const auto& f : factors_) {
    const Vec uf = u.segment(offset, f->dim());
    if (uf.squaredNorm() > 0.0) t = std::min(t, f->exit_distance(x.segment(offset, f->dim()), uf));
    offset += f->dim();
  }
  return t;
}

LiftedQuadraticBody::LiftedQuadraticBody(BodyPtr base, Vec c, SpdMatrix d)
    : base_(std::move(base)), epigraph_(std::move(c), std::move(d)) {
  if (epigraph_.dim() != base_->dim() + 1) {
    throw DimensionMismatch("lift_quadratic: center dimension must match base body");
  }
}

std::string LiftedQuadraticBody::describe() const {
  return "lifted_quadratic(" + base_->describe() + ")";
}

bool LiftedQuadraticBody::contains(const Vec& y) const {
  require_size(y, dim(), "lifted body");
  return base_->contains(y.head(base_->dim())) && epigraph_.contains(y);
}

bool LiftedQuadraticBody::interior_contains(const Vec& y) const {
  require_size(y, dim(), "lifted body");
  return base_->interior_contains(y.head(base_->dim())) && epigraph_.interior_contains(y);
}

std::shared_ptr<const PolytopeBody> make_box(const Vec& lo, const Vec& hi) {
  if (lo.size() != hi.size()) throw DimensionMismatch("box: lo and hi sizes differ");
  const Eigen::Index d = lo.size();
  Mat a = Mat::Zero(2 * d, d);
  Vec b(2 * d);
  a.topRows(d).setIdentity();
  a.bottomRows(d) = -Mat::Identity(d, d);
  b.head(d) = hi;
  b.tail(d) = -lo;
  return std::make_shared<PolytopeBody>(std::move(a), std::move(b));
}

std::shared_ptr<const PolytopeBody> make_simplex(Eigen::Index d) {
  Mat a = Mat::Zero(d + 1, d);
  Vec b = Vec::Zero(d + 1);
  a.topRows(d) = -Mat::Identity(d, d);
  a.row(d).setOnes();
  b[d] = 1.0;
  return std::make_shared<PolytopeBody>(std::move(a), std::move(b));
}

}  // namespace mapla
