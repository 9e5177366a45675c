#include "mapla/metric.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mapla/errors.hpp"

namespace mapla {

namespace {

[[noreturn]] void not_interior(const std::string& who) {
  throw NotInterior(who + ": point is not in the interior of the body");
}

void require_size(const Vec& x, Eigen::Index n, const std::string& who) {
  if (x.size() != n) {
    std::ostringstream msg;
    msg << who << ": expected dimension " << n << ", got " << x.size();
    throw DimensionMismatch(msg.str());
  }
}

Vec positive_slack(const PolytopeBody& body, const Vec& x, const std::string& who) {
  require_size(x, body.dim(), who);
  Vec s = body.slack(x);
  if (!(s.array() > 0.0).all()) not_interior(who);
  return s;
}

}  // namespace

// ---- polytope ------------------------------------------------------------

PolytopeBarrierMetric::PolytopeBarrierMetric(std::shared_ptr<const PolytopeBody> body,
                                             std::optional<Vec> weights)
    : polytope_(std::move(body)), body_(polytope_), unit_weights_(!weights.has_value()) {
  const Eigen::Index m = polytope_->a().rows();
  weights_ = weights ? std::move(*weights) : Vec::Ones(m);
  if (weights_.size() != m) throw DimensionMismatch("polytope_logbarrier: need one weight per row");
  if ((weights_.array() < 0.0).any()) throw std::invalid_argument("polytope_logbarrier: negative weight");
}

SpdMatrix PolytopeBarrierMetric::eval(const Vec& x) const {
  const Vec s = positive_slack(*polytope_, x, "polytope_logbarrier");
  const Mat ax = s.cwiseInverse().asDiagonal() * polytope_->a();
  return ax.transpose() * weights_.asDiagonal() * ax;
}

std::optional<double> PolytopeBarrierMetric::barrier(const Vec& x) const {
  const Vec s = positive_slack(*polytope_, x, "polytope_logbarrier");
  return -weights_.dot(s.array().log().matrix());
}

MetricClaims PolytopeBarrierMetric::claims() const {
  MetricClaims c;
  c.strongly_self_concordant = unit_weights_;
  c.lower_trace = unit_weights_;
  c.average_self_concordant = unit_weights_;
  c.dikin_contained = unit_weights_;
  return c;
}

// ---- vaidya --------------------------------------------------------------

VaidyaMetric::VaidyaMetric(std::shared_ptr<const PolytopeBody> body)
    : polytope_(std::move(body)), body_(polytope_) {}

Vec VaidyaMetric::leverage_scores(const Vec& x) const {
  const Vec s = positive_slack(*polytope_, x, "vaidya");
  const Mat ax = s.cwiseInverse().asDiagonal() * polytope_->a();
  const CholFactor l = cholesky(ax.transpose() * ax);
  // Columns of L^-1 A_x^T are L^-1 [A_x]_i.
  const Mat solved = l.lower().triangularView<Eigen::Lower>().solve(ax.transpose());
  return solved.colwise().squaredNorm().transpose();
}

SpdMatrix VaidyaMetric::eval(const Vec& x) const {
  const Vec s = positive_slack(*polytope_, x, "vaidya");
  const Mat ax = s.cwiseInverse().asDiagonal() * polytope_->a();
  const Mat gram = ax.transpose() * ax;
  const CholFactor l = cholesky(gram);
  const Mat solved = l.lower().triangularView<Eigen::Lower>().solve(ax.transpose());
  const double base = static_cast<double>(ax.cols()) / static_cast<double>(ax.rows());
  const Vec w = solved.colwise().squaredNorm().transpose().array() + base;
  return ax.transpose() * w.asDiagonal() * ax;
}

MetricClaims VaidyaMetric::claims() const {
  MetricClaims c;
  c.strongly_self_concordant = true;
  return c;
}

// ---- ellipsoid -----------------------------------------------------------

EllipsoidBarrierMetric::EllipsoidBarrierMetric(std::shared_ptr<const EllipsoidBody> body)
    : ellipsoid_(std::move(body)), body_(ellipsoid_) {}

SpdMatrix EllipsoidBarrierMetric::eval(const Vec& x) const {
  require_size(x, ellipsoid_->dim(), "ellipsoid_barrier");
  const double s = ellipsoid_->slack(x);
  if (!(s > 0.0)) not_interior("ellipsoid_barrier");
  const Vec du = ellipsoid_->shape() * (x - ellipsoid_->center());
  return (2.0 * s) * ellipsoid_->shape() / (s * s) + (4.0 / (s * s)) * du * du.transpose();
}

std::optional<double> EllipsoidBarrierMetric::barrier(const Vec& x) const {
  const double s = ellipsoid_->slack(x);
  if (!(s > 0.0)) not_interior("ellipsoid_barrier");
  return -std::log(s);
}

MetricClaims EllipsoidBarrierMetric::claims() const {
  // Not strongly self-concordant for d >= 2: along the radial direction near
  // the boundary the Frobenius norm picks up d - 1 tangential terms of size
  // 2r/s each, and the ratio to 2||v||_G tends to sqrt(1 + (d - 1) / 4).
  MetricClaims c;
  c.strongly_self_concordant = dim() == 1;
  c.lower_trace = true;
  c.average_self_concordant = true;
  c.dikin_contained = true;
  return c;
}

// ---- epigraph ------------------------------------------------------------

EpigraphQuadraticMetric::EpigraphQuadraticMetric(std::shared_ptr<const EpigraphQuadraticBody> body)
    : epigraph_(std::move(body)), body_(epigraph_) {}

void EpigraphQuadraticMetric::accumulate(const SpdMatrix& d, const Vec& u, double s, Mat& out) {
  const Eigen::Index n = u.size();
  const Vec du = d * u;
  const double inv_s = 1.0 / s;
  const double inv_s2 = inv_s * inv_s;
  out.topLeftCorner(n, n) += 2.0 * inv_s * d + 4.0 * inv_s2 * du * du.transpose();
  out.col(n).head(n) += -2.0 * inv_s2 * du;
  out.row(n).head(n) += -2.0 * inv_s2 * du.transpose();
  out(n, n) += inv_s2;
}

SpdMatrix EpigraphQuadraticMetric::eval(const Vec& y) const {
  require_size(y, epigraph_->dim(), "epigraph_quadratic");
  const double s = epigraph_->slack(y);
  if (!(s > 0.0)) not_interior("epigraph_quadratic");
  const Eigen::Index n = epigraph_->center().size();
  Mat g = Mat::Zero(n + 1, n + 1);
  accumulate(epigraph_->shape(), y.head(n) - epigraph_->center(), s, g);
  return g;
}

std::optional<double> EpigraphQuadraticMetric::barrier(const Vec& y) const {
  const double s = epigraph_->slack(y);
  if (!(s > 0.0)) not_interior("epigraph_quadratic");
  return -std::log(s);
}

// ---- 2-D blocks ----------------------------------------------------------

Eigen::Matrix2d lp_block_hessian(double p, double y, double t) {
  const double r = 2.0 / p;
  const double tr = std::pow(t, r);
  const double w = tr - y * y;
  if (!(t > 0.0) || !(w > 0.0)) not_interior("lp block");
  const double w2 = w * w;
  const double dwt = r * tr / t;                  // r t^{r-1}
  const double dwtt = r * (r - 1.0) * tr / (t * t);  // r (r-1) t^{r-2}
  Eigen::Matrix2d h;
  h(0, 0) = 2.0 / w + 4.0 * y * y / w2;
  h(0, 1) = -2.0 * y * dwt / w2;
  h(1, 0) = h(0, 1);
  h(1, 1) = 1.0 / (t * t) - dwtt / w + dwt * dwt / w2;
  return h;
}

double lp_block_barrier(double p, double y, double t) {
  const double w = std::pow(t, 2.0 / p) - y * y;
  if (!(t > 0.0) || !(w > 0.0)) not_interior("lp block");
  return -std::log(t) - std::log(w);
}

Eigen::Matrix2d entropic_block_hessian(double y, double t) {
  if (!(y > 0.0)) not_interior("entropic block");
  const double ly = std::log(y);
  const double w = t - y * ly;
  if (!(w > 0.0)) not_interior("entropic block");
  const double w2 = w * w;
  const double g = ly + 1.0;
  Eigen::Matrix2d h;
  h(0, 0) = 1.0 / (y * y) + 1.0 / (y * w) + g * g / w2;
  h(0, 1) = -g / w2;
  h(1, 0) = h(0, 1);
  h(1, 1) = 1.0 / w2;
  return h;
}

double entropic_block_barrier(double y, double t) {
  if (!(y > 0.0)) not_interior("entropic block");
  const double w = t - y * std::log(y);
  if (!(w > 0.0)) not_interior("entropic block");
  return -std::log(y) - std::log(w);
}

namespace {

// Scatter per-coordinate 2x2 blocks onto (i, d+i) and add the halfspace
// barrier Hessian 11^T / (1 - 1^T v)^2 on the v coordinates.
template <typename BlockFn>
Mat assemble_extended(const Vec& y, Eigen::Index d, BlockFn&& block) {
  const double hs = 1.0 - y.tail(d).sum();
  if (!(hs > 0.0)) not_interior("extended ball halfspace");
  Mat g = Mat::Zero(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::Matrix2d h = block(y[i], y[d + i]);
    g(i, i) += h(0, 0);
    g(i, d + i) += h(0, 1);
    g(d + i, i) += h(1, 0);
    g(d + i, d + i) += h(1, 1);
  }
  g.bottomRightCorner(d, d).array() += 1.0 / (hs * hs);
  return g;
}

}  // namespace

LpBallExtendedMetric::LpBallExtendedMetric(std::shared_ptr<const LpBallExtendedBody> body)
    : lp_(std::move(body)), body_(lp_) {}

SpdMatrix LpBallExtendedMetric::eval(const Vec& y) const {
  require_size(y, lp_->dim(), "lp_ball_extended");
  const double p = lp_->p();
  return assemble_extended(y, lp_->base_dim(),
                           [p](double a, double b) { return lp_block_hessian(p, a, b); });
}

std::optional<double> LpBallExtendedMetric::barrier(const Vec& y) const {
  require_size(y, lp_->dim(), "lp_ball_extended");
  const Eigen::Index d = lp_->base_dim();
  const double hs = 1.0 - y.tail(d).sum();
  if (!(hs > 0.0)) not_interior("lp_ball_extended");
  double total = -std::log(hs);
  for (Eigen::Index i = 0; i < d; ++i) total += lp_block_barrier(lp_->p(), y[i], y[d + i]);
  return total;
}

EntropicBallExtendedMetric::EntropicBallExtendedMetric(
    std::shared_ptr<const EntropicBallExtendedBody> body)
    : ent_(std::move(body)), body_(ent_) {}

SpdMatrix EntropicBallExtendedMetric::eval(const Vec& y) const {
  require_size(y, ent_->dim(), "entropic_ball_extended");
  return assemble_extended(y, ent_->base_dim(),
                           [](double a, double b) { return entropic_block_hessian(a, b); });
}

std::optional<double> EntropicBallExtendedMetric::barrier(const Vec& y) const {
  require_size(y, ent_->dim(), "entropic_ball_extended");
  const Eigen::Index d = ent_->base_dim();
  const double hs = 1.0 - y.tail(d).sum();
  if (!(hs > 0.0)) not_interior("entropic_ball_extended");
  double total = -std::log(hs);
  for (Eigen::Index i = 0; i < d; ++i) total += entropic_block_barrier(y[i], y[d + i]);
  return total;
}

// ---- direct sum ----------------------------------------------------------

DirectSumMetric::DirectSumMetric(std::vector<MetricPtr> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw DimensionMismatch("direct_sum: need at least one metric");
  std::vector<BodyPtr> bodies;
  bodies.reserve(parts_.size());
  for (const auto& p : parts_) bodies.push_back(p->body());
  body_ = std::make_shared<ProductBody>(std::move(bodies));
}

SpdMatrix DirectSumMetric::eval(const Vec& x) const {
  require_size(x, body_->dim(), "direct_sum");
  Mat g = Mat::Zero(x.size(), x.size());
  Eigen::Index offset = 0;
  for (const auto& p : parts_) {
    const Eigen::Index n = p->dim();
    g.block(offset, offset, n, n) = p->eval(x.segment(offset, n));
    offset += n;
  }
  return g;
}

std::optional<double> DirectSumMetric::barrier(const Vec& x) const {
  require_size(x, body_->dim(), "direct_sum");
  double total = 0.0;
  Eigen::Index offset = 0;
  for (const auto& p : parts_) {
    const auto part = p->barrier(x.segment(offset, p->dim()));
    if (!part) return std::nullopt;
    total += *part;
    offset += p->dim();
  }
  return total;
}

std::string DirectSumMetric::name() const {
  std::string out = "direct_sum(";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) out += ", ";
    out += parts_[i]->name();
  }
  return out + ")";
}

MetricClaims DirectSumMetric::claims() const {
  MetricClaims c{true, true, true, true, true};
  for (const auto& p : parts_) {
    const MetricClaims pc = p->claims();
    c.self_concordant &= pc.self_concordant;
    c.strongly_self_concordant &= pc.strongly_self_concordant;
    c.lower_trace &= pc.lower_trace;
    c.average_self_concordant &= pc.average_self_concordant;
    c.dikin_contained &= pc.dikin_contained;
  }
  return c;
}

// ---- lifted quadratic ----------------------------------------------------

LiftedQuadraticMetric::LiftedQuadraticMetric(MetricPtr base, Vec c, SpdMatrix d)
    : base_(std::move(base)),
      lifted_(std::make_shared<LiftedQuadraticBody>(base_->body(), std::move(c), std::move(d))),
      body_(lifted_) {}

SpdMatrix LiftedQuadraticMetric::eval(const Vec& y) const {
  require_size(y, lifted_->dim(), "lift_quadratic");
  const Eigen::Index n = base_->dim();
  const auto& epi = lifted_->epigraph();
  const double s = epi.slack(y);
  if (!(s > 0.0)) not_interior("lift_quadratic");
  Mat g = Mat::Zero(n + 1, n + 1);
  g.topLeftCorner(n, n) = base_->eval(y.head(n));
  EpigraphQuadraticMetric::accumulate(epi.shape(), y.head(n) - epi.center(), s, g);
  return g;
}

std::optional<double> LiftedQuadraticMetric::barrier(const Vec& y) const {
  require_size(y, lifted_->dim(), "lift_quadratic");
  const auto base = base_->barrier(y.head(base_->dim()));
  if (!base) return std::nullopt;
  const double s = lifted_->epigraph().slack(y);
  if (!(s > 0.0)) not_interior("lift_quadratic");
  return *base - std::log(s);
}

// ---- constant ------------------------------------------------------------

ConstantMetric::ConstantMetric(BodyPtr body, SpdMatrix m) : body_(std::move(body)), m_(std::move(m)) {
  if (m_.rows() != body_->dim() || m_.cols() != body_->dim()) {
    throw DimensionMismatch("constant metric: matrix size must match body");
  }
}

SpdMatrix ConstantMetric::eval(const Vec& x) const {
  require_size(x, body_->dim(), "constant metric");
  if (!body_->interior_contains(x)) not_interior("constant metric");
  return m_;
}

std::optional<double> ConstantMetric::barrier(const Vec& x) const {
  if (!body_->interior_contains(x)) not_interior("constant metric");
  return 0.5 * x.dot(m_ * x);
}

MetricClaims ConstantMetric::claims() const {
  MetricClaims c;
  c.strongly_self_concordant = true;
  c.lower_trace = true;
  c.average_self_concordant = true;
  return c;
}

// ---- factories -----------------------------------------------------------

MetricPtr polytope_logbarrier(const Mat& a, const Vec& b, std::optional<Vec> weights) {
  return std::make_shared<PolytopeBarrierMetric>(std::make_shared<PolytopeBody>(a, b),
                                                 std::move(weights));
}

MetricPtr polytope_logbarrier(std::shared_ptr<const PolytopeBody> body) {
  return std::make_shared<PolytopeBarrierMetric>(std::move(body), std::nullopt);
}

MetricPtr vaidya(const Mat& a, const Vec& b) {
  return std::make_shared<VaidyaMetric>(std::make_shared<PolytopeBody>(a, b));
}

MetricPtr ellipsoid_barrier(const Vec& c, const SpdMatrix& d) {
  return std::make_shared<EllipsoidBarrierMetric>(std::make_shared<EllipsoidBody>(c, d));
}

MetricPtr epigraph_quadratic_barrier(const Vec& c, const SpdMatrix& d) {
  return std::make_shared<EpigraphQuadraticMetric>(std::make_shared<EpigraphQuadraticBody>(c, d));
}

MetricPtr lp_ball_extended(double p, Eigen::Index d) {
  return std::make_shared<LpBallExtendedMetric>(std::make_shared<LpBallExtendedBody>(p, d));
}

MetricPtr entropic_ball_extended(Eigen::Index d) {
  return std::make_shared<EntropicBallExtendedMetric>(std::make_shared<EntropicBallExtendedBody>(d));
}

MetricPtr direct_sum(std::vector<MetricPtr> metrics) {
  return std::make_shared<DirectSumMetric>(std::move(metrics));
}

MetricPtr lift_quadratic(const Vec& c, const SpdMatrix& d, MetricPtr base) {
  return std::make_shared<LiftedQuadraticMetric>(std::move(base), c, d);
}

MetricPtr identity_metric(BodyPtr body) {
  const Eigen::Index n = body->dim();
  return std::make_shared<ConstantMetric>(std::move(body), Mat::Identity(n, n));
}

MetricPtr corrupted(MetricPtr base, double amplitude, double period) {
  return std::make_shared<DiscontinuousScaleMetric>(std::move(base), amplitude, period);
}

DiscontinuousScaleMetric::DiscontinuousScaleMetric(MetricPtr base, double amplitude, double period)
    : base_(std::move(base)), amplitude_(amplitude), period_(period) {
  if (!(period_ > 0.0) || !(amplitude_ > -1.0)) {
    throw std::invalid_argument("corrupted metric: need period > 0 and amplitude > -1");
  }
}

SpdMatrix DiscontinuousScaleMetric::eval(const Vec& x) const {
  const double cell = std::floor(x(0) / period_);
  const double odd = std::fmod(std::abs(cell), 2.0);
  return (1.0 + amplitude_ * odd) * base_->eval(x);
}

// ---- Dikin ellipsoid -----------------------------------------------------

DikinEllipsoid::DikinEllipsoid(const Metric& metric, Vec center, double radius)
    : center_(std::move(center)), radius_(radius), factor_(cholesky(metric.eval(center_))) {}

bool DikinEllipsoid::contains(const Vec& y) const {
  return local_norm(factor_, y - center_) < radius_;
}

bool dikin_contains(const Metric& metric, const Vec& x, double r, const Vec& y) {
  return DikinEllipsoid(metric, x, r).contains(y);
}

}  // namespace mapla
