#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mapla/body.hpp"
#include "mapla/linalg.hpp"

namespace mapla {

/// Which self-concordance-type properties a metric is claimed to have.
/// The property checkers use this to decide what to test; it documents
/// claims, it does not prove them.
struct MetricClaims {
  bool self_concordant = true;
  bool strongly_self_concordant = false;
  bool lower_trace = false;
  bool average_self_concordant = false;
  bool dikin_contained = false;  ///< E_x(1) lies inside K
};

/// x -> G(x), an SPD matrix on int(K).
class Metric {
 public:
  virtual ~Metric() = default;

  virtual const BodyPtr& body() const = 0;
  Eigen::Index dim() const { return body()->dim(); }

  /// Throws NotInterior outside int(K).
  virtual SpdMatrix eval(const Vec& x) const = 0;

  /// Scalar barrier whose Hessian is eval(), when one exists. Used for
  /// finite-difference validation only.
  virtual std::optional<double> barrier(const Vec& x) const {
    (void)x;
    return std::nullopt;
  }

  virtual std::string name() const = 0;
  virtual MetricClaims claims() const { return {}; }
};

using MetricPtr = std::shared_ptr<const Metric>;

/// Weighted log-barrier Hessian A_x^T W A_x, [A_x]_i = a_i / (b_i - a_i^T x).
class PolytopeBarrierMetric final : public Metric {
 public:
  PolytopeBarrierMetric(std::shared_ptr<const PolytopeBody> body, std::optional<Vec> weights);

  const BodyPtr& body() const override { return body_; }
  SpdMatrix eval(const Vec& x) const override;
  std::optional<double> barrier(const Vec& x) const override;
  std::string name() const override { return "polytope_logbarrier"; }
  MetricClaims claims() const override;

  const PolytopeBody& polytope() const { return *polytope_; }

 private:
  std::shared_ptr<const PolytopeBody> polytope_;
  BodyPtr body_;
  Vec weights_;
  bool unit_weights_;
};

/// Vaidya weights w_i = d/m + sigma_i(x), sigma the leverage scores of A_x.
class VaidyaMetric final : public Metric {
 public:
  explicit VaidyaMetric(std::shared_ptr<const PolytopeBody> body);

  const BodyPtr& body() const override { return body_; }
  SpdMatrix eval(const Vec& x) const override;
  std::string name() const override { return "vaidya"; }
  MetricClaims claims() const override;

  /// sigma_i(x) = [A_x]_i^T (A_x^T A_x)^-1 [A_x]_i.
  Vec leverage_scores(const Vec& x) const;

 private:
  std::shared_ptr<const PolytopeBody> polytope_;
  BodyPtr body_;
};

/// Hessian of -log(1 - ||x - c||_D^2).
class EllipsoidBarrierMetric final : public Metric {
 public:
  explicit EllipsoidBarrierMetric(std::shared_ptr<const EllipsoidBody> body);

  const BodyPtr& body() const override { return body_; }
  SpdMatrix eval(const Vec& x) const override;
  std::optional<double> barrier(const Vec& x) const override;
  std::string name() const override { return "ellipsoid_barrier"; }
  MetricClaims claims() const override;

 private:
  std::shared_ptr<const EllipsoidBody> ellipsoid_;
  BodyPtr body_;
};

/// Hessian of -log(t - ||x - c||_D^2) over (x, t).
class EpigraphQuadraticMetric final : public Metric {
 public:
  explicit EpigraphQuadraticMetric(std::shared_ptr<const EpigraphQuadraticBody> body);

  const BodyPtr& body() const override { return body_; }
  SpdMatrix eval(const Vec& y) const override;
  std::optional<double> barrier(const Vec& y) const override;
  std::string name() const override { return "epigraph_quadratic"; }

  /// The (d+1) x (d+1) Hessian at slack s > 0 and offset u = x - c, added
  /// into `out` starting at (0, 0).
  static void accumulate(const SpdMatrix& d, const Vec& u, double s, Mat& out);

 private:
  std::shared_ptr<const EpigraphQuadraticBody> epigraph_;
  BodyPtr body_;
};

/// 2x2 Hessian of -log t - log(t^{2/p} - y^2).
Eigen::Matrix2d lp_block_hessian(double p, double y, double t);
double lp_block_barrier(double p, double y, double t);

/// 2x2 Hessian of -log y - log(t - y log y).
Eigen::Matrix2d entropic_block_hessian(double y, double t);
double entropic_block_barrier(double y, double t);

/// Extended l_p ball metric: interleaved 2x2 blocks on (x_i, v_i) plus the
/// halfspace barrier Hessian on v. Coordinates are ordered x first, v second.
class LpBallExtendedMetric final : public Metric {
 public:
  explicit LpBallExtendedMetric(std::shared_ptr<const LpBallExtendedBody> body);

  const BodyPtr& body() const override { return body_; }
  SpdMatrix eval(const Vec& y) const override;
  std::optional<double> barrier(const Vec& y) const override;
  std::string name() const override { return "lp_ball_extended"; }

 private:
  std::shared_ptr<const LpBallExtendedBody> lp_;
  BodyPtr body_;
};

class EntropicBallExtendedMetric final : public Metric {
 public:
  explicit EntropicBallExtendedMetric(std::shared_ptr<const EntropicBallExtendedBody> body);

  const BodyPtr& body() const override { return body_; }
  SpdMatrix eval(const Vec& y) const override;
  std::optional<double> barrier(const Vec& y) const override;
  std::string name() const override { return "entropic_ball_extended"; }

 private:
  std::shared_ptr<const EntropicBallExtendedBody> ent_;
  BodyPtr body_;
};

/// Block-diagonal metric over the product of the factor bodies.
class DirectSumMetric final : public Metric {
 public:
  explicit DirectSumMetric(std::vector<MetricPtr> parts);

  const BodyPtr& body() const override { return body_; }
  SpdMatrix eval(const Vec& x) const override;
  std::optional<double> barrier(const Vec& x) const override;
  std::string name() const override;
  MetricClaims claims() const override;

 private:
  std::vector<MetricPtr> parts_;
  BodyPtr body_;
};

/// Metric on the lifted domain {(x, t) : x in base, ||x - c||_D^2 <= t}:
/// (G_base(x) (+) 0) plus the epigraph barrier Hessian.
class LiftedQuadraticMetric final : public Metric {
 public:
  LiftedQuadraticMetric(MetricPtr base, Vec c, SpdMatrix d);

  const BodyPtr& body() const override { return body_; }
  SpdMatrix eval(const Vec& y) const override;
  std::optional<double> barrier(const Vec& y) const override;
  std::string name() const override { return "lifted_quadratic(" + base_->name() + ")"; }

 private:
  MetricPtr base_;
  std::shared_ptr<const LiftedQuadraticBody> lifted_;
  BodyPtr body_;
};

/// Position-independent G(x) = M on int(K). M = I gives MALA.
class ConstantMetric final : public Metric {
 public:
  ConstantMetric(BodyPtr body, SpdMatrix m);

  const BodyPtr& body() const override { return body_; }
  SpdMatrix eval(const Vec& x) const override;
  std::optional<double> barrier(const Vec& x) const override;
  std::string name() const override { return "constant"; }
  MetricClaims claims() const override;

 private:
  BodyPtr body_;
  SpdMatrix m_;
};

/// Negative control for the checkers: G(x) times 1 + amplitude * (floor(x_0 / period) mod 2).
/// The jumps break every derivative-based property at scales above `period`.
class DiscontinuousScaleMetric final : public Metric {
 public:
  DiscontinuousScaleMetric(MetricPtr base, double amplitude, double period);

  const BodyPtr& body() const override { return base_->body(); }
  SpdMatrix eval(const Vec& x) const override;
  std::string name() const override { return "corrupted(" + base_->name() + ")"; }
  MetricClaims claims() const override { return base_->claims(); }

 private:
  MetricPtr base_;
  double amplitude_;
  double period_;
};

MetricPtr polytope_logbarrier(const Mat& a, const Vec& b, std::optional<Vec> weights = std::nullopt);
MetricPtr polytope_logbarrier(std::shared_ptr<const PolytopeBody> body);
MetricPtr vaidya(const Mat& a, const Vec& b);
MetricPtr ellipsoid_barrier(const Vec& c, const SpdMatrix& d);
MetricPtr epigraph_quadratic_barrier(const Vec& c, const SpdMatrix& d);
MetricPtr lp_ball_extended(double p, Eigen::Index d);
MetricPtr entropic_ball_extended(Eigen::Index d);
MetricPtr direct_sum(std::vector<MetricPtr> metrics);
MetricPtr lift_quadratic(const Vec& c, const SpdMatrix& d, MetricPtr base);
MetricPtr identity_metric(BodyPtr body);
MetricPtr corrupted(MetricPtr base, double amplitude = 0.5, double period = 1e-5);

/// E_x(r) = {y : ||y - x||_{G(x)} < r}.
class DikinEllipsoid {
 public:
  DikinEllipsoid(const Metric& metric, Vec center, double radius);

  bool contains(const Vec& y) const;
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const CholFactor& factor() const { return factor_; }

 private:
  Vec center_;
  double radius_;
  CholFactor factor_;
};

bool dikin_contains(const Metric& metric, const Vec& x, double r, const Vec& y);

}  // namespace mapla
