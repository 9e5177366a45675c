#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mapla/linalg.hpp"

namespace mapla {

enum class BodyKind {
  Polytope,
  Ellipsoid,
  LpBallExtended,
  EntropicBallExtended,
  EpigraphQuadratic,
  Product,
  LiftedQuadratic,
};

/// Closed convex set K with membership oracles for K and int(K).
class ConvexBody {
 public:
  virtual ~ConvexBody() = default;

  virtual Eigen::Index dim() const = 0;
  virtual BodyKind kind() const = 0;
  virtual std::string describe() const = 0;

  virtual bool contains(const Vec& x) const = 0;
  /// Strict inequalities, no slack tolerance.
  virtual bool interior_contains(const Vec& x) const = 0;

  /// sup{t >= 0 : x + s u in int(K) for all s in [0, t)} for x interior.
  /// +inf when the ray never leaves. The default bisects on
  /// interior_contains; bodies with closed forms override it.
  virtual double exit_distance(const Vec& x, const Vec& u) const;
};

using BodyPtr = std::shared_ptr<const ConvexBody>;

/// {x : A x <= b}.
class PolytopeBody final : public ConvexBody {
 public:
  PolytopeBody(Mat a, Vec b);

  Eigen::Index dim() const override { return a_.cols(); }
  BodyKind kind() const override { return BodyKind::Polytope; }
  std::string describe() const override;
  bool contains(const Vec& x) const override;
  bool interior_contains(const Vec& x) const override;
  double exit_distance(const Vec& x, const Vec& u) const override;

  const Mat& a() const { return a_; }
  const Vec& b() const { return b_; }
  Vec slack(const Vec& x) const { return b_ - a_ * x; }

 private:
  Mat a_;
  Vec b_;
};

/// {x : ||x - c||_D^2 <= 1}.
class EllipsoidBody final : public ConvexBody {
 public:
  EllipsoidBody(Vec c, SpdMatrix d);

  Eigen::Index dim() const override { return c_.size(); }
  BodyKind kind() const override { return BodyKind::Ellipsoid; }
  std::string describe() const override { return "ellipsoid"; }
  bool contains(const Vec& x) const override;
  bool interior_contains(const Vec& x) const override;
  double exit_distance(const Vec& x, const Vec& u) const override;

  const Vec& center() const { return c_; }
  const SpdMatrix& shape() const { return d_; }
  double slack(const Vec& x) const;

 private:
  Vec c_;
  SpdMatrix d_;
};

/// {(x, t) in R^{d+1} : ||x - c||_D^2 <= t}.
class EpigraphQuadraticBody final : public ConvexBody {
 public:
  EpigraphQuadraticBody(Vec c, SpdMatrix d);

  Eigen::Index dim() const override { return c_.size() + 1; }
  BodyKind kind() const override { return BodyKind::EpigraphQuadratic; }
  std::string describe() const override { return "epigraph_quadratic"; }
  bool contains(const Vec& y) const override { return slack(y) >= 0.0; }
  bool interior_contains(const Vec& y) const override { return slack(y) > 0.0; }

  const Vec& center() const { return c_; }
  const SpdMatrix& shape() const { return d_; }
  /// t - ||x - c||_D^2.
  double slack(const Vec& y) const;

 private:
  Vec c_;
  SpdMatrix d_;
};

/// Extended l_p ball in R^{2d}: points (x, v) with |x_i|^p <= v_i and
/// sum v_i <= 1. Its projection onto x is the unit l_p ball.
class LpBallExtendedBody final : public ConvexBody {
 public:
  LpBallExtendedBody(double p, Eigen::Index base_dim);

  Eigen::Index dim() const override { return 2 * base_dim_; }
  BodyKind kind() const override { return BodyKind::LpBallExtended; }
  std::string describe() const override;
  bool contains(const Vec& y) const override;
  bool interior_contains(const Vec& y) const override;

  double p() const { return p_; }
  Eigen::Index base_dim() const { return base_dim_; }

 private:
  double p_;
  Eigen::Index base_dim_;
};

/// Extended entropic ball in R^{2d}: x_i >= 0, x_i log x_i <= v_i and
/// sum v_i <= 1.
class EntropicBallExtendedBody final : public ConvexBody {
 public:
  explicit EntropicBallExtendedBody(Eigen::Index base_dim);

  Eigen::Index dim() const override { return 2 * base_dim_; }
  BodyKind kind() const override { return BodyKind::EntropicBallExtended; }
  std::string describe() const override;
  bool contains(const Vec& y) const override;
  bool interior_contains(const Vec& y) const override;

  Eigen::Index base_dim() const { return base_dim_; }

 private:
  Eigen::Index base_dim_;
};

/// Cartesian product; coordinates are concatenated in list order.
class ProductBody final : public ConvexBody {
 public:
  explicit ProductBody(std::vector<BodyPtr> factors);

  Eigen::Index dim() const override { return dim_; }
  BodyKind kind() const override { return BodyKind::Product; }
  std::string describe() const override;
  bool contains(const Vec& x) const override;
  bool interior_contains(const Vec& x) const override;
  double exit_distance(const Vec& x, const Vec& u) const override;

  const std::vector<BodyPtr>& factors() const { return factors_; }

 private:
  std::vector<BodyPtr> factors_;
  Eigen::Index dim_ = 0;
};

/// Lifted domain for one quadratic term: {(x, t) : x in base, ||x - c||_D^2 <= t}.
class LiftedQuadraticBody final : public ConvexBody {
 public:
  LiftedQuadraticBody(BodyPtr base, Vec c, SpdMatrix d);

  Eigen::Index dim() const override { return base_->dim() + 1; }
  BodyKind kind() const override { return BodyKind::LiftedQuadratic; }
  std::string describe() const override;
  bool contains(const Vec& y) const override;
  bool interior_contains(const Vec& y) const override;

  const ConvexBody& base() const { return *base_; }
  const EpigraphQuadraticBody& epigraph() const { return epigraph_; }

 private:
  BodyPtr base_;
  EpigraphQuadraticBody epigraph_;
};

/// Box lo <= x <= hi as a polytope with rows e_i^T x <= hi_i then -e_i^T x <= -lo_i.
std::shared_ptr<const PolytopeBody> make_box(const Vec& lo, const Vec& hi);

/// Simplex {x in R^d_+ : 1^T x <= 1} with rows -e_i^T x <= 0, then 1^T x <= 1.
std::shared_ptr<const PolytopeBody> make_simplex(Eigen::Index d);

}  // namespace mapla
