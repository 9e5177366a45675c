#pragma once

#include <memory>
#include <optional>
#include <string>

#include "mapla/body.hpp"
#include "mapla/linalg.hpp"

namespace mapla {

/// (mu, lambda, beta) relative to a named metric: mu G <= Hess f <= lambda G
/// and ||grad f||_{G^-1} <= beta. Advisory only; the sampler never reads it.
struct CurvatureMetadata {
  std::optional<double> mu;
  std::optional<double> lambda;
  std::optional<double> beta;
  std::string metric;
};

/// Negative log-density f, up to a constant.
class Potential {
 public:
  virtual ~Potential() = default;

  virtual Eigen::Index dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  /// Defaults to central differences of gradient().
  virtual Mat hessian(const Vec& x) const;
  virtual std::optional<CurvatureMetadata> metadata() const { return std::nullopt; }
  virtual std::string name() const = 0;
};

using PotentialPtr = std::shared_ptr<const Potential>;

/// f(x) = -sum_i a_i log x_i - a_{d+1} log(1 - 1^T x) on the open simplex.
class DirichletPotential final : public Potential {
 public:
  /// `a` has d+1 entries, each > -1.
  explicit DirichletPotential(Vec a);

  Eigen::Index dim() const override { return a_.size() - 1; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Mat hessian(const Vec& x) const override;
  std::optional<CurvatureMetadata> metadata() const override;
  std::string name() const override { return "dirichlet"; }

  const Vec& concentration() const { return a_; }
  bool log_concave() const { return (a_.array() >= 0.0).all(); }

 private:
  Vec a_;
};

/// f(x) = sigma^T x.
class LinearPotential final : public Potential {
 public:
  explicit LinearPotential(Vec sigma);

  Eigen::Index dim() const override { return sigma_.size(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Mat hessian(const Vec& x) const override;
  std::optional<CurvatureMetadata> metadata() const override;
  std::string name() const override { return "linear"; }

 private:
  Vec sigma_;
};

/// Covariates X (n x d) with binary labels y.
struct BlrData {
  Mat x;
  Vec y;

  BlrData(Mat covariates, Vec labels);
  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }
};

/// f(theta) = -sum_i (y_i <theta, X_i> - log(1 + exp <theta, X_i>)).
class BlrPotential final : public Potential {
 public:
  explicit BlrPotential(BlrData data);

  Eigen::Index dim() const override { return data_.d(); }
  double value(const Vec& theta) const override;
  Vec gradient(const Vec& theta) const override;
  Mat hessian(const Vec& theta) const override;
  std::string name() const override { return "blr"; }

  const BlrData& data() const { return data_; }

 private:
  BlrData data_;
};

/// f(x) = scale * ||x - c||_D^2.
class QuadraticPotential final : public Potential {
 public:
  QuadraticPotential(Vec c, SpdMatrix d, double scale);

  Eigen::Index dim() const override { return c_.size(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Mat hessian(const Vec& x) const override;
  std::string name() const override { return "quadratic"; }

 private:
  Vec c_;
  SpdMatrix d_;
  double scale_;
};

/// log(1 + e^m) without overflow.
double softplus(double m);
/// 1 / (1 + e^-m) without overflow.
double logistic(double m);

PotentialPtr dirichlet_potential(const Vec& a);
PotentialPtr linear_potential(const Vec& sigma);
PotentialPtr zero_potential(Eigen::Index d);
PotentialPtr blr_potential(BlrData data);
PotentialPtr quadratic_potential(const Vec& c, const SpdMatrix& d, double scale);

}  // namespace mapla
