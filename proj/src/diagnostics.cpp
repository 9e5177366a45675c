#include "mapla/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mapla/errors.hpp"

namespace mapla {

namespace {

void require_nonempty(const Mat& m, const char* what) {
  if (m.rows() == 0) throw EmptyBatch(std::string(what) + ": empty batch");
}

double mean_cross_distance(const Mat& x, const Mat& y) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < y.rows(); ++j) {
    total += (x.rowwise() - y.row(j)).rowwise().norm().sum();
  }
  return total / (static_cast<double>(x.rows()) * static_cast<double>(y.rows()));
}

}  // namespace

double mean_self_distance(const Mat& x) {
  require_nonempty(x, "mean_self_distance");
  // Upper triangle only, doubled; the diagonal is zero.
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.rows(); ++i) {
    const Eigen::Index rest = x.rows() - i - 1;
    total += (x.bottomRows(rest).rowwise() - x.row(i)).rowwise().norm().sum();
  }
  const double n = static_cast<double>(x.rows());
  return 2.0 * total / (n * n);
}

double energy_distance(const Mat& x, const Mat& y) {
  require_nonempty(x, "energy_distance");
  require_nonempty(y, "energy_distance");
  if (x.cols() != y.cols()) throw DimensionMismatch("energy_distance: column counts differ");
  return 2.0 * mean_cross_distance(x, y) - mean_self_distance(x) - mean_self_distance(y);
}

EnergyReference::EnergyReference(Mat y) : y_(std::move(y)), self_(mean_self_distance(y_)) {}

double EnergyReference::distance_to(const Mat& x) const {
  require_nonempty(x, "energy_distance");
  if (x.cols() != y_.cols()) throw DimensionMismatch("energy_distance: column counts differ");
  return 2.0 * mean_cross_distance(x, y_) - mean_self_distance(x) - self_;
}

// ---------------------------------------------------------------------------

namespace {

// Column-major cost; f has one entry per row of C, g per column.
// f_i = eps log a - eps LSE_j ((g_j - C_ij) / eps)
void update_f(const Mat& c, const Vec& g, double eps, double log_a, Vec& f) {
  const Eigen::Index n = c.rows();
  Vec mx = Vec::Constant(n, -std::numeric_limits<double>::infinity());
  for (Eigen::Index j = 0; j < c.cols(); ++j) mx = mx.cwiseMax((g(j) - c.col(j).array()).matrix());
  Vec acc = Vec::Zero(n);
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const Eigen::ArrayXd t = (g(j) - c.col(j).array() - mx.array()) / eps;
    acc.array() += (t > -200.0).select(t.exp(), 0.0);
  }
  f = (eps * log_a - mx.array() - eps * acc.array().log()).matrix();
}

// g_j = eps log b - eps LSE_i ((f_i - C_ij) / eps)
void update_g(const Mat& c, const Vec& f, double eps, double log_b, Vec& g) {
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const Eigen::ArrayXd t = f.array() - c.col(j).array();
    const double m = t.maxCoeff();
    const Eigen::ArrayXd e = (t - m) / eps;
    g(j) = eps * log_b - m - eps * std::log((e > -200.0).select(e.exp(), 0.0).sum());
  }
}

// Stabilized kernel exp((f_i + g_j - C_ij) / eps); the scalings u, v
// multiply it between absorptions. Entries below e^-200 are dropped: they
// cannot matter at any sane tolerance, and left in they turn into
// subnormals that slow the mat-vecs down by two orders of magnitude.
Mat stabilized_kernel(const Mat& c, const Vec& f, const Vec& g, double eps) {
  Mat k(c.rows(), c.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const Eigen::ArrayXd t = (f.array() + g(j) - c.col(j).array()) / eps;
    k.col(j) = (t > -200.0).select(t.exp(), 0.0).matrix();
  }
  return k;
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

}  // namespace

SinkhornResult sinkhorn_w2sq(const Mat& x, const Mat& y, const SinkhornOptions& opts) {
  require_nonempty(x, "sinkhorn_w2sq");
  require_nonempty(y, "sinkhorn_w2sq");
  if (x.cols() != y.cols()) throw DimensionMismatch("sinkhorn_w2sq: column counts differ");
  if (!(opts.reg > 0.0)) throw std::invalid_argument("sinkhorn_w2sq: reg must be positive");

  const Eigen::Index n = x.rows();
  const Eigen::Index m = y.rows();
  Mat cost(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    cost.col(j) = (x.rowwise() - y.row(j)).rowwise().squaredNorm();
  }

  SinkhornResult res;
  if (opts.normalize_cost) {
    const double med = median(std::vector<double>(cost.data(), cost.data() + cost.size()));
    res.cost_scale = med > 0.0 ? med : 1.0;
  }
  const Mat c = cost / res.cost_scale;

  const double a = 1.0 / static_cast<double>(n);
  const double b = 1.0 / static_cast<double>(m);
  const double log_a = std::log(a);
  const double log_b = std::log(b);
  Vec f = Vec::Zero(n);
  Vec g = Vec::Zero(m);

  // eps-scaling: halve from max(1, reg) down to reg, a few log-domain
  // sweeps each. These are slow but never underflow.
  double eps = std::max(1.0, opts.reg);
  while (eps > opts.reg) {
    for (int k = 0; k < 10; ++k) {
      update_f(c, g, eps, log_a, f);
      update_g(c, f, eps, log_b, g);
    }
    eps = std::max(opts.reg, 0.5 * eps);
  }
  eps = opts.reg;
  update_f(c, g, eps, log_a, f);
  update_g(c, f, eps, log_b, g);

  // Scaling-domain iterations on the stabilized kernel: two dense
  // mat-vecs per sweep. Scalings are folded back into (f, g) whenever they
  // drift far from 1, or a kernel row/column sum underflows.
  constexpr double kAbsorb = 1e30;
  Mat kern = stabilized_kernel(c, f, g, eps);
  Vec u = Vec::Ones(n);
  Vec v = Vec::Ones(m);
  auto absorb = [&] {
    f.array() += eps * u.array().log();
    g.array() += eps * v.array().log();
    u.setOnes();
    v.setOnes();
    kern = stabilized_kernel(c, f, g, eps);
  };
  for (res.iterations = 1; res.iterations <= opts.max_iter; ++res.iterations) {
    Vec kv = kern * v;
    if (!(kv.minCoeff() > 0.0)) {
      // Underflow: redo this half-step in the log domain.
      absorb();
      update_f(c, g, eps, log_a, f);
      update_g(c, f, eps, log_b, g);
      kern = stabilized_kernel(c, f, g, eps);
      continue;
    }
    u = (a / kv.array()).matrix();
    Vec ku = kern.transpose() * u;
    if (!(ku.minCoeff() > 0.0)) {
      absorb();
      update_g(c, f, eps, log_b, g);
      kern = stabilized_kernel(c, f, g, eps);
      continue;
    }
    v = (b / ku.array()).matrix();
    if (u.maxCoeff() > kAbsorb || v.maxCoeff() > kAbsorb || u.minCoeff() < 1 / kAbsorb ||
        v.minCoeff() < 1 / kAbsorb) {
      absorb();
    }
    if (res.iterations % 10 == 0 || res.iterations == opts.max_iter) {
      // Columns are exact after the v update; rows carry the violation.
      res.marginal_error = (u.array() * (kern * v).array() - a).abs().maxCoeff();
      if (res.marginal_error <= opts.tol) {
        res.converged = true;
        break;
      }
    }
  }
  if (!res.converged) res.iterations = opts.max_iter;

  double total = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    total += v(j) * (u.array() * kern.col(j).array() * cost.col(j).array()).sum();
  }
  res.value = total;
  return res;
}

// ---------------------------------------------------------------------------

const char* measure_name(Measure m) { return m == Measure::ED ? "ED" : "W2sq"; }

void DistanceSeries::push(long iteration, double value) {
  if (!iterations.empty() && iteration <= iterations.back()) {
    throw std::invalid_argument("DistanceSeries: iterations must increase");
  }
  iterations.push_back(iteration);
  values.push_back(value);
}

std::optional<long> empirical_mixing_time(const DistanceSeries& series, double delta) {
  if (series.iterations.empty()) throw EmptyBatch("empirical_mixing_time: empty series");
  for (std::size_t i = 0; i < series.iterations.size(); ++i) {
    if (series.iterations[i] >= 1 && series.values[i] <= delta) return series.iterations[i];
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

double acceptance_rate(const SampleBatch& at_burn_in, const SampleBatch& final_batch) {
  if (at_burn_in.per_chain.size() != final_batch.per_chain.size()) {
    throw DimensionMismatch("acceptance_rate: chain counts differ");
  }
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < final_batch.per_chain.size(); ++i) {
    const Tallies& a = at_burn_in.per_chain[i];
    const Tallies& b = final_batch.per_chain[i];
    const long proposals = b.proposals() - a.proposals();
    if (proposals <= 0) continue;
    sum += static_cast<double>(b.accepted - a.accepted) / static_cast<double>(proposals);
    ++counted;
  }
  if (counted == 0) throw EmptyBatch("acceptance_rate: no proposals after burn-in");
  return sum / static_cast<double>(counted);
}

double acceptance_rate(const std::vector<SampleBatch>& batches, long burn_in) {
  if (batches.empty()) throw EmptyBatch("acceptance_rate: no batches");
  if (burn_in >= batches.back().iteration) {
    throw std::invalid_argument("acceptance_rate: burn-in must be shorter than the run");
  }
  const SampleBatch* start = &batches.front();
  for (const auto& b : batches) {
    if (b.iteration <= burn_in) start = &b;
  }
  return acceptance_rate(*start, batches.back());
}

// ---------------------------------------------------------------------------

BlrMeasures blr_measures(const Mat& batch, const Vec& theta_star, const BlrPotential& potential) {
  require_nonempty(batch, "blr_measures");
  if (batch.cols() != theta_star.size()) throw DimensionMismatch("blr_measures: dimension");
  const Vec mean = batch.colwise().mean().transpose();
  const double d = static_cast<double>(theta_star.size());
  const double n = static_cast<double>(potential.data().n());
  return BlrMeasures{(mean - theta_star).lpNorm<1>() / d, potential.value(mean) / n};
}

double nearest_rank_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw EmptyBatch("nearest_rank_quantile: no values");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("nearest_rank_quantile: p in (0, 1]");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   values.end());
  return values[rank - 1];
}

Quartiles diff_quantiles(const Mat& batch, const Vec& theta_star) {
  require_nonempty(batch, "diff_quantiles");
  if (batch.cols() != theta_star.size()) throw DimensionMismatch("diff_quantiles: dimension");
  const double d = static_cast<double>(theta_star.size());
  std::vector<double> diffs(static_cast<std::size_t>(batch.rows()));
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    diffs[static_cast<std::size_t>(i)] = (batch.row(i).transpose() - theta_star).sum() / d;
  }
  return Quartiles{nearest_rank_quantile(diffs, 0.25), nearest_rank_quantile(diffs, 0.75)};
}

// ---------------------------------------------------------------------------

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw EmptyBatch("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double fx = cdf(samples[i]);
    sup = std::max({sup, static_cast<double>(i + 1) / n - fx, fx - static_cast<double>(i) / n});
  }
  return sup;
}

Mat dirichlet_reference_sample(const Vec& a, std::size_t n, RngStream& rng) {
  if (a.size() < 2) throw std::invalid_argument("dirichlet_reference_sample: need d + 1 >= 2 weights");
  if ((a.array() <= -1.0).any()) throw std::invalid_argument("dirichlet_reference_sample: a_i > -1");
  const Eigen::Index k = a.size();
  Mat out(static_cast<Eigen::Index>(n), k - 1);
  Vec g(k);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index i = 0; i < k; ++i) g(i) = rng.gamma(a(i) + 1.0);
    out.row(r) = (g.head(k - 1) / g.sum()).transpose();
  }
  return out;
}

}  // namespace mapla
