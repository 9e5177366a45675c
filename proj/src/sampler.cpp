#include "mapla/sampler.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "mapla/errors.hpp"

namespace mapla {

const char* algorithm_name(Algorithm alg) {
  return alg == Algorithm::Mapla ? "MAPLA" : "DikinWalk";
}

void SamplerConfig::validate() const {
  if (!metric || !potential) throw std::invalid_argument("sampler: metric and potential are required");
  if (!(step_size > 0.0)) throw std::invalid_argument("sampler: step size must be positive");
  if (metric->dim() != potential->dim()) {
    throw DimensionMismatch("sampler: metric and potential dimensions differ");
  }
  if (!(lazy_probability >= 0.0 && lazy_probability < 1.0)) {
    throw std::invalid_argument("sampler: lazy probability must lie in [0, 1)");
  }
}

Tallies& Tallies::operator+=(const Tallies& other) {
  accepted += other.accepted;
  rejected_mh += other.rejected_mh;
  rejected_outside += other.rejected_outside;
  rejected_factorization += other.rejected_factorization;
  held += other.held;
  return *this;
}

PointCache evaluate_point(const Metric& metric, const Potential& potential, const Vec& x,
                          Algorithm alg) {
  if (!metric.body()->interior_contains(x)) throw NotInterior("sampler: point is not interior");
  CholFactor factor = cholesky(metric.eval(x));
  const double f = potential.value(x);
  Vec v = alg == Algorithm::Mapla ? solve_spd(factor, potential.gradient(x)) : Vec::Zero(x.size());
  const double hl = log_diag_sum(factor);
  return PointCache{x, std::move(factor), std::move(v), hl, f};
}

Proposal propose_with_noise(const PointCache& at, double h, Vec xi) {
  Proposal p;
  p.xi_scaled = tri_solve(at.factor, xi, true);
  p.z = at.x - h * at.natural_grad + std::sqrt(2.0 * h) * p.xi_scaled;
  p.xi = std::move(xi);
  return p;
}

Proposal propose(ChainState& state, double h) {
  return propose_with_noise(state.cache, h, state.rng.normal_vector(state.cache.x.size()));
}

AcceptRatio log_accept_ratio(const PointCache& at, const Proposal& proposal, double h,
                             const Metric& metric, const Potential& potential, Algorithm alg) {
  PointCache zc = evaluate_point(metric, potential, proposal.z, alg);
  const double f_term = at.f - zc.f;
  const double logdet_term = zc.half_logdet - at.half_logdet;
  const Vec w = h * (zc.natural_grad + at.natural_grad) - std::sqrt(2.0 * h) * proposal.xi_scaled;
  const double forward = 2.0 * h * proposal.xi.squaredNorm();
  const double reverse = tri_multiply(zc.factor, w, true).squaredNorm();
  const double quad_term = (forward - reverse) / (4.0 * h);
  return AcceptRatio{(f_term + logdet_term) + quad_term, std::move(zc)};
}

StepRecord step(ChainState& state, const SamplerConfig& config) {
  StepRecord rec;
  if (config.lazy_probability > 0.0 && state.rng.uniform() < config.lazy_probability) {
    rec.z = state.cache.x;
    rec.outcome = StepOutcome::Held;
    ++state.tallies.held;
    return rec;
  }

  const double h = config.step_size;
  Proposal prop = propose(state, h);
  rec.z = prop.z;
  rec.log_ratio = std::numeric_limits<double>::quiet_NaN();

  if (!config.metric->body()->interior_contains(prop.z)) {
    rec.outcome = StepOutcome::RejectedOutsideK;
    ++state.tallies.rejected_outside;
    return rec;
  }

  std::optional<AcceptRatio> ratio;
  try {
    ratio = log_accept_ratio(state.cache, prop, h, *config.metric, *config.potential,
                             config.algorithm);
  } catch (const NotPositiveDefinite&) {
    rec.factorization_failure = true;
  } catch (const NotInterior&) {
    rec.factorization_failure = true;
  }
  if (!ratio) {
    rec.outcome = StepOutcome::RejectedOutsideK;
    ++state.tallies.rejected_outside;
    ++state.tallies.rejected_factorization;
    return rec;
  }

  rec.log_ratio = ratio->log_ratio;
  const double u = state.rng.uniform();
  const double accept_prob = std::exp(std::min(0.0, ratio->log_ratio));
  if (u <= accept_prob) {
    state.cache = std::move(ratio->z_cache);
    rec.outcome = StepOutcome::AcceptedMove;
    ++state.tallies.accepted;
  } else {
    rec.outcome = StepOutcome::RejectedByMH;
    ++state.tallies.rejected_mh;
  }
  return rec;
}

ChainState make_chain(const SamplerConfig& config, const Vec& x0, RngStream rng) {
  try {
    return ChainState{evaluate_point(*config.metric, *config.potential, x0, config.algorithm),
                      std::move(rng), Tallies{}};
  } catch (const NotInterior& e) {
    throw InitNotInterior(std::string("initial point rejected: ") + e.what());
  } catch (const NotPositiveDefinite& e) {
    throw InitNotInterior(std::string("initial point rejected: ") + e.what());
  }
}

InitialDistribution point_mass(Vec x0) {
  return [x0 = std::move(x0)](std::size_t, RngStream&) { return x0; };
}

InitialDistribution dikin_ball_uniform(MetricPtr metric, Vec x0, double radius) {
  CholFactor l = cholesky(metric->eval(x0));
  return [l = std::move(l), x0 = std::move(x0), radius](std::size_t, RngStream& rng) {
    const Eigen::Index d = x0.size();
    Vec u = rng.normal_vector(d);
    u /= u.norm();
    u *= std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    return Vec(x0 + radius * tri_solve(l, u, true));
  };
}

InitialDistribution from_points(Mat points) {
  return [points = std::move(points)](std::size_t index, RngStream&) {
    if (static_cast<Eigen::Index>(index) >= points.rows()) {
      throw InitNotInterior("from_points: fewer initial points than chains");
    }
    return Vec(points.row(static_cast<Eigen::Index>(index)).transpose());
  };
}

Tallies SampleBatch::tallies() const {
  Tallies total;
  for (const auto& t : per_chain) total += t;
  return total;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  pool.reserve(count);
  for (unsigned w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < n && !failed; i = next++) fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SampleBatch snapshot(long iteration, const std::vector<ChainState>& chains) {
  SampleBatch batch;
  batch.iteration = iteration;
  const Eigen::Index d = chains.front().cache.x.size();
  batch.points.resize(static_cast<Eigen::Index>(chains.size()), d);
  batch.per_chain.reserve(chains.size());
  for (std::size_t i = 0; i < chains.size(); ++i) {
    batch.points.row(static_cast<Eigen::Index>(i)) = chains[i].cache.x.transpose();
    batch.per_chain.push_back(chains[i].tallies);
  }
  return batch;
}

}  // namespace

void run_chains(const SamplerConfig& config, const RunOptions& opts, const InitialDistribution& init,
                const std::function<void(const SampleBatch&)>& observer) {
  config.validate();
  if (opts.n_chains == 0) throw std::invalid_argument("run_chains: need at least one chain");
  if (opts.n_iters < 0) throw std::invalid_argument("run_chains: iterations must be >= 0");
  if (opts.record_every < 1) throw std::invalid_argument("run_chains: record_every must be >= 1");

  std::vector<ChainState> chains;
  chains.reserve(opts.n_chains);
  for (std::size_t i = 0; i < opts.n_chains; ++i) {
    RngStream rng = RngStream::derive(config.master_seed, i);
    const Vec x0 = init(i, rng);
    chains.push_back(make_chain(config, x0, std::move(rng)));
  }
  observer(snapshot(0, chains));

  long done = 0;
  while (done < opts.n_iters) {
    const long target = std::min(opts.n_iters, done + opts.record_every);
    const long count = target - done;
    parallel_for(chains.size(), opts.workers, [&](std::size_t i) {
      for (long k = 0; k < count; ++k) step(chains[i], config);
    });
    done = target;
    observer(snapshot(done, chains));
  }
}

std::vector<SampleBatch> run_chains(const SamplerConfig& config, const RunOptions& opts,
                                    const InitialDistribution& init) {
  std::vector<SampleBatch> out;
  run_chains(config, opts, init, [&](const SampleBatch& b) { out.push_back(b); });
  return out;
}

}  // namespace mapla
