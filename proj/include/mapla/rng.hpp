#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>

namespace mapla {

/// Per-chain random stream.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Seeds for sub-streams are derived with the SplitMix64 finalizer
/// applied to (master seed, stream index), so chain i draws the same numbers
/// no matter how chains are scheduled across threads.
///
/// uniform(): top 53 bits of one engine output, scaled into [0, 1).
/// normal(): Box-Muller on two uniforms; the second variate is cached and
/// returned by the next call.
/// gamma(): Marsaglia-Tsang squeeze on top of normal()/uniform().
///
/// The library never calls std::normal_distribution or friends since their
/// algorithms are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Stream for substream `index` of `master_seed`.
  static RngStream derive(std::uint64_t master_seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double normal();
  double gamma(double shape);
  Eigen::VectorXd normal_vector(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mapla
