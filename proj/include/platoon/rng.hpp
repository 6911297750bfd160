#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace platoon {

/// Seeded random stream used by every stochastic component.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Seeds are expanded through SplitMix64 and all distributions are
/// implemented here rather than taken from <random>, whose distribution
/// algorithms are implementation-defined. Together this makes a (seed, stream)
/// pair produce the same draws on every platform and standard library.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/splitmix64-v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi);
  bool bernoulli(double p);
  /// Exponential with the given rate; +inf when rate is 0.
  double exponential(double rate);
  /// Unbiased integer on [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace platoon
