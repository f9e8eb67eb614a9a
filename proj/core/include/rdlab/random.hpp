#pragma once

#include <cstdint>
#include <string_view>

#include "rdlab/fields.hpp"

namespace rdlab {

/// Counter-based generator: the i-th draw is a pure function of
/// (seed, stream name, i), so ensemble members can be generated in any order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::string_view stream);

  /// Independent generator for ensemble member `index` of this stream.
  CounterRng substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller (no cached second value).
  double normal();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  CounterRng(std::uint64_t key, std::uint64_t counter, int) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

/// Random field with Gaussian sine coefficients decaying like |k|^-decay,
/// rescaled to the requested L2 norm. Modes above max_mode are left at zero.
Field random_field(const BoxDomain& domain, CounterRng& rng, double l2_norm,
                   double decay = 1.0, int max_mode = 16);

}  // namespace rdlab
