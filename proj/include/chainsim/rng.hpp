#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace chainsim {

// Stream purposes. Keys never change meaning, so seeds derived from them stay
// stable across releases.
enum class StreamPurpose : std::uint64_t {
  CustomerArrival = 1,
  CustomerQuantity = 2,
  ManufacturerFraction = 3,
  PendingTime = 4,
  Prices = 5,
  Keys = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Folds a master seed and a key path into a stream seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

/// Named random stream. Transforms are implemented here rather than with
/// <random> distributions, whose output is implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double standard_normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace chainsim
