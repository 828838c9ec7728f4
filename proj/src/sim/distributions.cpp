#include "chainsim/sim/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace chainsim::sim {

double draw_interarrival(RngStream& rng, double mean, double lo, double hi) {
  if (!(lo <= hi) || mean <= 0.0) throw std::invalid_argument("bad interarrival parameters");
  if (lo == hi) return lo;
  for (;;) {
    // 1 - u lies in (0, 1], so the log is finite.
    const double x = -mean * std::log(1.0 - rng.uniform01());
    if (x >= lo && x <= hi) return x;
  }
}

double truncated_exponential_mean(double mean, double lo, double hi) {
  if (lo == hi) return lo;
  const double ea = std::exp(-lo / mean), eb = std::exp(-hi / mean);
  return mean + (lo * ea - hi * eb) / (ea - eb);
}

std::int64_t draw_quantity(RngStream& rng, double lo, double mode, double hi) {
  if (!(lo <= mode && mode <= hi)) throw std::invalid_argument("bad triangular parameters");
  if (lo == hi) return std::llround(lo);
  const double u = rng.uniform01();
  const double split = (mode - lo) / (hi - lo);
  const double x = u < split ? lo + std::sqrt(u * (hi - lo) * (mode - lo))
                             : hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
  return std::llround(x);
}

double draw_fulfilment_fraction(RngStream& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return rng.uniform(lo, hi);
}

}  // namespace chainsim::sim
