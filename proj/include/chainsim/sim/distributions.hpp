#pragma once

#include <cstdint>

#include "chainsim/rng.hpp"

namespace chainsim::sim {

/// Exponential with the given mean, redrawn until it lands in [lo, hi].
double draw_interarrival(RngStream& rng, double mean, double lo, double hi);
/// Closed-form mean of the exponential truncated to [lo, hi].
double truncated_exponential_mean(double mean, double lo, double hi);

/// Triangular(lo, mode, hi) by inverse CDF, rounded to the nearest integer.
std::int64_t draw_quantity(RngStream& rng, double lo, double mode, double hi);

/// Share of a manufacturer order that actually ships, uniform in [lo, hi].
double draw_fulfilment_fraction(RngStream& rng, double lo, double hi);

}  // namespace chainsim::sim
