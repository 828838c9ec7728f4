#include "chainsim/ledger/pending_time.hpp"

#include <cmath>
#include <stdexcept>

namespace chainsim::ledger {

double PendingTimeModel::sample(RngStream& rng) const {
  if (!(lo <= hi)) throw std::invalid_argument("pending time bounds inverted");
  if (lo == hi) return lo;
  for (;;) {
    const double draw = std::exp(mu + sigma * rng.standard_normal());
    if (draw >= lo && draw <= hi) return draw;
  }
}

}  // namespace chainsim::ledger
