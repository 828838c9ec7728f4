#pragma once

#include "chainsim/rng.hpp"

namespace chainsim::ledger {

/// Submission-to-inclusion latency: lognormal truncated to [lo, hi] seconds.
///
/// Defaults were moment-matched offline (tools/oracles/pending_time_params.py):
/// the truncated mean is 16.3 s and the untruncated 99.9th percentile sits
/// at the 146 s bound.
struct PendingTimeModel {
  double mu = 2.451584973593;
  double sigma = 0.819362881898;
  double lo = 2.0;
  double hi = 146.0;

  /// Rejection sampling; a collapsed interval returns lo without drawing.
  double sample(RngStream& rng) const;
};

}  // namespace chainsim::ledger
