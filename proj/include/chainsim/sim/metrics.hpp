#pragma once

#include <cstdint>
#include <vector>

#include "chainsim/inventory/costs.hpp"

namespace chainsim::sim {

/// Running accumulators for one node, summed over items.
struct NodeMetrics {
  double revenue = 0;
  double missing_revenue = 0;
  double on_hand_integral = 0;  // item-days
  double purchase_spend = 0;
  double position_sum = 0;      // end-of-day inventory position, summed over days and items
  std::uint64_t position_samples = 0;
  std::uint64_t orders_emitted = 0;
  inventory::FillRateCounter fill;
  std::uint64_t tx_count = 0;
  double pending_time = 0;      // seconds, summed over this node's posts

  friend bool operator==(const NodeMetrics&, const NodeMetrics&) = default;
};

struct MetricsSnapshot {
  int day = 0;
  std::vector<NodeMetrics> nodes;

  friend bool operator==(const MetricsSnapshot&, const MetricsSnapshot&) = default;
};

}  // namespace chainsim::sim
