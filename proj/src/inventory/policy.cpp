#include "chainsim/inventory/policy.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "chainsim/inventory/errors.hpp"

namespace chainsim::inventory {

double lead_time_demand(std::span<const double> forecasts) {
  return std::accumulate(forecasts.begin(), forecasts.end(), 0.0);
}

double lead_time_demand(double phi, double lead_time) { return phi * lead_time; }

double safety_stock(std::span<const double> history, std::size_t window, double k, double sigma_lt,
                    double lead_time) {
  if (history.size() != window || window == 0) {
    throw InventoryError(InventoryErrc::InsufficientHistory,
                         "safety stock needs " + std::to_string(window) + " days, got " +
                             std::to_string(history.size()));
  }
  const double n = static_cast<double>(history.size());
  const double mean = std::accumulate(history.begin(), history.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : history) ss += (x - mean) * (x - mean);
  const double var = history.size() > 1 ? ss / (n - 1.0) : 0.0;
  return k * std::sqrt(lead_time * var + mean * mean * sigma_lt * sigma_lt);
}

double reorder_level(double lead_time, double review_demand, double review_period, double safety_stock) {
  if (review_period < 1.0) throw std::invalid_argument("review period must be at least one day");
  return lead_time * review_demand / review_period + safety_stock;
}

std::int64_t order_quantity(double target, double position) {
  const double gap = target - position;
  if (!(gap > 0.0)) return 0;
  // Guard against 170.0000000001 turning into 171.
  const double rounded = std::round(gap);
  if (std::abs(gap - rounded) < 1e-9) return static_cast<std::int64_t>(rounded);
  return static_cast<std::int64_t>(std::ceil(gap));
}

int optimize_review_period(std::span<const double> forecasts, double poe_cost, double storage_rate) {
  if (forecasts.empty()) throw std::invalid_argument("empty forecast horizon");
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  double demand = 0.0, holding = 0.0;
  for (std::size_t j = 0; j < forecasts.size(); ++j) {
    demand += forecasts[j];
    holding += static_cast<double>(j) * forecasts[j];
    if (demand <= 0.0) continue;
    const double ic = (poe_cost + storage_rate * holding) / demand;
    if (ic < best_cost) {
      best_cost = ic;
      best = static_cast<int>(j) + 1;
    }
  }
  if (best == 0) throw InventoryError(InventoryErrc::ZeroDemand, "all forecasts are zero");
  return best;
}

}  // namespace chainsim::inventory
