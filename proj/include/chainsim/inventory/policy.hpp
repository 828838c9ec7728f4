#pragma once

#include <cstdint>
#include <span>

namespace chainsim::inventory {

/// Sum of the daily forecasts over the lead-time horizon.
double lead_time_demand(std::span<const double> forecasts);
/// Flat-forecast shortcut: lt x phi.
double lead_time_demand(double phi, double lead_time);

/// k * sqrt(lt * var_d + mean_d^2 * sigma_lt^2) over exactly `window` daily
/// observations, using the sample (n-1) variance.
double safety_stock(std::span<const double> history, std::size_t window, double k, double sigma_lt,
                    double lead_time);

inline double inventory_position(double on_hand, double on_order, double to_ship) {
  return on_hand + on_order + to_ship;
}

/// lt * tau / rho + ss, tau being the forecast demand over the review period.
double reorder_level(double lead_time, double review_demand, double review_period, double safety_stock);

inline double target_level(double lot_demand, double reorder) { return lot_demand + reorder; }

inline bool should_order(double position, double reorder) { return position < reorder; }

/// max(0, target - position), rounded up to whole items.
std::int64_t order_quantity(double target, double position);

/// Review period in 1..T minimizing the unit ordering-plus-holding cost
///   ic(r) = (poe + st * sum_{j<=r} (j-1) phi_j) / sum_{j<=r} phi_j.
/// Ties go to the shorter period.
int optimize_review_period(std::span<const double> forecasts, double poe_cost, double storage_rate);

}  // namespace chainsim::inventory
