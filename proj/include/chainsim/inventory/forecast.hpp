#pragma once

#include <cstddef>
#include <vector>

namespace chainsim::inventory {

/// Single exponential smoothing with a mean-of-window start.
///
/// Until `window` observations have arrived the forecast is their running
/// mean (or the seed when there are none); afterwards each observation is
/// blended in with weight alpha.
class ForecastState {
 public:
  /// window == 0 starts the recursion immediately from seed_phi.
  ForecastState(double alpha, std::size_t window, double seed_phi = 0.0);

  double update(double observation);

  double phi() const { return phi_; }
  double alpha() const { return alpha_; }
  std::size_t window() const { return window_; }
  bool initialized() const { return history_.size() >= window_; }
  const std::vector<double>& history() const { return history_; }

 private:
  double alpha_;
  std::size_t window_;
  std::vector<double> history_;
  double phi_;
};

}  // namespace chainsim::inventory
