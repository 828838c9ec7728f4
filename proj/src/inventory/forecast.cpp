#include "chainsim/inventory/forecast.hpp"

#include <numeric>

#include "chainsim/inventory/errors.hpp"

namespace chainsim::inventory {

ForecastState::ForecastState(double alpha, std::size_t window, double seed_phi)
    : alpha_(alpha), window_(window), phi_(seed_phi) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  history_.reserve(window);
}

double ForecastState::update(double observation) {
  if (observation < 0.0) throw InventoryError(InventoryErrc::NegativeObservation, "negative demand observation");
  if (history_.size() < window_) {
    history_.push_back(observation);
    phi_ = std::accumulate(history_.begin(), history_.end(), 0.0) / static_cast<double>(history_.size());
  } else {
    phi_ = alpha_ * observation + (1.0 - alpha_) * phi_;
  }
  return phi_;
}

}  // namespace chainsim::inventory
