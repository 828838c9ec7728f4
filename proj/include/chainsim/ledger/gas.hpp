#pragma once

#include <string>
#include <string_view>

#include "chainsim/ledger/types.hpp"

namespace chainsim::ledger {

enum class GasTier { Min, Avg, Max };

GasTier parse_gas_tier(std::string_view name);
std::string_view to_string(GasTier tier);

/// Fixed fiat cost per certification transaction for each historical price
/// tier, plus the Ether exchange rate used to turn them into gas prices.
struct GasPricing {
  double min_eur = 0.01;
  double avg_eur = 0.93;
  double max_eur = 19.40;
  // Chosen so the average tier corresponds to 5 gwei per gas.
  double ether_eur = 0.93 / (static_cast<double>(kPostSharedInfoGas) * 5e-9);

  double per_tx_eur(GasTier tier) const;
  /// Ether per gas unit such that a 190000-gas post costs per_tx_eur(tier).
  double gas_price(GasTier tier) const;
};

}  // namespace chainsim::ledger
