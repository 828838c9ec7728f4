#include "chainsim/ledger/gas.hpp"

#include <stdexcept>

namespace chainsim::ledger {

GasTier parse_gas_tier(std::string_view name) {
  if (name == "min") return GasTier::Min;
  if (name == "avg") return GasTier::Avg;
  if (name == "max") return GasTier::Max;
  throw std::invalid_argument("unknown gas tier: " + std::string(name));
}

std::string_view to_string(GasTier tier) {
  switch (tier) {
    case GasTier::Min: return "min";
    case GasTier::Avg: return "avg";
    case GasTier::Max: return "max";
  }
  return "avg";
}

double GasPricing::per_tx_eur(GasTier tier) const {
  switch (tier) {
    case GasTier::Min: return min_eur;
    case GasTier::Avg: return avg_eur;
    case GasTier::Max: return max_eur;
  }
  return avg_eur;
}

double GasPricing::gas_price(GasTier tier) const {
  return per_tx_eur(tier) / (static_cast<double>(kPostSharedInfoGas) * ether_eur);
}

}  // namespace chainsim::ledger
