#include "chainsim/inventory/costs.hpp"

#include "chainsim/inventory/errors.hpp"

namespace chainsim::inventory {

double fill_rate(const FillRateCounter& c) {
  if (c.total == 0) throw InventoryError(InventoryErrc::NoOrders, "fill rate undefined without orders");
  return static_cast<double>(c.fully_satisfied) / static_cast<double>(c.total);
}

double total_inventory_cost(double poe_cost, std::uint64_t orders_emitted, double storage_rate,
                            double on_hand_integral, double purchase_spend) {
  return poe_cost * static_cast<double>(orders_emitted) + storage_rate * on_hand_integral + purchase_spend;
}

}  // namespace chainsim::inventory
