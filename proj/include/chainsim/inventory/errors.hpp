#pragma once

#include <stdexcept>
#include <string>

namespace chainsim::inventory {

enum class InventoryErrc { NegativeObservation, InsufficientHistory, ZeroDemand, NoOrders };

class InventoryError : public std::domain_error {
 public:
  InventoryError(InventoryErrc code, const std::string& what) : std::domain_error(what), code_(code) {}
  InventoryErrc code() const noexcept { return code_; }

 private:
  InventoryErrc code_;
};

}  // namespace chainsim::inventory
