#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace chainsim::sim {

/// Splits scarce stock over competing orders in proportion to the ordered
/// quantity: floors first, then one unit at a time to the largest remainders
/// (earlier orders win ties). Orders are given in ascending id order.
std::vector<std::int64_t> allocate_shortage(std::int64_t available, std::span<const std::int64_t> ordered);

struct SupplierQuote {
  std::int64_t available = 0;
  double lead_time = 0.0;
};

/// Shortest lead time among suppliers that can cover q in full; otherwise the
/// one with the most stock. Ties go to the lowest index. Empty input gives
/// nullopt.
std::optional<std::size_t> choose_supplier(std::span<const SupplierQuote> quotes, std::int64_t q);

}  // namespace chainsim::sim
