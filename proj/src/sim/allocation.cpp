#include "chainsim/sim/allocation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace chainsim::sim {

__extension__ using wide_int = __int128;

std::vector<std::int64_t> allocate_shortage(std::int64_t available, std::span<const std::int64_t> ordered) {
  if (available < 0) throw std::invalid_argument("negative availability");
  const std::int64_t total = std::accumulate(ordered.begin(), ordered.end(), std::int64_t{0});
  std::vector<std::int64_t> out(ordered.size(), 0);
  if (total <= available) {
    std::copy(ordered.begin(), ordered.end(), out.begin());
    return out;
  }
  // Remainders are compared as exact integers: available * q_i mod total.
  std::vector<std::int64_t> remainder(ordered.size());
  std::int64_t given = 0;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const wide_int share = static_cast<wide_int>(available) * ordered[i];
    out[i] = static_cast<std::int64_t>(share / total);
    remainder[i] = static_cast<std::int64_t>(share % total);
    given += out[i];
  }
  std::vector<std::size_t> order(ordered.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; given < available; ++i) {
    ++out[order[i]];
    ++given;
  }
  return out;
}

std::optional<std::size_t> choose_supplier(std::span<const SupplierQuote> quotes, std::int64_t q) {
  if (quotes.empty()) return std::nullopt;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < quotes.size(); ++i) {
    if (quotes[i].available < q) continue;
    if (!best || quotes[i].lead_time < quotes[*best].lead_time) best = i;
  }
  if (best) return best;
  std::size_t most = 0;
  for (std::size_t i = 1; i < quotes.size(); ++i) {
    if (quotes[i].available > quotes[most].available) most = i;
  }
  return most;
}

}  // namespace chainsim::sim
