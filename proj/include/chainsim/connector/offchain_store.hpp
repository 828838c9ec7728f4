#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "chainsim/connector/shared_info.hpp"

namespace chainsim::connector {

inline constexpr int kStoreSchemaVersion = 1;

/// Off-chain payload store, indexed by id, owner and reference date.
///
/// With a backing file every put appends one JSON line; a torn trailing line
/// from an interrupted write is ignored on load.
class OffChainStore {
 public:
  OffChainStore() = default;
  explicit OffChainStore(std::filesystem::path file);

  /// Inserts or replaces the record with the same info_id.
  void put(const SharedInfo& info);
  std::optional<SharedInfo> get(std::uint64_t info_id) const;
  /// Matches every provided filter field; ordered by (reference_date, info_id).
  std::vector<SharedInfo> search(const SearchFilter& filter) const;
  std::size_t size() const { return records_.size(); }

 private:
  using DayKey = std::chrono::sys_days::rep;

  void index(const SharedInfo& info);
  void unindex(const SharedInfo& info);
  void append_line(const SharedInfo& info);

  std::map<std::uint64_t, SharedInfo> records_;
  std::multimap<std::string, std::uint64_t> by_owner_;
  std::set<std::pair<DayKey, std::uint64_t>> by_date_;
  std::optional<std::filesystem::path> file_;
};

}  // namespace chainsim::connector
