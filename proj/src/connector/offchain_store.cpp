#include "chainsim/connector/offchain_store.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace chainsim::connector {

using nlohmann::json;

namespace {

std::chrono::sys_days::rep day_key(const Date& d) {
  return std::chrono::sys_days{d}.time_since_epoch().count();
}

}  // namespace

OffChainStore::OffChainStore(std::filesystem::path file) : file_(std::move(file)) {
  std::ifstream in(*file_);
  if (!in) return;  // fresh store
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;  // torn write
    if (!header_seen) {
      if (j.value("schema", "") != "offchain-store" || j.value("version", 0) != kStoreSchemaVersion) {
        throw std::runtime_error("unsupported off-chain store schema in " + file_->string());
      }
      header_seen = true;
      continue;
    }
    SharedInfo info = shared_info_from_json(j);
    if (auto it = records_.find(info.info_id); it != records_.end()) {
      unindex(it->second);
      records_.erase(it);
    }
    index(info);
    records_.emplace(info.info_id, std::move(info));
  }
}

void OffChainStore::put(const SharedInfo& info) {
  if (auto it = records_.find(info.info_id); it != records_.end()) {
    unindex(it->second);
    records_.erase(it);
  }
  index(info);
  records_.emplace(info.info_id, info);
  if (file_) append_line(info);
}

std::optional<SharedInfo> OffChainStore::get(std::uint64_t info_id) const {
  auto it = records_.find(info_id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<SharedInfo> OffChainStore::search(const SearchFilter& filter) const {
  const auto in_range = [&](const SharedInfo& info) {
    if (filter.date_from && info.reference_date < *filter.date_from) return false;
    if (filter.date_to && info.reference_date > *filter.date_to) return false;
    return true;
  };
  std::vector<SharedInfo> out;
  if (filter.owner) {
    auto [first, last] = by_owner_.equal_range(*filter.owner);
    for (auto it = first; it != last; ++it) {
      const SharedInfo& info = records_.at(it->second);
      if (in_range(info)) out.push_back(info);
    }
    std::sort(out.begin(), out.end(), [](const SharedInfo& a, const SharedInfo& b) {
      return std::pair{std::chrono::sys_days{a.reference_date}, a.info_id} <
             std::pair{std::chrono::sys_days{b.reference_date}, b.info_id};
    });
    return out;
  }
  auto it = filter.date_from ? by_date_.lower_bound({day_key(*filter.date_from), 0}) : by_date_.begin();
  for (; it != by_date_.end(); ++it) {
    if (filter.date_to && it->first > day_key(*filter.date_to)) break;
    out.push_back(records_.at(it->second));
  }
  return out;
}

void OffChainStore::index(const SharedInfo& info) {
  by_owner_.emplace(info.owner, info.info_id);
  by_date_.emplace(day_key(info.reference_date), info.info_id);
}

void OffChainStore::unindex(const SharedInfo& info) {
  auto [first, last] = by_owner_.equal_range(info.owner);
  for (auto it = first; it != last; ++it) {
    if (it->second == info.info_id) {
      by_owner_.erase(it);
      break;
    }
  }
  by_date_.erase({day_key(info.reference_date), info.info_id});
}

void OffChainStore::append_line(const SharedInfo& info) {
  const bool fresh = !std::filesystem::exists(*file_) || std::filesystem::file_size(*file_) == 0;
  std::ofstream out(*file_, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + file_->string());
  if (fresh) out << json{{"schema", "offchain-store"}, {"version", kStoreSchemaVersion}}.dump() << '\n';
  out << shared_info_to_json(info, PayloadForm::Raw).dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + file_->string());
}

}  // namespace chainsim::connector
