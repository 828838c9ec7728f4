#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "chainsim/ledger/ledger.hpp"

namespace chainsim::ledger {

// Chain snapshot: a JSON array of blocks with lowercase hex digests.
//   {"block_index", "prev_hash", "timestamp", "txs": [...], "block_hash"}

nlohmann::json transaction_to_json(const SignedTransaction& tx);
SignedTransaction transaction_from_json(const nlohmann::json& j);

nlohmann::json blocks_to_json(const std::deque<Block>& blocks);
std::vector<Block> blocks_from_json(const nlohmann::json& j);

/// Writes to a sibling temp file and renames it over the target.
void save_snapshot(const Ledger& ledger, const std::filesystem::path& path);
std::vector<Block> load_snapshot(const std::filesystem::path& path);

}  // namespace chainsim::ledger
