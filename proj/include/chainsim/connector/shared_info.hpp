#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "chainsim/date.hpp"
#include "chainsim/ledger/crypto.hpp"

namespace chainsim::connector {

struct TransactionVerification {
  std::uint64_t block_index = 0;
  ledger::Digest tx_hash{};
  std::uint64_t info_id = 0;
  double submitted_at = 0.0;
  double mined_at = 0.0;
  std::uint64_t gas_used = 0;
  double fee_paid = 0.0;  // Ether

  friend bool operator==(const TransactionVerification&, const TransactionVerification&) = default;
};

struct SharedInfo {
  std::uint64_t info_id = 0;
  std::string owner;    // address id
  std::string payload;  // canonical JSON bytes
  Date reference_date{};
  std::set<std::string> visibility;
  ledger::Digest hash_sum{};
  TransactionVerification verification;

  friend bool operator==(const SharedInfo&, const SharedInfo&) = default;
};

struct SearchFilter {
  std::optional<std::string> owner;
  std::optional<Date> date_from;
  std::optional<Date> date_to;
};

enum class PayloadForm {
  Raw,     // payload kept as the exact canonical string
  Object,  // payload re-parsed into a JSON value
};

nlohmann::json verification_to_json(const TransactionVerification& v);
TransactionVerification verification_from_json(const nlohmann::json& j);

nlohmann::json shared_info_to_json(const SharedInfo& info, PayloadForm form);
/// Accepts the payload either as a string (raw bytes) or as a JSON value,
/// which is canonicalized.
SharedInfo shared_info_from_json(const nlohmann::json& j);

}  // namespace chainsim::connector
