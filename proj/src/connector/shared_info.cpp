#include "chainsim/connector/shared_info.hpp"

#include "chainsim/connector/canonical_json.hpp"

namespace chainsim::connector {

using nlohmann::json;

json verification_to_json(const TransactionVerification& v) {
  return json{{"block_index", v.block_index}, {"tx_hash", ledger::to_hex(v.tx_hash)},
              {"info_id", v.info_id},         {"submitted_at", v.submitted_at},
              {"mined_at", v.mined_at},       {"gas_used", v.gas_used},
              {"fee_paid", v.fee_paid}};
}

TransactionVerification verification_from_json(const json& j) {
  TransactionVerification v;
  v.block_index = j.at("block_index").get<std::uint64_t>();
  v.tx_hash = ledger::digest_from_hex(j.at("tx_hash").get<std::string>());
  v.info_id = j.at("info_id").get<std::uint64_t>();
  v.submitted_at = j.at("submitted_at").get<double>();
  v.mined_at = j.at("mined_at").get<double>();
  v.gas_used = j.at("gas_used").get<std::uint64_t>();
  v.fee_paid = j.at("fee_paid").get<double>();
  return v;
}

json shared_info_to_json(const SharedInfo& info, PayloadForm form) {
  json payload = form == PayloadForm::Raw ? json(info.payload) : json::parse(info.payload);
  return json{{"info_id", info.info_id},
              {"owner", info.owner},
              {"payload", std::move(payload)},
              {"reference_date", format_iso_date(info.reference_date)},
              {"visibility", std::vector<std::string>(info.visibility.begin(), info.visibility.end())},
              {"hash_sum", ledger::to_hex(info.hash_sum)},
              {"verification", verification_to_json(info.verification)}};
}

SharedInfo shared_info_from_json(const json& j) {
  SharedInfo info;
  info.info_id = j.at("info_id").get<std::uint64_t>();
  info.owner = j.at("owner").get<std::string>();
  const json& payload = j.at("payload");
  info.payload = payload.is_string() ? payload.get<std::string>() : canonicalize_payload(payload);
  info.reference_date = parse_iso_date(j.at("reference_date").get<std::string>());
  for (const auto& v : j.at("visibility")) info.visibility.insert(v.get<std::string>());
  info.hash_sum = ledger::digest_from_hex(j.at("hash_sum").get<std::string>());
  info.verification = verification_from_json(j.at("verification"));
  return info;
}

}  // namespace chainsim::connector
