#include "chainsim/ledger/snapshot.hpp"

#include <fstream>
#include <stdexcept>

namespace chainsim::ledger {

using nlohmann::json;

json transaction_to_json(const SignedTransaction& tx) {
  json call;
  call["type"] = std::string(call_name(tx.call));
  if (const auto* v = std::get_if<Vote>(&tx.call)) {
    call["candidate"] = v->candidate;
    call["approve"] = v->approve;
  } else if (const auto* p = std::get_if<PostSharedInfo>(&tx.call)) {
    call["hash_sum"] = to_hex(p->hash_sum);
    call["reference_date"] = format_iso_date(p->reference_date);
    call["visibility"] = json(std::vector<std::string>(p->visibility.begin(), p->visibility.end()));
  }
  return json{{"sender", tx.sender.id},
              {"sender_public_key", to_hex(tx.sender.public_key)},
              {"nonce", tx.nonce},
              {"call", std::move(call)},
              {"gas_amount", tx.gas_amount},
              {"gas_price", tx.gas_price},
              {"signature", to_hex(tx.signature)}};
}

SignedTransaction transaction_from_json(const json& j) {
  SignedTransaction tx;
  tx.sender = Address::from_public_key(from_hex(j.at("sender_public_key").get<std::string>()));
  if (tx.sender.id != j.at("sender").get<std::string>()) {
    throw std::invalid_argument("sender id does not match public key");
  }
  tx.nonce = j.at("nonce").get<std::uint64_t>();
  const json& call = j.at("call");
  const auto type = call.at("type").get<std::string>();
  if (type == "request_authorization") {
    tx.call = RequestAuthorization{};
  } else if (type == "vote") {
    tx.call = Vote{call.at("candidate").get<std::string>(), call.at("approve").get<bool>()};
  } else if (type == "post_shared_info") {
    PostSharedInfo p;
    p.hash_sum = digest_from_hex(call.at("hash_sum").get<std::string>());
    p.reference_date = parse_iso_date(call.at("reference_date").get<std::string>());
    for (const auto& id : call.at("visibility")) p.visibility.insert(id.get<std::string>());
    tx.call = std::move(p);
  } else {
    throw std::invalid_argument("unknown call type: " + type);
  }
  tx.gas_amount = j.at("gas_amount").get<std::uint64_t>();
  tx.gas_price = j.at("gas_price").get<double>();
  tx.signature = from_hex(j.at("signature").get<std::string>());
  return tx;
}

json blocks_to_json(const std::deque<Block>& blocks) {
  json out = json::array();
  for (const auto& b : blocks) {
    json txs = json::array();
    for (const auto& tx : b.transactions) txs.push_back(transaction_to_json(tx));
    out.push_back(json{{"block_index", b.index},
                       {"prev_hash", to_hex(b.prev_hash)},
                       {"timestamp", b.timestamp},
                       {"txs", std::move(txs)},
                       {"block_hash", to_hex(b.block_hash)}});
  }
  return out;
}

std::vector<Block> blocks_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("chain snapshot must be a JSON array");
  std::vector<Block> blocks;
  blocks.reserve(j.size());
  for (const auto& jb : j) {
    Block b;
    b.index = jb.at("block_index").get<std::uint64_t>();
    b.prev_hash = digest_from_hex(jb.at("prev_hash").get<std::string>());
    b.timestamp = jb.at("timestamp").get<double>();
    for (const auto& jt : jb.at("txs")) b.transactions.push_back(transaction_from_json(jt));
    b.block_hash = digest_from_hex(jb.at("block_hash").get<std::string>());
    blocks.push_back(std::move(b));
  }
  return blocks;
}

void save_snapshot(const Ledger& ledger, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << blocks_to_json(ledger.blocks()).dump();
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<Block> load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return blocks_from_json(json::parse(in));
}

}  // namespace chainsim::ledger
