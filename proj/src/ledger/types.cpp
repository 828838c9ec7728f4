#include "chainsim/ledger/types.hpp"

#include <stdexcept>

#include "chainsim/ledger/codec.hpp"

namespace chainsim::ledger {

namespace {

enum class CallTag : std::uint8_t { RequestAuthorization = 1, Vote = 2, PostSharedInfo = 3 };

void write_call(ByteWriter& w, const ContractCall& call) {
  std::visit(
      [&w](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RequestAuthorization>) {
          w.u8(static_cast<std::uint8_t>(CallTag::RequestAuthorization));
        } else if constexpr (std::is_same_v<T, Vote>) {
          w.u8(static_cast<std::uint8_t>(CallTag::Vote));
          w.str(c.candidate);
          w.u8(c.approve ? 1 : 0);
        } else {
          w.u8(static_cast<std::uint8_t>(CallTag::PostSharedInfo));
          w.bytes(c.hash_sum);
          w.str(format_iso_date(c.reference_date));
          w.u32(static_cast<std::uint32_t>(c.visibility.size()));
          for (const auto& id : c.visibility) w.str(id);
        }
      },
      call);
}

void write_signed_fields(ByteWriter& w, const SignedTransaction& tx) {
  w.str(tx.sender.id);
  w.u64(tx.nonce);
  write_call(w, tx.call);
  w.u64(tx.gas_amount);
  w.f64(tx.gas_price);
}

void write_transaction(ByteWriter& w, const SignedTransaction& tx) {
  w.bytes(tx.sender.public_key);
  write_signed_fields(w, tx);
  w.bytes(tx.signature);
}

}  // namespace

std::string Address::id_for(std::span<const std::uint8_t> public_key) {
  const Digest d = sha512(public_key);
  return to_hex(std::span(d.data(), 20));
}

Address Address::from_public_key(Bytes public_key) {
  if (public_key.size() != kPublicKeySize) throw std::invalid_argument("public key must be 32 bytes");
  std::string id = id_for(public_key);
  return Address{std::move(public_key), std::move(id)};
}

Bytes signing_payload(const SignedTransaction& tx) {
  ByteWriter w;
  write_signed_fields(w, tx);
  return std::move(w).take();
}

Bytes serialize(const SignedTransaction& tx) {
  ByteWriter w;
  write_transaction(w, tx);
  return std::move(w).take();
}

Digest transaction_hash(const SignedTransaction& tx) { return sha512(serialize(tx)); }

Bytes serialize_header_and_body(const Block& block) {
  ByteWriter w;
  w.u64(block.index);
  w.bytes(block.prev_hash);
  w.f64(block.timestamp);
  w.u32(static_cast<std::uint32_t>(block.transactions.size()));
  for (const auto& tx : block.transactions) write_transaction(w, tx);
  return std::move(w).take();
}

Digest compute_block_hash(const Block& block) { return sha512(serialize_header_and_body(block)); }

SignedTransaction make_transaction(const KeyPair& key, std::uint64_t nonce, ContractCall call,
                                   std::uint64_t gas_amount, double gas_price) {
  SignedTransaction tx{Address::from_public_key(key.public_key()), nonce, std::move(call), gas_amount,
                       gas_price, {}};
  tx.signature = key.sign(signing_payload(tx));
  return tx;
}

bool signature_valid(const SignedTransaction& tx) {
  if (tx.sender.id != Address::id_for(tx.sender.public_key)) return false;
  return verify_signature(tx.sender.public_key, signing_payload(tx), tx.signature);
}

double transaction_cost(double gas_amount, double gas_price) { return gas_amount * gas_price; }

std::string_view call_name(const ContractCall& call) {
  switch (call.index()) {
    case 0: return "request_authorization";
    case 1: return "vote";
    default: return "post_shared_info";
  }
}

}  // namespace chainsim::ledger
