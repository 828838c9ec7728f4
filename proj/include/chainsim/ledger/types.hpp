#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "chainsim/date.hpp"
#include "chainsim/ledger/crypto.hpp"

namespace chainsim::ledger {

/// Gas charged for registering a hash sum; constant for every post.
inline constexpr std::uint64_t kPostSharedInfoGas = 190000;

struct Address {
  Bytes public_key;
  std::string id;  // hex of the first 20 bytes of SHA-512(public_key)

  static Address from_public_key(Bytes public_key);
  static std::string id_for(std::span<const std::uint8_t> public_key);

  friend bool operator==(const Address& a, const Address& b) { return a.id == b.id; }
  friend std::strong_ordering operator<=>(const Address& a, const Address& b) { return a.id <=> b.id; }
};

struct RequestAuthorization {
  friend bool operator==(const RequestAuthorization&, const RequestAuthorization&) = default;
};

struct Vote {
  std::string candidate;  // address id
  bool approve = false;
  friend bool operator==(const Vote&, const Vote&) = default;
};

struct PostSharedInfo {
  Digest hash_sum{};
  Date reference_date{};
  std::set<std::string> visibility;  // address ids, never containing the sender
  friend bool operator==(const PostSharedInfo&, const PostSharedInfo&) = default;
};

using ContractCall = std::variant<RequestAuthorization, Vote, PostSharedInfo>;

struct SignedTransaction {
  Address sender;
  std::uint64_t nonce = 0;
  ContractCall call;
  std::uint64_t gas_amount = 0;
  double gas_price = 0.0;  // Ether per gas unit
  Bytes signature;
};

struct Block {
  std::uint64_t index = 0;
  Digest prev_hash{};
  double timestamp = 0.0;  // simulated seconds
  std::vector<SignedTransaction> transactions;
  Digest block_hash{};
};

/// Bytes covered by the sender's signature: (sender.id, nonce, call, gas_amount, gas_price).
Bytes signing_payload(const SignedTransaction& tx);
/// Full canonical form including the public key and signature.
Bytes serialize(const SignedTransaction& tx);
Digest transaction_hash(const SignedTransaction& tx);
/// Canonical block bytes without block_hash.
Bytes serialize_header_and_body(const Block& block);
Digest compute_block_hash(const Block& block);

SignedTransaction make_transaction(const KeyPair& key, std::uint64_t nonce, ContractCall call,
                                   std::uint64_t gas_amount, double gas_price);
bool signature_valid(const SignedTransaction& tx);

/// C = G x P, in Ether when the price is Ether per gas.
double transaction_cost(double gas_amount, double gas_price);

std::string_view call_name(const ContractCall& call);

}  // namespace chainsim::ledger
