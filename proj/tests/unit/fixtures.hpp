#pragma once

#include <array>
#include <cstdint>

#include "chainsim/ledger/crypto.hpp"
#include "chainsim/ledger/types.hpp"

namespace chainsim::testing {

inline ledger::KeyPair key(std::uint8_t n) {
  std::array<std::uint8_t, ledger::kSeedSize> seed{};
  seed.fill(n);
  seed[0] = 0xa5;
  return ledger::KeyPair::from_seed(seed);
}

inline std::string id_of(const ledger::KeyPair& k) {
  return ledger::Address::id_for(k.public_key());
}

inline ledger::PostSharedInfo post_call(std::string_view payload, std::set<std::string> visibility = {}) {
  ledger::PostSharedInfo call;
  call.hash_sum = ledger::sha512(payload);
  call.reference_date = parse_iso_date("2020-03-01");
  call.visibility = std::move(visibility);
  return call;
}

}  // namespace chainsim::testing
