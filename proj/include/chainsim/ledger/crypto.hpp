#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chainsim::ledger {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 64>;

inline constexpr std::size_t kSeedSize = 32;
inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSignatureSize = 64;

Digest sha512(std::span<const std::uint8_t> data);
Digest sha512(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> data);
/// Accepts upper or lower case; throws std::invalid_argument on odd length or non-hex input.
Bytes from_hex(std::string_view hex);
/// Parses exactly 128 hex characters.
Digest digest_from_hex(std::string_view hex);

/// Ed25519 key pair. Signatures are deterministic, so re-signing the same
/// message yields identical bytes.
class KeyPair {
 public:
  static KeyPair from_seed(std::span<const std::uint8_t> seed);
  static KeyPair generate();

  const Bytes& public_key() const { return public_key_; }
  const Bytes& seed() const { return seed_; }
  Bytes sign(std::span<const std::uint8_t> message) const;

 private:
  struct Handle;
  KeyPair(Bytes seed, Bytes public_key, std::shared_ptr<Handle> handle);

  Bytes seed_;
  Bytes public_key_;
  std::shared_ptr<Handle> handle_;
};

/// Total: returns false for malformed keys or signatures instead of throwing.
bool verify_signature(std::span<const std::uint8_t> public_key,
                      std::span<const std::uint8_t> message,
                      std::span<const std::uint8_t> signature);

}  // namespace chainsim::ledger
