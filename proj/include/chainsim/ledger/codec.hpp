#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string_view>

#include "chainsim/ledger/crypto.hpp"

namespace chainsim::ledger {

/// Canonical binary writer: integers big-endian fixed width, variable-length
/// fields prefixed with a u32 length, reals as their IEEE-754 bit pattern.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  void u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::span<const std::uint8_t> v) {
    u32(static_cast<std::uint32_t>(v.size()));
    out_.insert(out_.end(), v.begin(), v.end());
  }
  void str(std::string_view v) {
    bytes(std::span(reinterpret_cast<const std::uint8_t*>(v.data()), v.size()));
  }

  const Bytes& data() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

}  // namespace chainsim::ledger
