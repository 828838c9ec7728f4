#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chainsim/ledger/contract.hpp"
#include "chainsim/ledger/types.hpp"

namespace chainsim::ledger {

struct ChainError {
  std::uint64_t index = 0;
  std::string reason;
};

/// Recomputes every block hash and the index/prev_hash linkage. Reports the
/// first block whose invariants fail.
std::optional<ChainError> verify_chain(std::span<const Block> blocks);
std::optional<ChainError> verify_chain(const std::deque<Block>& blocks);

struct Receipt {
  std::uint64_t block_index = 0;
  bool success = false;
  std::optional<LedgerErrc> error;
  std::optional<std::uint64_t> info_id;
  std::optional<AuthorizationStatus> authorization;
};

/// In-process append-only chain hosting the registry contract.
///
/// Mutations (submit, mine_block) must come from a single writer; const
/// members are safe to call concurrently with each other.
class Ledger {
 public:
  static Ledger genesis(const KeyPair& deployer, double timestamp = 0.0);
  /// Verifies linkage and signatures, then replays every block. Throws
  /// LedgerError(InvalidChain) on any inconsistency.
  static Ledger from_blocks(std::vector<Block> blocks);

  Digest submit(SignedTransaction tx);
  /// Takes up to max_tx pending transactions by descending fee (gas_amount x
  /// gas_price), ties in submission order, executes them in that order and
  /// appends the block. The reference stays valid for the ledger's lifetime.
  const Block& mine_block(double now, std::size_t max_tx = std::numeric_limits<std::size_t>::max());

  std::optional<ChainError> verify_chain() const { return ledger::verify_chain(blocks_); }
  std::vector<Event> read_events(std::uint64_t since_cursor) const {
    return contract_.read_events(since_cursor);
  }

  const ContractState& contract() const { return contract_; }
  const std::deque<Block>& blocks() const { return blocks_; }
  const Block& head() const { return blocks_.back(); }
  std::optional<Receipt> receipt(const Digest& tx_hash) const;
  std::size_t pending_count() const { return pool_.size(); }
  /// Nonce the sender's next transaction must carry.
  std::uint64_t next_nonce(const std::string& address_id) const;
  const std::string& deployer() const { return deployer_; }

 private:
  struct PendingTx {
    std::uint64_t seq;
    double fee;
    Digest hash;
    SignedTransaction tx;
  };

  Ledger() = default;
  void validate_for_submission(const SignedTransaction& tx) const;
  Receipt execute(const SignedTransaction& tx, const Digest& hash, std::uint64_t block_index);
  void append_block(Block block);
  std::uint64_t mined_nonce(const std::string& address_id) const;

  std::deque<Block> blocks_;
  ContractState contract_;
  std::vector<PendingTx> pool_;
  std::uint64_t submit_seq_ = 0;
  std::map<std::string, std::uint64_t> next_nonce_;
  std::map<std::string, std::uint64_t> mined_nonce_;
  std::map<Digest, Receipt> receipts_;
  std::string deployer_;
};

}  // namespace chainsim::ledger
