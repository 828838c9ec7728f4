#include "chainsim/ledger/ledger.hpp"

#include <algorithm>
#include <cmath>

namespace chainsim::ledger {

namespace {

template <class Blocks>
std::optional<ChainError> verify_blocks(const Blocks& blocks) {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    if (b.index != i) return ChainError{i, "index out of sequence"};
    if (i == 0) {
      if (b.prev_hash != Digest{}) return ChainError{0, "genesis prev_hash must be zero"};
    } else if (b.prev_hash != blocks[i - 1].block_hash) {
      return ChainError{i, "prev_hash does not match previous block"};
    }
    if (compute_block_hash(b) != b.block_hash) return ChainError{i, "block hash mismatch"};
  }
  return std::nullopt;
}

}  // namespace

std::optional<ChainError> verify_chain(std::span<const Block> blocks) { return verify_blocks(blocks); }
std::optional<ChainError> verify_chain(const std::deque<Block>& blocks) { return verify_blocks(blocks); }

Ledger Ledger::genesis(const KeyPair& deployer, double timestamp) {
  Ledger ledger;
  Block block;
  block.index = 0;
  block.timestamp = timestamp;
  block.transactions.push_back(make_transaction(deployer, 0, RequestAuthorization{}, 0, 0.0));
  block.block_hash = compute_block_hash(block);
  ledger.append_block(std::move(block));
  return ledger;
}

Ledger Ledger::from_blocks(std::vector<Block> blocks) {
  if (blocks.empty()) throw LedgerError(LedgerErrc::InvalidChain, "empty chain");
  if (auto err = ledger::verify_chain(std::span<const Block>(blocks))) {
    throw LedgerError(LedgerErrc::InvalidChain,
                      "block " + std::to_string(err->index) + ": " + err->reason);
  }
  Ledger ledger;
  for (auto& block : blocks) {
    for (const auto& tx : block.transactions) {
      if (!signature_valid(tx)) {
        throw LedgerError(LedgerErrc::InvalidChain,
                          "bad signature in block " + std::to_string(block.index));
      }
      if (tx.nonce != ledger.next_nonce(tx.sender.id)) {
        throw LedgerError(LedgerErrc::InvalidChain, "nonce gap in block " + std::to_string(block.index));
      }
    }
    ledger.append_block(std::move(block));
  }
  return ledger;
}

void Ledger::validate_for_submission(const SignedTransaction& tx) const {
  if (!signature_valid(tx)) throw LedgerError(LedgerErrc::BadSignature, "signature does not verify");
  if (tx.nonce != next_nonce(tx.sender.id)) {
    throw LedgerError(LedgerErrc::BadNonce, "expected nonce " + std::to_string(next_nonce(tx.sender.id)));
  }
  if (!std::isfinite(tx.gas_price) || tx.gas_price < 0.0) {
    throw LedgerError(LedgerErrc::InvalidTransaction, "gas price must be finite and non-negative");
  }
  if (std::holds_alternative<Vote>(tx.call) || std::holds_alternative<PostSharedInfo>(tx.call)) {
    if (!contract_.is_authorized(tx.sender.id)) {
      throw LedgerError(LedgerErrc::Unauthorized, "sender is not an authorized address");
    }
  }
  if (const auto* post = std::get_if<PostSharedInfo>(&tx.call)) {
    if (tx.gas_amount != kPostSharedInfoGas) {
      throw LedgerError(LedgerErrc::InvalidTransaction, "post_shared_info gas must be 190000");
    }
    if (post->visibility.contains(tx.sender.id)) {
      throw LedgerError(LedgerErrc::InvalidTransaction, "visibility must not list the sender");
    }
  }
}

Digest Ledger::submit(SignedTransaction tx) {
  validate_for_submission(tx);
  const Digest hash = transaction_hash(tx);
  const double fee = transaction_cost(static_cast<double>(tx.gas_amount), tx.gas_price);
  next_nonce_[tx.sender.id] = tx.nonce + 1;
  pool_.push_back(PendingTx{submit_seq_++, fee, hash, std::move(tx)});
  return hash;
}

const Block& Ledger::mine_block(double now, std::size_t max_tx) {
  if (pool_.empty()) throw LedgerError(LedgerErrc::EmptyPool, "no pending transactions");
  std::stable_sort(pool_.begin(), pool_.end(), [](const PendingTx& a, const PendingTx& b) {
    if (a.fee != b.fee) return a.fee > b.fee;
    return a.seq < b.seq;
  });
  Block block;
  block.index = blocks_.size();
  block.prev_hash = blocks_.back().block_hash;
  block.timestamp = now;

  // Highest fee first, but a sender's transactions still enter in nonce order.
  std::map<std::string, std::uint64_t> expected;
  std::vector<bool> taken(pool_.size(), false);
  for (bool progress = true; progress && block.transactions.size() < max_tx;) {
    progress = false;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      if (taken[i]) continue;
      const std::string& sender = pool_[i].tx.sender.id;
      auto it = expected.find(sender);
      if (it == expected.end()) it = expected.emplace(sender, mined_nonce(sender)).first;
      if (pool_[i].tx.nonce != it->second) continue;
      ++it->second;
      taken[i] = true;
      block.transactions.push_back(std::move(pool_[i].tx));
      progress = true;
      break;
    }
  }
  std::vector<PendingTx> rest;
  for (std::size_t i = 0; i < pool_.size(); ++i) {
    if (!taken[i]) rest.push_back(std::move(pool_[i]));
  }
  // Remaining entries return to submission order so later sorts stay stable.
  std::sort(rest.begin(), rest.end(), [](const PendingTx& a, const PendingTx& b) { return a.seq < b.seq; });
  pool_ = std::move(rest);
  block.block_hash = compute_block_hash(block);
  append_block(std::move(block));
  return blocks_.back();
}

Receipt Ledger::execute(const SignedTransaction& tx, const Digest& hash, std::uint64_t block_index) {
  Receipt r;
  r.block_index = block_index;
  if (block_index == 0) {
    // Genesis: RequestAuthorization senders become the bootstrap authorized set.
    if (std::holds_alternative<RequestAuthorization>(tx.call)) {
      contract_.bootstrap_authorized(tx.sender.id);
      if (deployer_.empty()) deployer_ = tx.sender.id;
      r.success = true;
      r.authorization = AuthorizationStatus::Authorized;
    } else {
      r.error = LedgerErrc::InvalidTransaction;
    }
    return r;
  }
  try {
    contract_.check_executable(tx);
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, RequestAuthorization>) {
            contract_.request_authorization(tx.sender.id);
            r.authorization = AuthorizationStatus::Pending;
          } else if constexpr (std::is_same_v<T, Vote>) {
            r.authorization = contract_.apply_vote(tx.sender.id, c.candidate, c.approve);
          } else {
            r.info_id = contract_.post_info(tx.sender.id, c, block_index, hash);
          }
        },
        tx.call);
    r.success = true;
  } catch (const LedgerError& e) {
    r.success = false;
    r.error = e.code();
  }
  return r;
}

void Ledger::append_block(Block block) {
  for (const auto& tx : block.transactions) {
    const Digest hash = transaction_hash(tx);
    auto& expected = next_nonce_[tx.sender.id];
    expected = std::max(expected, tx.nonce + 1);
    mined_nonce_[tx.sender.id] = tx.nonce + 1;
    receipts_[hash] = execute(tx, hash, block.index);
  }
  blocks_.push_back(std::move(block));
}

std::optional<Receipt> Ledger::receipt(const Digest& tx_hash) const {
  auto it = receipts_.find(tx_hash);
  if (it == receipts_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Ledger::mined_nonce(const std::string& address_id) const {
  auto it = mined_nonce_.find(address_id);
  return it == mined_nonce_.end() ? 0 : it->second;
}

std::uint64_t Ledger::next_nonce(const std::string& address_id) const {
  auto it = next_nonce_.find(address_id);
  return it == next_nonce_.end() ? 0 : it->second;
}

}  // namespace chainsim::ledger
