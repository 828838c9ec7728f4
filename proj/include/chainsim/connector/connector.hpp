#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainsim/connector/offchain_store.hpp"
#include "chainsim/connector/shared_info.hpp"
#include "chainsim/ledger/ledger.hpp"
#include "chainsim/ledger/pending_time.hpp"
#include "chainsim/rng.hpp"

namespace chainsim::connector {

enum class ConnectorErrc {
  Unauthorized,
  LedgerError,
  NotFound,
  AccessDenied,
  NonCanonicalizable,
  UnknownWallet,
};

std::string_view to_string(ConnectorErrc code);

class ConnectorError : public std::runtime_error {
 public:
  ConnectorError(ConnectorErrc code, const std::string& what,
                 std::optional<ledger::LedgerErrc> ledger_code = std::nullopt)
      : std::runtime_error(what), code_(code), ledger_code_(ledger_code) {}
  ConnectorErrc code() const noexcept { return code_; }
  std::optional<ledger::LedgerErrc> ledger_code() const noexcept { return ledger_code_; }

 private:
  ConnectorErrc code_;
  std::optional<ledger::LedgerErrc> ledger_code_;
};

struct Company {
  std::string name;
  ledger::Address address;
  std::string basic_auth_user;
  std::string basic_auth_secret;
};

enum class VerifyStatus { Authentic, HashMismatch, NotOnChain };
std::string_view to_string(VerifyStatus status);

struct PollResult {
  std::uint64_t cursor = 0;
  std::vector<std::uint64_t> info_ids;
};

struct ConnectorOptions {
  ledger::PendingTimeModel pending_time{};
  double gas_price = 0.0;  // Ether per gas
  std::uint64_t pending_seed = 0;
  /// When set, the chain is re-snapshotted here after every mined block.
  std::optional<std::filesystem::path> chain_snapshot;
};

/// Bridges company systems and the ledger: hashes payloads, registers the
/// hash on-chain, keeps the full payload off-chain and enforces visibility.
///
/// All mutations run under one exclusive lock (the ledger's single writer);
/// reads take a shared lock and see a consistent prefix of events.
class Connector {
 public:
  Connector(ledger::Ledger ledger, OffChainStore store, ConnectorOptions options);

  /// Registers a signing wallet the connector may use on the owner's behalf.
  ledger::Address add_wallet(const ledger::KeyPair& key);
  bool has_wallet(const std::string& address_id) const;

  ledger::AuthorizationStatus request_authorization(const std::string& address_id, double now);
  ledger::AuthorizationStatus vote(const std::string& voter_id, const std::string& candidate_id,
                                   bool approve, double now);
  /// Authorized, Pending, or Denied when the address is neither.
  ledger::AuthorizationStatus authorization_status(const std::string& address_id) const;

  /// Synchronous publish: submit, wait for mining, persist off-chain.
  TransactionVerification post_shared_info(const Company& company, const nlohmann::json& document,
                                           const Date& reference_date,
                                           const std::set<std::string>& visibility, double now);

  SharedInfo get_shared_info(const std::string& requester, std::uint64_t info_id) const;
  std::vector<SharedInfo> search_shared_info(const std::string& requester,
                                             const SearchFilter& filter) const;
  VerifyStatus verify_shared_info(const SharedInfo& record) const;
  PollResult poll_new_info(const std::string& subscriber, std::uint64_t cursor) const;

  std::optional<ledger::ChainError> verify_chain() const;

  // Direct access for persistence and tests. Callers must not race mutations.
  const ledger::Ledger& ledger() const { return ledger_; }
  OffChainStore& store() { return store_; }
  const OffChainStore& store() const { return store_; }

 private:
  struct Mined {
    const ledger::Block* block;
    ledger::Receipt receipt;
    double submitted_at;
    double mined_at;
  };

  Mined submit_and_mine(ledger::SignedTransaction tx, double now);
  ledger::SignedTransaction sign(const std::string& address_id, ledger::ContractCall call,
                                 std::uint64_t gas) const;
  static bool visible_to(const ledger::OnChainRecord& record, const std::string& requester);

  mutable std::shared_mutex mutex_;
  ledger::Ledger ledger_;
  OffChainStore store_;
  ConnectorOptions options_;
  RngStream pending_rng_;
  std::map<std::string, ledger::KeyPair> wallets_;
};

}  // namespace chainsim::connector
