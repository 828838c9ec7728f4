#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainsim/ledger/types.hpp"

namespace chainsim::ledger {

enum class LedgerErrc {
  BadSignature,
  BadNonce,
  Unauthorized,
  InvalidTransaction,
  EmptyPool,
  NotPending,
  DuplicateVote,
  InvalidChain,
};

std::string_view to_string(LedgerErrc code);

class LedgerError : public std::runtime_error {
 public:
  LedgerError(LedgerErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  LedgerErrc code() const noexcept { return code_; }

 private:
  LedgerErrc code_;
};

enum class AuthorizationStatus { Pending, Authorized, Denied };
std::string_view to_string(AuthorizationStatus status);

struct PendingAuthorization {
  std::string candidate;
  std::set<std::string> votes_for;
  std::set<std::string> votes_against;
};

struct OnChainRecord {
  std::uint64_t info_id = 0;
  std::string owner;
  Digest hash_sum{};
  Date reference_date{};
  std::set<std::string> visibility;
  std::uint64_t block_index = 0;
  Digest tx_hash{};
};

enum class EventKind { InfoPosted, AddressAuthorized, AddressDenied };
std::string_view to_string(EventKind kind);

struct Event {
  std::uint64_t cursor = 0;
  EventKind kind = EventKind::InfoPosted;
  std::uint64_t info_id = 0;  // InfoPosted
  std::string address;        // AddressAuthorized / AddressDenied

  friend bool operator==(const Event&, const Event&) = default;
};

/// Majority threshold floor(n/2)+1 over an authorized set of size n.
constexpr std::size_t majority_threshold(std::size_t authorized) { return authorized / 2 + 1; }

/// The registry contract: authorization voting, hash registration, event log.
class ContractState {
 public:
  void bootstrap_authorized(const std::string& address);

  void request_authorization(const std::string& candidate);
  AuthorizationStatus apply_vote(const std::string& voter, const std::string& candidate, bool approve);
  std::uint64_t post_info(const std::string& owner, const PostSharedInfo& call,
                          std::uint64_t block_index, const Digest& tx_hash);

  /// Throws the error execution would raise, without mutating anything.
  void check_executable(const SignedTransaction& tx) const;

  bool is_authorized(const std::string& address) const { return authorized_.contains(address); }
  const std::set<std::string>& authorized() const { return authorized_; }
  const std::map<std::string, PendingAuthorization>& pending_auth() const { return pending_auth_; }
  const std::map<std::uint64_t, OnChainRecord>& registry() const { return registry_; }
  const std::vector<Event>& events() const { return events_; }
  std::uint64_t next_info_id() const { return next_info_id_; }

  const OnChainRecord* record(std::uint64_t info_id) const;
  std::vector<Event> read_events(std::uint64_t since_cursor) const;

 private:
  void emit(EventKind kind, std::uint64_t info_id, std::string address);

  std::set<std::string> authorized_;
  std::map<std::string, PendingAuthorization> pending_auth_;
  std::map<std::uint64_t, OnChainRecord> registry_;
  std::vector<Event> events_;
  std::uint64_t next_info_id_ = 0;
};

}  // namespace chainsim::ledger
