#include "chainsim/ledger/contract.hpp"

#include <algorithm>

namespace chainsim::ledger {

std::string_view to_string(LedgerErrc code) {
  switch (code) {
    case LedgerErrc::BadSignature: return "bad_signature";
    case LedgerErrc::BadNonce: return "bad_nonce";
    case LedgerErrc::Unauthorized: return "unauthorized";
    case LedgerErrc::InvalidTransaction: return "invalid_transaction";
    case LedgerErrc::EmptyPool: return "empty_pool";
    case LedgerErrc::NotPending: return "not_pending";
    case LedgerErrc::DuplicateVote: return "duplicate_vote";
    case LedgerErrc::InvalidChain: return "invalid_chain";
  }
  return "unknown";
}

std::string_view to_string(AuthorizationStatus status) {
  switch (status) {
    case AuthorizationStatus::Pending: return "pending";
    case AuthorizationStatus::Authorized: return "authorized";
    case AuthorizationStatus::Denied: return "denied";
  }
  return "unknown";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::InfoPosted: return "info_posted";
    case EventKind::AddressAuthorized: return "address_authorized";
    case EventKind::AddressDenied: return "address_denied";
  }
  return "unknown";
}

void ContractState::bootstrap_authorized(const std::string& address) {
  pending_auth_.erase(address);
  authorized_.insert(address);
}

void ContractState::request_authorization(const std::string& candidate) {
  if (authorized_.contains(candidate)) {
    throw LedgerError(LedgerErrc::InvalidTransaction, "address already authorized");
  }
  if (pending_auth_.contains(candidate)) {
    throw LedgerError(LedgerErrc::InvalidTransaction, "authorization already pending");
  }
  pending_auth_.emplace(candidate, PendingAuthorization{candidate, {}, {}});
}

AuthorizationStatus ContractState::apply_vote(const std::string& voter, const std::string& candidate,
                                              bool approve) {
  if (!authorized_.contains(voter)) throw LedgerError(LedgerErrc::Unauthorized, "voter not authorized");
  auto it = pending_auth_.find(candidate);
  if (it == pending_auth_.end()) throw LedgerError(LedgerErrc::NotPending, "candidate not pending");
  PendingAuthorization& p = it->second;
  if (p.votes_for.contains(voter) || p.votes_against.contains(voter)) {
    throw LedgerError(LedgerErrc::DuplicateVote, "voter already voted on candidate");
  }
  (approve ? p.votes_for : p.votes_against).insert(voter);

  const std::size_t quorum = majority_threshold(authorized_.size());
  if (p.votes_for.size() >= quorum) {
    pending_auth_.erase(it);
    authorized_.insert(candidate);
    emit(EventKind::AddressAuthorized, 0, candidate);
    return AuthorizationStatus::Authorized;
  }
  if (p.votes_against.size() >= quorum) {
    pending_auth_.erase(it);
    emit(EventKind::AddressDenied, 0, candidate);
    return AuthorizationStatus::Denied;
  }
  return AuthorizationStatus::Pending;
}

std::uint64_t ContractState::post_info(const std::string& owner, const PostSharedInfo& call,
                                       std::uint64_t block_index, const Digest& tx_hash) {
  if (!authorized_.contains(owner)) throw LedgerError(LedgerErrc::Unauthorized, "owner not authorized");
  const std::uint64_t id = next_info_id_++;
  registry_.emplace(id, OnChainRecord{id, owner, call.hash_sum, call.reference_date, call.visibility,
                                      block_index, tx_hash});
  emit(EventKind::InfoPosted, id, {});
  return id;
}

void ContractState::check_executable(const SignedTransaction& tx) const {
  const std::string& sender = tx.sender.id;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RequestAuthorization>) {
          if (authorized_.contains(sender) || pending_auth_.contains(sender)) {
            throw LedgerError(LedgerErrc::InvalidTransaction, "authorization already granted or pending");
          }
        } else if constexpr (std::is_same_v<T, Vote>) {
          if (!authorized_.contains(sender)) throw LedgerError(LedgerErrc::Unauthorized, "voter not authorized");
          auto it = pending_auth_.find(c.candidate);
          if (it == pending_auth_.end()) throw LedgerError(LedgerErrc::NotPending, "candidate not pending");
          if (it->second.votes_for.contains(sender) || it->second.votes_against.contains(sender)) {
            throw LedgerError(LedgerErrc::DuplicateVote, "voter already voted on candidate");
          }
        } else {
          if (!authorized_.contains(sender)) throw LedgerError(LedgerErrc::Unauthorized, "sender not authorized");
        }
      },
      tx.call);
}

const OnChainRecord* ContractState::record(std::uint64_t info_id) const {
  auto it = registry_.find(info_id);
  return it == registry_.end() ? nullptr : &it->second;
}

std::vector<Event> ContractState::read_events(std::uint64_t since_cursor) const {
  if (since_cursor >= events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(since_cursor), events_.end()};
}

void ContractState::emit(EventKind kind, std::uint64_t info_id, std::string address) {
  events_.push_back(Event{events_.size(), kind, info_id, std::move(address)});
}

}  // namespace chainsim::ledger
