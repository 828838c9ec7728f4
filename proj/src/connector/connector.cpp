#include "chainsim/connector/connector.hpp"

#include <mutex>

#include "chainsim/connector/canonical_json.hpp"
#include "chainsim/ledger/snapshot.hpp"

namespace chainsim::connector {

using ledger::AuthorizationStatus;
using ledger::LedgerError;

std::string_view to_string(ConnectorErrc code) {
  switch (code) {
    case ConnectorErrc::Unauthorized: return "unauthorized";
    case ConnectorErrc::LedgerError: return "ledger_error";
    case ConnectorErrc::NotFound: return "not_found";
    case ConnectorErrc::AccessDenied: return "access_denied";
    case ConnectorErrc::NonCanonicalizable: return "non_canonicalizable";
    case ConnectorErrc::UnknownWallet: return "unknown_wallet";
  }
  return "unknown";
}

std::string_view to_string(VerifyStatus status) {
  switch (status) {
    case VerifyStatus::Authentic: return "authentic";
    case VerifyStatus::HashMismatch: return "hash_mismatch";
    case VerifyStatus::NotOnChain: return "not_on_chain";
  }
  return "unknown";
}

Connector::Connector(ledger::Ledger ledger, OffChainStore store, ConnectorOptions options)
    : ledger_(std::move(ledger)),
      store_(std::move(store)),
      options_(std::move(options)),
      pending_rng_(options_.pending_seed) {}

ledger::Address Connector::add_wallet(const ledger::KeyPair& key) {
  std::unique_lock lock(mutex_);
  auto address = ledger::Address::from_public_key(key.public_key());
  wallets_.insert_or_assign(address.id, key);
  return address;
}

bool Connector::has_wallet(const std::string& address_id) const {
  std::shared_lock lock(mutex_);
  return wallets_.contains(address_id);
}

ledger::SignedTransaction Connector::sign(const std::string& address_id, ledger::ContractCall call,
                                          std::uint64_t gas) const {
  auto it = wallets_.find(address_id);
  if (it == wallets_.end()) {
    throw ConnectorError(ConnectorErrc::UnknownWallet, "no wallet for address " + address_id);
  }
  return ledger::make_transaction(it->second, ledger_.next_nonce(address_id), std::move(call), gas,
                                  options_.gas_price);
}

Connector::Mined Connector::submit_and_mine(ledger::SignedTransaction tx, double now) {
  ledger::Digest hash;
  try {
    hash = ledger_.submit(std::move(tx));
  } catch (const LedgerError& e) {
    const auto code = e.code() == ledger::LedgerErrc::Unauthorized ? ConnectorErrc::Unauthorized
                                                                    : ConnectorErrc::LedgerError;
    throw ConnectorError(code, e.what(), e.code());
  }
  const double mined_at = now + options_.pending_time.sample(pending_rng_);
  const ledger::Block& block = ledger_.mine_block(mined_at);
  if (options_.chain_snapshot) ledger::save_snapshot(ledger_, *options_.chain_snapshot);
  return Mined{&block, *ledger_.receipt(hash), now, mined_at};
}

AuthorizationStatus Connector::request_authorization(const std::string& address_id, double now) {
  std::unique_lock lock(mutex_);
  auto tx = sign(address_id, ledger::RequestAuthorization{}, 0);
  try {
    ledger_.contract().check_executable(tx);
  } catch (const LedgerError& e) {
    throw ConnectorError(ConnectorErrc::LedgerError, e.what(), e.code());
  }
  const Mined mined = submit_and_mine(std::move(tx), now);
  if (!mined.receipt.success) {
    throw ConnectorError(ConnectorErrc::LedgerError, "authorization request reverted", mined.receipt.error);
  }
  return *mined.receipt.authorization;
}

AuthorizationStatus Connector::vote(const std::string& voter_id, const std::string& candidate_id,
                                    bool approve, double now) {
  std::unique_lock lock(mutex_);
  auto tx = sign(voter_id, ledger::Vote{candidate_id, approve}, 0);
  try {
    ledger_.contract().check_executable(tx);
  } catch (const LedgerError& e) {
    const auto code = e.code() == ledger::LedgerErrc::Unauthorized ? ConnectorErrc::Unauthorized
                                                                    : ConnectorErrc::LedgerError;
    throw ConnectorError(code, e.what(), e.code());
  }
  const Mined mined = submit_and_mine(std::move(tx), now);
  if (!mined.receipt.success) {
    throw ConnectorError(ConnectorErrc::LedgerError, "vote reverted", mined.receipt.error);
  }
  return *mined.receipt.authorization;
}

AuthorizationStatus Connector::authorization_status(const std::string& address_id) const {
  std::shared_lock lock(mutex_);
  if (ledger_.contract().is_authorized(address_id)) return AuthorizationStatus::Authorized;
  if (ledger_.contract().pending_auth().contains(address_id)) return AuthorizationStatus::Pending;
  return AuthorizationStatus::Denied;
}

TransactionVerification Connector::post_shared_info(const Company& company,
                                                    const nlohmann::json& document,
                                                    const Date& reference_date,
                                                    const std::set<std::string>& visibility,
                                                    double now) {
  std::unique_lock lock(mutex_);
  const std::string& owner = company.address.id;
  if (!ledger_.contract().is_authorized(owner)) {
    throw ConnectorError(ConnectorErrc::Unauthorized, company.name + " is not an authorized address");
  }
  std::string payload = canonicalize_payload(document);
  ledger::PostSharedInfo call;
  call.hash_sum = ledger::sha512(payload);
  call.reference_date = reference_date;
  call.visibility = visibility;
  call.visibility.erase(owner);

  auto tx = sign(owner, call, ledger::kPostSharedInfoGas);
  const double fee = ledger::transaction_cost(static_cast<double>(tx.gas_amount), tx.gas_price);
  const Mined mined = submit_and_mine(std::move(tx), now);
  if (!mined.receipt.success || !mined.receipt.info_id) {
    throw ConnectorError(ConnectorErrc::LedgerError, "post reverted", mined.receipt.error);
  }
  const ledger::OnChainRecord* record = ledger_.contract().record(*mined.receipt.info_id);

  SharedInfo info;
  info.info_id = record->info_id;
  info.owner = owner;
  info.payload = std::move(payload);
  info.reference_date = reference_date;
  info.visibility = call.visibility;
  info.hash_sum = call.hash_sum;
  info.verification = TransactionVerification{mined.block->index, record->tx_hash, record->info_id,
                                              mined.submitted_at, mined.mined_at,
                                              ledger::kPostSharedInfoGas, fee};
  store_.put(info);
  return info.verification;
}

bool Connector::visible_to(const ledger::OnChainRecord& record, const std::string& requester) {
  return record.owner == requester || record.visibility.contains(requester);
}

SharedInfo Connector::get_shared_info(const std::string& requester, std::uint64_t info_id) const {
  std::shared_lock lock(mutex_);
  const ledger::OnChainRecord* record = ledger_.contract().record(info_id);
  auto info = store_.get(info_id);
  if (!record || !info) throw ConnectorError(ConnectorErrc::NotFound, "no shared info " + std::to_string(info_id));
  if (!visible_to(*record, requester)) {
    throw ConnectorError(ConnectorErrc::AccessDenied, "requester outside the visibility group");
  }
  return *std::move(info);
}

std::vector<SharedInfo> Connector::search_shared_info(const std::string& requester,
                                                      const SearchFilter& filter) const {
  std::shared_lock lock(mutex_);
  std::vector<SharedInfo> out;
  for (auto& info : store_.search(filter)) {
    const ledger::OnChainRecord* record = ledger_.contract().record(info.info_id);
    if (record && visible_to(*record, requester)) out.push_back(std::move(info));
  }
  return out;
}

VerifyStatus Connector::verify_shared_info(const SharedInfo& record) const {
  std::shared_lock lock(mutex_);
  const ledger::OnChainRecord* on_chain = ledger_.contract().record(record.info_id);
  if (!on_chain) return VerifyStatus::NotOnChain;
  if (on_chain->owner != record.owner) return VerifyStatus::HashMismatch;
  return ledger::sha512(record.payload) == on_chain->hash_sum ? VerifyStatus::Authentic
                                                              : VerifyStatus::HashMismatch;
}

PollResult Connector::poll_new_info(const std::string& subscriber, std::uint64_t cursor) const {
  std::shared_lock lock(mutex_);
  PollResult out{cursor, {}};
  for (const auto& event : ledger_.read_events(cursor)) {
    out.cursor = event.cursor + 1;
    if (event.kind != ledger::EventKind::InfoPosted) continue;
    const ledger::OnChainRecord* record = ledger_.contract().record(event.info_id);
    if (record && visible_to(*record, subscriber)) out.info_ids.push_back(event.info_id);
  }
  return out;
}

std::optional<ledger::ChainError> Connector::verify_chain() const {
  std::shared_lock lock(mutex_);
  return ledger_.verify_chain();
}

}  // namespace chainsim::connector
