#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainsim/connector/connector.hpp"
#include "chainsim/ledger/gas.hpp"

namespace httplib {
class Server;
}

namespace chainsim::service {

/// A company known to the service: its credentials and signing key.
struct Account {
  connector::Company company;
  ledger::KeyPair key;
};

/// companies.json: [{"name", "user", "secret", "seed"}], seed as 64 hex chars.
/// The first entry deploys the contract and starts authorized.
std::vector<Account> load_accounts(const std::filesystem::path& file);
void save_accounts(const std::vector<Account>& accounts, const std::filesystem::path& file);
/// Fresh accounts named C1..Cn with random keys and secrets.
std::vector<Account> generate_accounts(std::size_t count);

struct ServiceOptions {
  ledger::GasTier gas_tier = ledger::GasTier::Avg;
  ledger::GasPricing gas_pricing{};
  std::uint64_t pending_seed = 1;
};

/// State directory layout:
///   companies.json   accounts
///   chain.json       chain snapshot, rewritten after every block
///   offchain.jsonl   off-chain payload records
class SharedInfoService {
 public:
  SharedInfoService(const std::filesystem::path& state_dir, const ServiceOptions& options = {});
  ~SharedInfoService();

  /// Registers every route on `server`.
  void install(httplib::Server& server);

  connector::Connector& connector() { return *connector_; }
  const std::vector<Account>& accounts() const { return accounts_; }
  /// Account for a Basic credential pair, if it matches.
  const Account* authenticate(const std::string& user, const std::string& secret) const;

 private:
  double now() const;

  std::vector<Account> accounts_;
  std::map<std::string, std::size_t> by_user_;
  std::unique_ptr<connector::Connector> connector_;
};

/// Splits an "Authorization: Basic ..." header into user and secret.
std::optional<std::pair<std::string, std::string>> parse_basic_auth(const std::string& header);

}  // namespace chainsim::service
