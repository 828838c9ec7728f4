#include "chainsim/service/http_service.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>

#include <httplib.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include "chainsim/ledger/snapshot.hpp"

namespace chainsim::service {

namespace fs = std::filesystem;
using connector::ConnectorErrc;
using connector::ConnectorError;
using nlohmann::json;

namespace {

struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Reply {
  int status = 200;
  json body;
};

void require_keys(const json& j, std::initializer_list<std::string_view> required,
                  std::initializer_list<std::string_view> optional = {}) {
  if (!j.is_object()) throw BadRequest("expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto known = [&](std::string_view k) { return k == key; };
    if (std::none_of(required.begin(), required.end(), known) &&
        std::none_of(optional.begin(), optional.end(), known)) {
      throw BadRequest("unknown field '" + key + "'");
    }
  }
  for (auto k : required) {
    if (!j.contains(std::string(k))) throw BadRequest("missing field '" + std::string(k) + "'");
  }
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error&) {
    throw BadRequest("body is not valid JSON");
  }
}

bool is_address_id(const std::string& s) {
  return s.size() == 40 && s.find_first_not_of("0123456789abcdef") == std::string::npos;
}

Date parse_date_field(const json& v, const std::string& name) {
  if (!v.is_string()) throw BadRequest(name + " must be a YYYY-MM-DD string");
  try {
    return parse_iso_date(v.get<std::string>());
  } catch (const std::invalid_argument&) {
    throw BadRequest(name + " must be a YYYY-MM-DD string");
  }
}

std::uint64_t parse_count(const std::string& text, const std::string& name) {
  if (text.empty() || text.size() > 19 || text.find_first_not_of("0123456789") != std::string::npos) {
    throw BadRequest(name + " must be a non-negative integer");
  }
  return std::stoull(text);
}

int status_for(ConnectorErrc code) {
  switch (code) {
    case ConnectorErrc::Unauthorized:
    case ConnectorErrc::AccessDenied: return 403;
    case ConnectorErrc::NotFound: return 404;
    case ConnectorErrc::NonCanonicalizable: return 400;
    case ConnectorErrc::LedgerError:
    case ConnectorErrc::UnknownWallet: return 409;
  }
  return 500;
}

json error_body(std::string_view code, const std::string& message) {
  return json{{"error", code}, {"message", message}};
}

std::string random_hex(std::size_t bytes) {
  ledger::Bytes buf(bytes);
  if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) throw std::runtime_error("RAND_bytes failed");
  return ledger::to_hex(buf);
}

}  // namespace

std::optional<std::pair<std::string, std::string>> parse_basic_auth(const std::string& header) {
  constexpr std::string_view prefix = "Basic ";
  if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  const std::string encoded = header.substr(prefix.size());
  if (encoded.size() % 4 != 0) return std::nullopt;
  std::string decoded(encoded.size() / 4 * 3, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(decoded.data()),
                                reinterpret_cast<const unsigned char*>(encoded.data()),
                                static_cast<int>(encoded.size()));
  if (n < 0) return std::nullopt;
  std::size_t len = static_cast<std::size_t>(n);
  for (auto it = encoded.rbegin(); it != encoded.rend() && *it == '='; ++it) --len;
  decoded.resize(len);
  const auto colon = decoded.find(':');
  if (colon == std::string::npos) return std::nullopt;
  return std::pair{decoded.substr(0, colon), decoded.substr(colon + 1)};
}

std::vector<Account> load_accounts(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(file.string() + ": " + e.what());
  }
  if (!j.is_array() || j.empty()) throw std::runtime_error(file.string() + ": expected a non-empty array");
  std::vector<Account> out;
  std::set<std::string> users, addresses;
  for (const auto& entry : j) {
    try {
      require_keys(entry, {"name", "user", "secret", "seed"});
    } catch (const BadRequest& e) {
      throw std::runtime_error(file.string() + ": " + e.what());
    }
    const auto seed = ledger::from_hex(entry.at("seed").get<std::string>());
    if (seed.size() != ledger::kSeedSize) throw std::runtime_error(file.string() + ": seed must be 32 bytes");
    auto key = ledger::KeyPair::from_seed(seed);
    connector::Company c{entry.at("name").get<std::string>(), ledger::Address::from_public_key(key.public_key()),
                         entry.at("user").get<std::string>(), entry.at("secret").get<std::string>()};
    if (!users.insert(c.basic_auth_user).second) throw std::runtime_error("duplicate user " + c.basic_auth_user);
    if (!addresses.insert(c.address.id).second) throw std::runtime_error("duplicate key for " + c.name);
    out.push_back(Account{std::move(c), std::move(key)});
  }
  return out;
}

void save_accounts(const std::vector<Account>& accounts, const fs::path& file) {
  json j = json::array();
  for (const auto& a : accounts) {
    j.push_back({{"name", a.company.name},
                 {"user", a.company.basic_auth_user},
                 {"secret", a.company.basic_auth_secret},
                 {"seed", ledger::to_hex(a.key.seed())}});
  }
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

std::vector<Account> generate_accounts(std::size_t count) {
  std::vector<Account> out;
  for (std::size_t i = 1; i <= count; ++i) {
    auto key = ledger::KeyPair::generate();
    const std::string name = "C" + std::to_string(i);
    connector::Company c{name, ledger::Address::from_public_key(key.public_key()), "c" + std::to_string(i),
                         random_hex(16)};
    out.push_back(Account{std::move(c), std::move(key)});
  }
  return out;
}

SharedInfoService::SharedInfoService(const fs::path& state_dir, const ServiceOptions& options)
    : accounts_(load_accounts(state_dir / "companies.json")) {
  for (std::size_t i = 0; i < accounts_.size(); ++i) by_user_[accounts_[i].company.basic_auth_user] = i;

  const fs::path chain = state_dir / "chain.json";
  ledger::Ledger ledger = fs::exists(chain) ? ledger::Ledger::from_blocks(ledger::load_snapshot(chain))
                                            : ledger::Ledger::genesis(accounts_.front().key);
  if (!fs::exists(chain)) ledger::save_snapshot(ledger, chain);

  connector::ConnectorOptions copts;
  copts.gas_price = options.gas_pricing.gas_price(options.gas_tier);
  copts.pending_seed = options.pending_seed ^ ledger.blocks().size();
  copts.chain_snapshot = chain;
  connector_ = std::make_unique<connector::Connector>(
      std::move(ledger), connector::OffChainStore(state_dir / "offchain.jsonl"), copts);
  for (const auto& a : accounts_) connector_->add_wallet(a.key);
}

SharedInfoService::~SharedInfoService() = default;

const Account* SharedInfoService::authenticate(const std::string& user, const std::string& secret) const {
  auto it = by_user_.find(user);
  if (it == by_user_.end()) return nullptr;
  const std::string& expected = accounts_[it->second].company.basic_auth_secret;
  if (expected.size() != secret.size() || CRYPTO_memcmp(expected.data(), secret.data(), secret.size()) != 0) {
    return nullptr;
  }
  return &accounts_[it->second];
}

double SharedInfoService::now() const { return connector_->ledger().head().timestamp; }

void SharedInfoService::install(httplib::Server& server) {
  using Handler = std::function<Reply(const Account&, const httplib::Request&)>;
  auto writes = std::make_shared<std::mutex>();

  auto route = [this](Handler handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      Reply reply;
      const auto creds = parse_basic_auth(req.get_header_value("Authorization"));
      const Account* account = creds ? authenticate(creds->first, creds->second) : nullptr;
      if (!account) {
        res.set_header("WWW-Authenticate", "Basic realm=\"sharedinfo\"");
        reply = {401, error_body("unauthenticated", "valid Basic credentials required")};
      } else {
        try {
          reply = handler(*account, req);
        } catch (const BadRequest& e) {
          reply = {400, error_body("bad_request", e.what())};
        } catch (const ConnectorError& e) {
          reply = {status_for(e.code()), error_body(connector::to_string(e.code()), e.what())};
        } catch (const json::exception& e) {
          reply = {400, error_body("bad_request", e.what())};
        } catch (const std::exception& e) {
          reply = {500, error_body("internal", e.what())};
        }
      }
      res.status = reply.status;
      res.set_content(reply.body.dump(), "application/json");
    };
  };

  server.Post("/sharedinfo", route([this, writes](const Account& me, const httplib::Request& req) {
    const json body = parse_body(req);
    require_keys(body, {"payload", "reference_date", "visibility"});
    if (!body["payload"].is_object()) throw BadRequest("payload must be a JSON object");
    const Date date = parse_date_field(body["reference_date"], "reference_date");
    if (!body["visibility"].is_array()) throw BadRequest("visibility must be an array of addresses");
    std::set<std::string> visibility;
    for (const auto& v : body["visibility"]) {
      if (!v.is_string() || !is_address_id(v.get<std::string>())) {
        throw BadRequest("visibility entries must be 40-char lowercase hex addresses");
      }
      visibility.insert(v.get<std::string>());
    }
    std::lock_guard lock(*writes);
    const auto v = connector_->post_shared_info(me.company, body["payload"], date, visibility, now());
    return Reply{201, json{{"info_id", v.info_id},
                           {"block_index", v.block_index},
                           {"tx_hash", ledger::to_hex(v.tx_hash)},
                           {"fee_paid", v.fee_paid},
                           {"mined_at", v.mined_at}}};
  }));

  server.Get(R"(/sharedinfo/(\d+))", route([this](const Account& me, const httplib::Request& req) {
    const auto id = parse_count(req.matches[1], "info id");
    return Reply{200, connector::shared_info_to_json(connector_->get_shared_info(me.company.address.id, id),
                                                     connector::PayloadForm::Object)};
  }));

  server.Get("/sharedinfo", route([this](const Account& me, const httplib::Request& req) {
    connector::SearchFilter filter;
    for (const auto& [key, value] : req.params) {
      if (key == "owner") {
        if (!is_address_id(value)) throw BadRequest("owner must be a 40-char lowercase hex address");
        filter.owner = value;
      } else if (key == "from") {
        filter.date_from = parse_date_field(value, "from");
      } else if (key == "to") {
        filter.date_to = parse_date_field(value, "to");
      } else {
        throw BadRequest("unknown query parameter '" + key + "'");
      }
    }
    json out = json::array();
    for (const auto& info : connector_->search_shared_info(me.company.address.id, filter)) {
      out.push_back(connector::shared_info_to_json(info, connector::PayloadForm::Object));
    }
    return Reply{200, std::move(out)};
  }));

  server.Post("/verify", route([this](const Account&, const httplib::Request& req) {
    const json body = parse_body(req);
    require_keys(body, {"info_id", "owner", "payload", "reference_date", "visibility", "hash_sum", "verification"});
    require_keys(body["verification"],
                 {"block_index", "tx_hash", "info_id", "submitted_at", "mined_at", "gas_used", "fee_paid"});
    connector::SharedInfo info;
    try {
      info = connector::shared_info_from_json(body);
    } catch (const std::invalid_argument& e) {
      throw BadRequest(e.what());
    }
    return Reply{200, json{{"status", connector::to_string(connector_->verify_shared_info(info))}}};
  }));

  server.Post("/authorization", route([this, writes](const Account& me, const httplib::Request& req) {
    if (!req.body.empty()) require_keys(parse_body(req), {});
    std::lock_guard lock(*writes);
    const auto status = connector_->request_authorization(me.company.address.id, now());
    return Reply{200, json{{"status", ledger::to_string(status)}}};
  }));

  server.Post(R"(/company/([0-9a-f]+)/vote)", route([this, writes](const Account& me, const httplib::Request& req) {
    const std::string candidate = req.matches[1];
    if (!is_address_id(candidate)) throw BadRequest("address must be 40-char lowercase hex");
    const json body = parse_body(req);
    require_keys(body, {"approve"});
    if (!body["approve"].is_boolean()) throw BadRequest("approve must be true or false");
    std::lock_guard lock(*writes);
    const auto status = connector_->vote(me.company.address.id, candidate, body["approve"].get<bool>(), now());
    return Reply{200, json{{"status", ledger::to_string(status)}}};
  }));

  server.Get("/events", route([this](const Account& me, const httplib::Request& req) {
    std::uint64_t cursor = 0;
    for (const auto& [key, value] : req.params) {
      if (key != "cursor") throw BadRequest("unknown query parameter '" + key + "'");
      cursor = parse_count(value, "cursor");
    }
    const auto poll = connector_->poll_new_info(me.company.address.id, cursor);
    return Reply{200, json{{"cursor", poll.cursor}, {"info_ids", poll.info_ids}}};
  }));
}

}  // namespace chainsim::service
