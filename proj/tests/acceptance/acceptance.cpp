// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every check ran to completion, whatever its verdict;
// pass --strict to also fail on any FAIL line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "chainsim/connector/canonical_json.hpp"
#include "chainsim/connector/connector.hpp"
#include "chainsim/experiments/report.hpp"
#include "chainsim/experiments/runner.hpp"
#include "chainsim/experiments/stats.hpp"
#include "chainsim/inventory/costs.hpp"
#include "chainsim/inventory/policy.hpp"
#include "chainsim/ledger/contract.hpp"
#include "chainsim/ledger/gas.hpp"
#include "chainsim/ledger/pending_time.hpp"
#include "chainsim/rng.hpp"
#include "chainsim/sim/world.hpp"

using namespace chainsim;
using experiments::Role;
using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ledger::KeyPair key_from(std::uint64_t seed) {
  std::array<std::uint8_t, ledger::kSeedSize> bytes{};
  RngStream rng(seed);
  for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.next_u64());
  return ledger::KeyPair::from_seed(bytes);
}

// The paired No-IS / B-IS experiment at the default size, shared by several checks.
struct Paired {
  experiments::ScenarioConfig base;
  std::vector<experiments::ScenarioResults> runs;
  double seconds = 0;
};

Paired& paired() {
  static Paired p = [] {
    Paired out;
    const std::vector<experiments::ScenarioConfig> pair{
        experiments::make_scenario(out.base, sim::SharingMode::NoIS, experiments::DistortionUse::None),
        experiments::make_scenario(out.base, sim::SharingMode::BIS, experiments::DistortionUse::None)};
    const auto t0 = Clock::now();
    out.runs = experiments::run_experiments(pair, {experiments::Execution::Parallel, {}});
    out.seconds = seconds_since(t0);
    return out;
  }();
  return p;
}

Verdict certification_round_trip() {
  const auto t0 = Clock::now();
  const auto deployer = key_from(1);
  connector::Connector conn(ledger::Ledger::genesis(deployer), {}, connector::ConnectorOptions{{}, 5e-9, 3, {}});
  const auto address = conn.add_wallet(deployer);
  const connector::Company company{"C1", address, "c1", "secret"};
  RngStream rng(derive_seed(77, {1}));
  double now = 0;
  for (int i = 0; i < 1000; ++i) {
    json doc{{"seq", i}, {"units", rng.next_u64() % 500}, {"note", std::string(1 + rng.next_u64() % 20, 'x')}};
    now = conn.post_shared_info(company, doc, add_days(parse_iso_date("2020-03-01"), i % 60), {}, now).mined_at;
  }
  int authentic = 0;
  std::vector<connector::SharedInfo> records;
  for (std::uint64_t id = 0; id < 1000; ++id) {
    records.push_back(conn.get_shared_info(address.id, id));
    authentic += conn.verify_shared_info(records.back()) == connector::VerifyStatus::Authentic;
  }
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    auto rec = records[rng.next_u64() % records.size()];
    const std::size_t pos = rng.next_u64() % rec.payload.size();
    rec.payload[pos] = static_cast<char>(rec.payload[pos] ^ static_cast<char>(1 + rng.next_u64() % 255));
    mismatches += conn.verify_shared_info(rec) == connector::VerifyStatus::HashMismatch;
  }
  int absent = 0;
  for (int i = 0; i < 10; ++i) {
    auto rec = records[static_cast<std::size_t>(i)];
    rec.info_id = 1000 + rng.next_u64() % 1000000;
    absent += conn.verify_shared_info(rec) == connector::VerifyStatus::NotOnChain;
  }
  const double secs = seconds_since(t0);
  return {authentic == 1000 && mismatches == 100 && absent == 10 && secs < 10,
          fmt("%d/1000 authentic, %d/100 mutations hash_mismatch, %d/10 fabricated not_on_chain, %.2f s", authentic,
              mismatches, absent, secs)};
}

// Replays a trace into fill-rate and cost accumulators while the world runs.
struct Replay {
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::int64_t>> stock;
  std::vector<sim::NodeMetrics> metrics;
  bool stock_consistent = true;

  void operator()(const json& rec) {
    const std::string kind = rec.at("kind");
    if (kind == "mine") return;
    const std::size_t n = index.at(rec.at("node"));
    const std::size_t k = rec.at("item");
    auto& m = metrics[n];
    if (kind == "sale") {
      const std::int64_t q = rec.at("qty");
      const double value = static_cast<double>(q) * rec.at("price").get<double>();
      if (rec.at("served").get<bool>()) {
        stock[n][k] -= q;
        m.revenue += value;
      } else {
        m.missing_revenue += value;
      }
      m.fill.record(rec.at("served").get<bool>());
    } else if (kind == "po_fulfilled") {
      const std::int64_t q = rec.at("qty"), ordered = rec.at("ordered");
      stock[n][k] -= q;
      m.fill.record(q == ordered);
    } else if (kind == "receipt") {
      const std::int64_t q = rec.at("qty");
      stock[n][k] += q;
      m.purchase_spend += static_cast<double>(q) * rec.at("price").get<double>();
    } else if (kind == "po_emitted" || kind == "mfg_order") {
      ++m.orders_emitted;
    } else if (kind == "eod") {
      stock_consistent = stock_consistent && rec.at("on_hand").get<std::int64_t>() == stock[n][k];
      m.on_hand_integral += static_cast<double>(stock[n][k]);
    }
  }
};

struct FullReplication {
  std::optional<ledger::ChainError> chain_error;
  std::vector<ledger::Block> blocks;
  bool replay_exact = false;
  std::string replay_detail;
};

// One full-size B-IS replication, traced and replayed on the fly.
FullReplication& full_bis_replication() {
  static FullReplication out = [] {
    FullReplication r;
    sim::SimConfig c;
    c.mode = sim::SharingMode::BIS;
    auto replay = std::make_shared<Replay>();
    sim::World w(c, 0, sim::draw_prices(c), [replay](const json& rec) { (*replay)(rec); });
    replay->metrics.resize(c.nodes());
    replay->stock.assign(c.nodes(), std::vector<std::int64_t>(c.items));
    for (std::size_t n = 0; n < c.nodes(); ++n) {
      replay->index[w.node_name(n)] = n;
      for (std::size_t k = 0; k < c.items; ++k) replay->stock[n][k] = w.item_state(n, k).on_hand;
    }
    w.run();
    r.chain_error = w.connector()->verify_chain();
    const auto& blocks = w.connector()->ledger().blocks();
    r.blocks.assign(blocks.begin(), blocks.end());

    std::size_t fill_ok = 0, tic_ok = 0;
    for (std::size_t n = 0; n < c.nodes(); ++n) {
      const auto& online = w.metrics()[n];
      const auto& mine = replay->metrics[n];
      fill_ok += mine.fill == online.fill;
      const auto& costs = w.is_wholesaler(n) ? c.wholesaler.policy.costs : c.retailer.policy.costs;
      auto tic = [&](const sim::NodeMetrics& m) {
        return inventory::total_inventory_cost(inventory::poe_cost(costs), m.orders_emitted,
                                               inventory::storage_rate(costs), m.on_hand_integral, m.purchase_spend);
      };
      tic_ok += tic(mine) == tic(online);
    }
    r.replay_exact = fill_ok == c.nodes() && tic_ok == c.nodes() && replay->stock_consistent;
    r.replay_detail = fmt("trace replay: FSO/TO %zu/%zu nodes exact, TIC %zu/%zu nodes exact", fill_ok, c.nodes(),
                          tic_ok, c.nodes());
    return r;
  }();
  return out;
}

Verdict chain_integrity() {
  auto& rep = full_bis_replication();
  RngStream rng(derive_seed(77, {2}));
  int detected = 0;
  for (int i = 0; i < 20; ++i) {
    auto blocks = rep.blocks;
    const std::size_t at = rng.next_u64() % blocks.size();
    auto& b = blocks[at];
    switch (rng.next_u64() % 4) {
      case 0: b.timestamp += 1 + static_cast<double>(rng.next_u64() % 100); break;
      case 1: b.prev_hash[rng.next_u64() % b.prev_hash.size()] ^= 0x01; break;
      case 2:
        if (!b.transactions.empty()) {
          auto& sig = b.transactions[rng.next_u64() % b.transactions.size()].signature;
          sig[rng.next_u64() % sig.size()] ^= 0x80;
        } else {
          b.index += 1;
        }
        break;
      default: b.block_hash[rng.next_u64() % b.block_hash.size()] ^= 0x10; break;
    }
    const auto err = ledger::verify_chain(std::span<const ledger::Block>(blocks));
    detected += err && err->index == at;
  }
  return {!rep.chain_error && detected == 20,
          fmt("%zu blocks verify %s; %d/20 injected mutations located at the mutated block", rep.blocks.size(),
              rep.chain_error ? "FAILED" : "ok", detected)};
}

Verdict voting_rule() {
  std::size_t sequences = 0, mismatches = 0;
  for (std::size_t n = 1; n <= 8; ++n) {
    std::size_t quorum = 0;
    while (2 * quorum <= n) ++quorum;  // smallest count above half
    if (ledger::majority_threshold(n) != quorum) ++mismatches;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      for (bool reversed : {false, true}) {
        ledger::ContractState s;
        for (std::size_t i = 0; i < n; ++i) s.bootstrap_authorized("v" + std::to_string(i));
        s.request_authorization("x");
        std::size_t yes = 0, no = 0;
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t i = reversed ? n - 1 - j : j;
          const bool approve = (mask >> i) & 1u;
          (approve ? yes : no)++;
          const auto got = s.apply_vote("v" + std::to_string(i), "x", approve);
          const auto want = yes >= quorum  ? ledger::AuthorizationStatus::Authorized
                            : no >= quorum ? ledger::AuthorizationStatus::Denied
                                           : ledger::AuthorizationStatus::Pending;
          if (got != want) ++mismatches;
          if (got != ledger::AuthorizationStatus::Pending) break;
        }
        ++sequences;
      }
    }
  }
  return {mismatches == 0, fmt("%zu vote sequences over n = 1..8, %zu disagreements", sequences, mismatches)};
}

double enumerated_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = experiments::midranks(pooled);
  const double observed = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(a.size()), 0.0);
  std::vector<bool> pick(pooled.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(a.size()), true);
  std::size_t total = 0, extreme = 0;
  do {
    double w = 0;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      if (pick[i]) w += ranks[i];
    }
    ++total;
    extreme += w >= observed - 1e-9;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

Verdict mann_whitney_oracle() {
  std::size_t cases = 0;
  double worst = 0;
  for (std::size_t n1 = 1; n1 <= 5; ++n1) {
    for (std::size_t n2 = 1; n2 <= 5; ++n2) {
      for (unsigned mask = 0; mask < (1u << (n1 + n2)); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n1 + n2; ++i) (mask >> i & 1 ? a : b).push_back(static_cast<double>(i));
        worst = std::max(worst, std::fabs(experiments::mann_whitney(a, b).p - enumerated_p(a, b)));
        ++cases;
      }
    }
  }
  std::vector<double> high(20), low(20);
  std::iota(high.begin(), high.end(), 1000.0);
  std::iota(low.begin(), low.end(), 1.0);
  const double w = experiments::mann_whitney(high, low).w;
  const double p = experiments::mann_whitney(std::vector<double>{3, 5}, std::vector<double>{1, 2}).p;
  return {worst <= 1e-12 && w == 610 && std::fabs(p - 1.0 / 6.0) <= 1e-12,
          fmt("%zu samples, max |p - enumeration| = %.1e; W = %.2f; p(3,5 vs 1,2) = %.12f", cases, worst, w, p)};
}

int brute_force_review_period(const std::vector<double>& phi, double poe, double st) {
  int best = -1;
  double best_ic = 0;
  for (std::size_t rho = 1; rho <= phi.size(); ++rho) {
    double num = poe, den = 0;
    for (std::size_t j = 1; j <= rho; ++j) {
      num += st * static_cast<double>(j - 1) * phi[j - 1];
      den += phi[j - 1];
    }
    if (den == 0) continue;
    if (best < 0 || num / den < best_ic) {
      best = static_cast<int>(rho);
      best_ic = num / den;
    }
  }
  return best;
}

Verdict review_period_optimizer() {
  RngStream rng(derive_seed(77, {5}));
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> phi(1 + rng.next_u64() % 30);
    for (auto& x : phi) x = rng.uniform01() < 0.1 ? 0.0 : rng.uniform(0, 50);
    phi[rng.next_u64() % phi.size()] = rng.uniform(1, 50);
    const double poe = rng.uniform(0, 300), st = rng.uniform(0, 3);
    agree += inventory::optimize_review_period(phi, poe, st) == brute_force_review_period(phi, poe, st);
  }
  const int fixture = inventory::optimize_review_period(std::vector<double>(30, 8.0), 100, 1);
  return {agree == 1000 && fixture == 5, fmt("%d/1000 random instances match; constant-demand fixture gives %d", agree,
                                             fixture)};
}

Verdict pending_time_sampler() {
  const ledger::PendingTimeModel model;
  RngStream rng(derive_seed(77, {6}));
  double sum = 0, lo = 1e9, hi = 0;
  for (int i = 0; i < 100000; ++i) {
    const double t = model.sample(rng);
    sum += t;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  const double mean = sum / 100000;
  return {lo >= 2 && hi <= 146 && std::fabs(mean - 16.3) <= 0.5,
          fmt("range [%.2f, %.2f] s, mean %.3f s", lo, hi, mean)};
}

Verdict cost_arithmetic() {
  const ledger::GasPricing pricing;
  const auto r90 = experiments::cost_row("r", 90, pricing);
  const auto r3600 = experiments::cost_row("t", 3600, pricing);
  bool linear = true;
  for (double a : {0.0, 1.0, 90.0, 600.0}) {
    for (double b : {0.0, 60.0, 3600.0}) {
      const auto sum = experiments::cost_row("", a + b, pricing);
      const auto x = experiments::cost_row("", a, pricing), y = experiments::cost_row("", b, pricing);
      linear = linear && std::fabs(sum.cost_min - x.cost_min - y.cost_min) < 1e-9 &&
               std::fabs(sum.cost_avg - x.cost_avg - y.cost_avg) < 1e-9 &&
               std::fabs(sum.cost_max - x.cost_max - y.cost_max) < 1e-9;
    }
  }
  const std::string s90 = fmt("%.2f", r90.cost_avg), s3600 = fmt("%.2f", r3600.cost_avg);
  return {s90 == "83.70" && s3600 == "3348.00" && linear,
          fmt("90 tx -> %s EUR, 3600 tx -> %s EUR, linear %s", s90.c_str(), s3600.c_str(), linear ? "yes" : "no")};
}

Verdict directional_result() {
  auto& p = paired();
  const auto& no_is = p.runs[0];
  const auto& b_is = p.runs[1];
  const auto fr_no = experiments::fill_rates(no_is, Role::Retailer);
  const auto fr_b = experiments::fill_rates(b_is, Role::Retailer);
  const auto fr_test = experiments::mann_whitney(fr_b, fr_no);
  const double mean_no = std::accumulate(fr_no.begin(), fr_no.end(), 0.0) / static_cast<double>(fr_no.size());
  const double mean_b = std::accumulate(fr_b.begin(), fr_b.end(), 0.0) / static_cast<double>(fr_b.size());
  const double gain_pp = (mean_b - mean_no) * 100;
  const bool a = fr_test.p < 0.05 && std::fabs(gain_pp - 11.7) <= 8;

  const auto w_no = experiments::fill_rate_summary(no_is, Role::Wholesaler).mean.value_or(0);
  const auto w_b = experiments::fill_rate_summary(b_is, Role::Wholesaler).mean.value_or(0);
  const bool b = w_b >= 0.95 && w_no <= 0.80;

  const auto rp = experiments::mann_whitney(experiments::profits(b_is, Role::Retailer),
                                            experiments::profits(no_is, Role::Retailer));
  const bool c = rp.p < 0.05;
  const auto wp = experiments::mann_whitney(experiments::profits(b_is, Role::Wholesaler),
                                            experiments::profits(no_is, Role::Wholesaler));
  const bool d = wp.p >= 0.05;
  const bool fast = p.seconds < 300;

  return {a && b && c && d && fast,
          fmt("(a) %s retailer FR %.4f -> %.4f (%+.2f pp), p = %.4g; (b) %s wholesaler FR %.4f -> %.4f; "
              "(c) %s retailer profit p = %.4g; (d) %s wholesaler profit p = %.4g; %s %.1f s",
              a ? "ok" : "miss", mean_no, mean_b, gain_pp, fr_test.p, b ? "ok" : "miss", w_no, w_b, c ? "ok" : "miss",
              rp.p, d ? "ok" : "miss", wp.p, fast ? "ok" : "slow", p.seconds)};
}

Verdict bis_reduction() {
  sim::SimConfig no_is;
  sim::SimConfig silent = no_is;
  silent.mode = sim::SharingMode::BIS;
  silent.retailer_posting = false;
  std::vector<std::string> a, b;
  sim::World wa(no_is, 0, sim::draw_prices(no_is), [&](const json& r) { a.push_back(r.dump()); });
  sim::World wb(silent, 0, sim::draw_prices(silent), [&](const json& r) { b.push_back(r.dump()); });
  std::size_t records = 0;
  bool same = true;
  while (!wa.finished() && same) {
    wa.run_day();
    wb.run_day();
    same = a == b;
    records += a.size();
    a.clear();
    b.clear();
  }
  same = same && wb.finished() && wa.metrics() == wb.metrics();
  return {same, fmt("%zu trace records over %d days %s", records, no_is.days, same ? "identical" : "differ")};
}

Verdict misconduct() {
  auto& p = paired();
  const auto distorted =
      experiments::run_experiment(experiments::make_scenario(p.base, sim::SharingMode::BIS,
                                                             experiments::DistortionUse::Applied));
  const auto c = experiments::compare_distortion(p.runs[1], distorted, 0);
  std::string per_rep;
  for (std::size_t i = 0; i < c.honest_fill_rate.size(); ++i) {
    per_rep += fmt("%s%.4f->%.4f", i ? ", " : "", c.honest_fill_rate[i], c.distorted_fill_rate[i]);
  }
  return {c.replications_lower >= 2 && std::fabs(c.others_change_pp) < 2,
          fmt("%s FR honest->distorted [%s], lower in %d/%zu; other retailers %+.3f pp", c.retailer.c_str(),
              per_rep.c_str(), c.replications_lower, c.honest_fill_rate.size(), c.others_change_pp)};
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  auto& p = paired();
  const auto again = experiments::run_experiments(
      std::vector<experiments::ScenarioConfig>{p.runs[0].config, p.runs[1].config},
      {experiments::Execution::Serial, {}});
  const auto root = fs::temp_directory_path() / "chainsim-acceptance";
  fs::remove_all(root);
  experiments::emit_report(p.runs[0], p.runs[1], root / "first");
  experiments::emit_report(again[0], again[1], root / "second");
  std::size_t files = 0, identical = 0;
  for (const auto& entry : fs::directory_iterator(root / "first")) {
    ++files;
    identical += slurp(entry.path()) == slurp(root / "second" / entry.path().filename());
  }
  auto& rep = full_bis_replication();
  return {files > 0 && identical == files && rep.replay_exact,
          fmt("%zu/%zu report files byte-identical; %s", identical, files, rep.replay_detail.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"certification round trip and tamper detection", certification_round_trip},
      {"chain integrity", chain_integrity},
      {"voting rule", voting_rule},
      {"Mann-Whitney oracle", mann_whitney_oracle},
      {"review-period optimizer", review_period_optimizer},
      {"pending-time sampler", pending_time_sampler},
      {"cost arithmetic", cost_arithmetic},
      {"directional scenario result", directional_result},
      {"B-IS reduction", bis_reduction},
      {"misconduct experiment", misconduct},
      {"determinism", determinism},
  };
  int failed = 0, errors = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
      ++errors;
    }
    failed += !v.pass;
    std::printf("criterion %zu: %s  %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %zu passed, %d failed\n", criteria.size(), criteria.size() - failed, failed);
  if (errors) return 1;
  return strict && failed ? 1 : 0;
}
