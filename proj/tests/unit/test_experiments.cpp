#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "chainsim/experiments/report.hpp"
#include "chainsim/experiments/runner.hpp"
#include "chainsim/experiments/stats.hpp"
#include "chainsim/sim/world.hpp"

using namespace chainsim;
using namespace chainsim::experiments;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// P(W >= observed) by listing every split of the pooled sample.
double enumerated_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);
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
    if (w >= observed - 1e-9) ++extreme;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

ScenarioConfig small(sim::SharingMode mode, int days = 6, int reps = 2) {
  ScenarioConfig s;
  s.sim.mode = mode;
  s.sim.days = days;
  s.sim.wholesalers = 2;
  s.sim.retailers = 5;
  s.sim.items = 3;
  s.replications = reps;
  s.name = std::string(sim::to_string(mode));
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n - 1;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("chainsim-exp-" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("scenario defaults describe the reference network") {
  ScenarioConfig s;
  CHECK(s.replications == 3);
  CHECK(s.sim.days == 60);
  CHECK(s.sim.wholesalers == 3);
  CHECK(s.sim.retailers == 20);
  CHECK(s.sim.items == 60);
  CHECK_NOTHROW(s.validate());
  const auto parsed = scenario_from_json(json::object());
  CHECK(scenario_to_json(parsed) == scenario_to_json(s));
}

TEST_CASE("scenario JSON") {
  SUBCASE("round trip") {
    ScenarioConfig s = small(sim::SharingMode::BIS);
    s.sim.distortion[2] = 0.5;
    s.sim.retailer.policy.ses_alpha = 0.25;
    s.sim.wholesaler.fulfilment_min = 0.8;
    s.sim.gas_tier = ledger::GasTier::Max;
    s.sim.gas_pricing.max_eur = 20;
    const json j = scenario_to_json(s);
    const auto back = scenario_from_json(j);
    CHECK(scenario_to_json(back) == j);
    CHECK(back.sim.distortion.at(2) == 0.5);
    CHECK(back.sim.mode == sim::SharingMode::BIS);
    CHECK(j["distortion"]["R3"] == 0.5);
  }
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(scenario_from_json(json{{"dayz", 3}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"retailer", {{"lead_tme", 3}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"gas_cost_eur", {{"median", 1}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"distortion", {{"W1", 0.5}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"distortion", {{"R0", 0.5}}}}), ConfigError);
  }
  SUBCASE("types and ranges") {
    CHECK_THROWS_AS(scenario_from_json(json{{"days", "sixty"}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"days", 2.5}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"items", -1}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"replications", 0}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"mode", "sometimes"}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"gas_tier", "cheap"}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json::array()), ConfigError);
  }
  SUBCASE("scenario kinds") {
    CHECK(parse_scenario_kind("both") == ScenarioKind::Both);
    CHECK_THROWS_AS(parse_scenario_kind("all"), ConfigError);
    const auto d = make_scenario(small(sim::SharingMode::NoIS), sim::SharingMode::BIS, DistortionUse::Applied);
    CHECK(d.name == "b-is-distorted");
    CHECK(d.sim.distortion.at(0) == 0.5);
    CHECK(make_scenario(d, sim::SharingMode::NoIS, DistortionUse::None).sim.distortion.empty());
  }
}

TEST_CASE("midranks and median") {
  const std::vector<double> v{10, 20, 20, 5, 20};
  CHECK(midranks(v) == std::vector<double>{2, 4, 4, 1, 4});
  CHECK(median(std::vector<double>{3, 1, 2}) == 2);
  CHECK(median(std::vector<double>{4, 1, 2, 3}) == 2.5);
  CHECK_THROWS_AS(median(std::vector<double>{}), EmptySample);
  CHECK_THROWS_AS(mann_whitney(std::vector<double>{}, std::vector<double>{1}), EmptySample);
}

TEST_CASE("exact Mann-Whitney matches enumeration for every tie-free sample up to 5 vs 5") {
  for (std::size_t n1 = 1; n1 <= 5; ++n1) {
    for (std::size_t n2 = 1; n2 <= 5; ++n2) {
      const std::size_t n = n1 + n2;
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n; ++i) (mask >> i & 1 ? a : b).push_back(static_cast<double>(i) * 1.5);
        const auto r = mann_whitney(a, b);
        CHECK(r.exact);
        CHECK(std::fabs(r.p - enumerated_p(a, b)) < 1e-12);
      }
    }
  }
}

TEST_CASE("exact Mann-Whitney matches enumeration with ties") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> value(0, 4), size(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(size(rng))), b(static_cast<std::size_t>(size(rng)));
    for (auto& x : a) x = value(rng);
    for (auto& x : b) x = value(rng);
    CHECK(std::fabs(mann_whitney_exact(a, b).p - enumerated_p(a, b)) < 1e-12);
  }
}

TEST_CASE("Mann-Whitney reference values") {
  const auto r = mann_whitney(std::vector<double>{3, 5}, std::vector<double>{1, 2});
  CHECK(r.w == 7);
  CHECK(r.u == 4);
  CHECK(std::fabs(r.p - 1.0 / 6.0) < 1e-12);
  CHECK(r.median_difference == 2.5);

  std::vector<double> high(20), low(20);
  std::iota(high.begin(), high.end(), 100.0);
  std::iota(low.begin(), low.end(), 1.0);
  const auto big = mann_whitney(high, low);
  CHECK(big.w == 610);
  CHECK(big.u == 400);
  CHECK_FALSE(big.exact);
  CHECK(big.p < 1e-6);

  const std::vector<double> same(6, 4.0);
  CHECK(mann_whitney(same, same).p >= 0.5);
  CHECK(mann_whitney_normal(same, same).p >= 0.5);
  CHECK(mann_whitney(high, high).p >= 0.5);
}

TEST_CASE("normal approximation stays close to the exact distribution") {
  for (std::size_t n1 = 3; n1 <= 6; ++n1) {
    for (std::size_t n2 = 3; n2 <= 6; ++n2) {
      double worst = 0;
      for (unsigned mask = 0; mask < (1u << (n1 + n2)); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n1 + n2; ++i) (mask >> i & 1 ? a : b).push_back(static_cast<double>(i));
        worst = std::max(worst, std::fabs(mann_whitney_exact(a, b).p - mann_whitney_normal(a, b).p));
      }
      CHECK_MESSAGE(worst < 0.02, "n1 = " << n1 << ", n2 = " << n2);
    }
  }
}

TEST_CASE("blockchain cost rows are linear in the transaction count") {
  const ledger::GasPricing pricing;
  CHECK(cost_row("r", 90, pricing).cost_avg == doctest::Approx(83.7));
  CHECK(cost_row("t", 3600, pricing).cost_avg == doctest::Approx(3348.0));
  CHECK(cost_row("w", 600, pricing).cost_max == doctest::Approx(11640.0));
  CHECK(cost_row("w", 600, pricing).cost_min == doctest::Approx(6.0));
  for (double a : {0.0, 1.0, 17.0, 90.0}) {
    for (double b : {0.0, 5.0, 600.0}) {
      CHECK(cost_row("", a + b, pricing).cost_max ==
            doctest::Approx(cost_row("", a, pricing).cost_max + cost_row("", b, pricing).cost_max));
    }
  }
  const auto row = cost_row("", 10, pricing, 500, 5);
  CHECK(row.pending_time_per_day == 100);
}

TEST_CASE("paired runs: accounting, costs and execution modes") {
  const std::vector<ScenarioConfig> pair{small(sim::SharingMode::NoIS), small(sim::SharingMode::BIS)};
  const auto runs = run_experiments(pair, {Execution::Parallel, {}});
  REQUIRE(runs.size() == 2);
  const auto& no_is = runs[0];
  const auto& b_is = runs[1];
  CHECK(no_is.nodes.size() == 2 * 7);

  for (const auto* run : {&no_is, &b_is}) {
    for (const auto& n : run->nodes) {
      CHECK(n.profit + n.total_cost == doctest::Approx(n.revenue).epsilon(1e-12));
      CHECK(n.total_cost == doctest::Approx(n.inventory_cost + n.blockchain_cost));
      CHECK(n.fully_satisfied <= n.total_orders);
      if (n.fill_rate) CHECK(*n.fill_rate == doctest::Approx(double(n.fully_satisfied) / double(n.total_orders)));
    }
  }
  for (const auto& n : no_is.nodes) {
    CHECK(n.blockchain_cost == 0);
    CHECK(n.tx_count == 0);
  }
  const double per_tx = b_is.config.sim.gas_pricing.per_tx_eur(ledger::GasTier::Max);
  for (const auto* n : b_is.of_role(Role::Retailer)) {
    CHECK(n->tx_count == 6);  // one post per day
    CHECK(n->blockchain_cost == doctest::Approx(6 * per_tx));
    CHECK(n->pending_time >= 6 * 2.0);
    CHECK(n->pending_time <= 6 * 146.0);
  }
  for (const auto* n : b_is.of_role(Role::Wholesaler)) CHECK(n->tx_count == 0);

  SUBCASE("serial and parallel agree") {
    const auto serial = run_experiments(pair, {Execution::Serial, {}});
    CHECK(serial[0].nodes == no_is.nodes);
    CHECK(serial[1].nodes == b_is.nodes);
  }

  SUBCASE("cost table") {
    const auto t = blockchain_cost_summary(b_is);
    CHECK(t.nodes.size() == 7);
    CHECK(t.retailers.tx_count == 5 * 6);
    CHECK(t.wholesalers.tx_count == 0);
    CHECK(t.total.cost_max == doctest::Approx(30 * per_tx));
    REQUIRE(t.reference.size() == 3);
    CHECK(t.reference[2].cost_avg == doctest::Approx(3348.0));
  }

  SUBCASE("averaging") {
    const auto avg = b_is.averaged(Role::Retailer);
    REQUIRE(avg.size() == 5);
    double profit = 0;
    for (const auto* n : b_is.of_role(Role::Retailer)) {
      if (n->node == "R1") profit += n->profit;
    }
    CHECK(avg[0].node == "R1");
    CHECK(avg[0].profit == doctest::Approx(profit / 2));
    CHECK(avg[0].tx_count == 12);
    CHECK(profits(b_is, Role::Retailer).size() == 5);
  }

  SUBCASE("reports are deterministic and complete") {
    const auto a = scratch("report-a");
    const auto b = scratch("report-b");
    emit_report(no_is, b_is, a);
    const auto serial = run_experiments(pair, {Execution::Serial, {}});
    const json summary = emit_report(serial[0], serial[1], b);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      CHECK_MESSAGE(slurp(entry.path()) == slurp(b / entry.path().filename()), entry.path().filename().string());
    }
    CHECK(files >= 12);
    CHECK(data_rows(a / "mwu_retailer_profit.csv") == 5);
    CHECK(data_rows(a / "mwu_wholesaler_profit.csv") == 2);
    CHECK(data_rows(a / "results-b-is.csv") == 14);
    CHECK(summary.contains("mann_whitney"));
  }

  SUBCASE("results survive a JSON round trip") {
    const auto back = results_from_json(results_to_json(runs));
    REQUIRE(back.size() == 2);
    CHECK(back[1].nodes == b_is.nodes);
    CHECK(scenario_to_json(back[1].config) == scenario_to_json(b_is.config));
  }
}

TEST_CASE("paired scenarios see the same customers") {
  auto sales = [](const ScenarioConfig& s) {
    std::ostringstream os;
    sim::World w(s.sim, 0, sim::draw_prices(s.sim), sim::jsonl_sink(os));
    w.run();
    std::istringstream in(os.str());
    std::vector<json> out;
    for (std::string line; std::getline(in, line);) {
      auto j = json::parse(line);
      if (j["kind"] == "sale") out.push_back({j["t"], j["node"], j["item"], j["qty"]});
    }
    return out;
  };
  const auto a = sales(small(sim::SharingMode::NoIS, 8));
  const auto b = sales(small(sim::SharingMode::BIS, 8));
  CHECK_FALSE(a.empty());
  CHECK(a == b);
}

TEST_CASE("fill-rate summary and distortion comparison") {
  ScenarioResults honest, distorted;
  auto node = [](std::size_t rep, std::string name, Role role, std::uint64_t fso, std::uint64_t to) {
    NodeResult n;
    n.replication = rep;
    n.node = std::move(name);
    n.role = role;
    n.fully_satisfied = fso;
    n.total_orders = to;
    if (to) n.fill_rate = double(fso) / double(to);
    return n;
  };
  for (std::size_t rep = 0; rep < 2; ++rep) {
    honest.nodes.push_back(node(rep, "W1", Role::Wholesaler, 9, 10));
    honest.nodes.push_back(node(rep, "W2", Role::Wholesaler, 0, 0));
    honest.nodes.push_back(node(rep, "R1", Role::Retailer, 8, 10));
    honest.nodes.push_back(node(rep, "R2", Role::Retailer, 9, 10));
    distorted.nodes.push_back(node(rep, "R1", Role::Retailer, rep == 0 ? 6 : 8, 10));
    distorted.nodes.push_back(node(rep, "R2", Role::Retailer, 10, 10));
  }
  const auto w = fill_rate_summary(honest, Role::Wholesaler);
  CHECK(*w.mean == doctest::Approx(0.9));  // W2 received no orders
  CHECK(*w.pooled == doctest::Approx(0.9));
  CHECK(fill_rates(honest, Role::Wholesaler).size() == 1);

  const auto c = compare_distortion(honest, distorted, 0);
  CHECK(c.retailer == "R1");
  CHECK(c.replications_lower == 1);
  CHECK(c.others_honest_mean == doctest::Approx(0.9));
  CHECK(c.others_distorted_mean == doctest::Approx(1.0));
  CHECK(c.others_change_pp == doctest::Approx(10.0));
  CHECK_THROWS_AS(compare_distortion(honest, distorted, 4), std::invalid_argument);
}
