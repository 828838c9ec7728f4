#include "chainsim/experiments/report.hpp"

#include <cstdio>
#include <fstream>

namespace chainsim::experiments {

using nlohmann::json;

namespace {

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s == "-0.00" || s == "-0.0000") s.erase(0, 1);
  return s;
}

std::string percent(const std::optional<double>& v) { return v ? fixed(*v * 100.0) : ""; }

class Csv {
 public:
  Csv(const std::filesystem::path& file, std::initializer_list<std::string> header) : out_(file) {
    if (!out_) throw std::runtime_error("cannot write " + file.string());
    row(std::vector<std::string>(header));
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const std::filesystem::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

const char* role_name(Role r) { return r == Role::Wholesaler ? "wholesaler" : "retailer"; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json node_json(const NodeResult& n) {
  return {{"node", n.node},
          {"revenue", n.revenue},
          {"missing_revenue", n.missing_revenue},
          {"inventory_cost", n.inventory_cost},
          {"blockchain_cost_max", n.blockchain_cost},
          {"total_cost", n.total_cost},
          {"profit", n.profit},
          {"fill_rate", optional_json(n.fill_rate)},
          {"average_position", n.average_position},
          {"average_inventory_cost", n.average_inventory_cost},
          {"tx_count", n.tx_count},
          {"pending_time", n.pending_time}};
}

json cost_json(const CostRow& r) {
  return {{"label", r.label},       {"tx_count", r.tx_count},         {"min", r.cost_min},
          {"avg", r.cost_avg},      {"max", r.cost_max},              {"pending_time", r.pending_time},
          {"pending_time_per_day", r.pending_time_per_day}};
}

json mwu_json(const MannWhitneyResult& r) {
  return {{"n1", r.n1},
          {"n2", r.n2},
          {"median_b_is", r.median_a},
          {"median_no_is", r.median_b},
          {"difference", r.median_difference},
          {"w", r.w},
          {"u", r.u},
          {"p", r.p},
          {"method", r.exact ? "exact" : "normal"}};
}

void economics_table(const std::filesystem::path& file, const std::vector<const ScenarioResults*>& runs, Role role) {
  Csv csv(file, {"scenario", "node", "revenue", "missing_revenue", "inventory_cost", "blockchain_cost_max",
                 "total_cost", "profit"});
  for (const auto* run : runs) {
    for (const auto& n : run->averaged(role)) {
      csv.row({run->config.name, n.node, fixed(n.revenue), fixed(n.missing_revenue), fixed(n.inventory_cost),
               fixed(n.blockchain_cost), fixed(n.total_cost), fixed(n.profit)});
    }
  }
}

void inventory_table(const std::filesystem::path& file, const std::vector<const ScenarioResults*>& runs, Role role) {
  Csv csv(file, {"scenario", "node", "fill_rate_pct", "average_position", "average_inventory_cost",
                 "inventory_cost"});
  for (const auto* run : runs) {
    for (const auto& n : run->averaged(role)) {
      csv.row({run->config.name, n.node, percent(n.fill_rate), fixed(n.average_position),
               fixed(n.average_inventory_cost), fixed(n.inventory_cost)});
    }
  }
}

void paired_panel(const std::filesystem::path& file, const ScenarioResults& no_is, const ScenarioResults& b_is,
                  Role role, bool rates) {
  Csv csv(file, {"node", no_is.config.name, b_is.config.name});
  const auto a = no_is.averaged(role), b = b_is.averaged(role);
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (rates) {
      csv.row({a[i].node, percent(a[i].fill_rate), percent(b[i].fill_rate)});
    } else {
      csv.row({a[i].node, fixed(a[i].profit), fixed(b[i].profit)});
    }
  }
}

}  // namespace

CostRow cost_row(std::string label, double tx_count, const ledger::GasPricing& pricing, double pending_time,
                 int days) {
  CostRow r;
  r.label = std::move(label);
  r.tx_count = tx_count;
  r.cost_min = tx_count * pricing.per_tx_eur(ledger::GasTier::Min);
  r.cost_avg = tx_count * pricing.per_tx_eur(ledger::GasTier::Avg);
  r.cost_max = tx_count * pricing.per_tx_eur(ledger::GasTier::Max);
  r.pending_time = pending_time;
  r.pending_time_per_day = days > 0 ? pending_time / days : 0;
  return r;
}

CostTable blockchain_cost_summary(const ScenarioResults& results) {
  const auto& pricing = results.config.sim.gas_pricing;
  const int days = results.config.sim.days;
  CostTable t;
  double tx[2] = {0, 0}, pending[2] = {0, 0};
  for (Role role : {Role::Wholesaler, Role::Retailer}) {
    for (const auto& n : results.averaged(role)) {
      const double reps = results.config.replications;
      const double count = static_cast<double>(n.tx_count) / reps;
      const double wait = n.pending_time / reps;
      t.nodes.push_back(cost_row(n.node, count, pricing, wait, days));
      tx[role == Role::Retailer] += count;
      pending[role == Role::Retailer] += wait;
    }
  }
  t.wholesalers = cost_row("wholesalers", tx[0], pricing, pending[0], days);
  t.retailers = cost_row("retailers", tx[1], pricing, pending[1], days);
  t.total = cost_row("total", tx[0] + tx[1], pricing, pending[0] + pending[1], days);
  t.reference = {cost_row("reference per retailer", 90, pricing), cost_row("reference per wholesaler", 600, pricing),
                 cost_row("reference total", 3600, pricing)};
  return t;
}

FillRateSummary fill_rate_summary(const ScenarioResults& results, Role role) {
  FillRateSummary s;
  double sum = 0;
  int rated = 0;
  std::uint64_t fso = 0, to = 0;
  for (const auto& n : results.averaged(role)) {
    if (n.fill_rate) {
      sum += *n.fill_rate;
      ++rated;
    }
    fso += n.fully_satisfied;
    to += n.total_orders;
  }
  if (rated) s.mean = sum / rated;
  if (to) s.pooled = static_cast<double>(fso) / static_cast<double>(to);
  return s;
}

std::vector<double> profits(const ScenarioResults& results, Role role) {
  std::vector<double> out;
  for (const auto& n : results.averaged(role)) out.push_back(n.profit);
  return out;
}

std::vector<double> fill_rates(const ScenarioResults& results, Role role) {
  std::vector<double> out;
  for (const auto& n : results.averaged(role)) {
    if (n.fill_rate) out.push_back(*n.fill_rate);
  }
  return out;
}

DistortionComparison compare_distortion(const ScenarioResults& honest, const ScenarioResults& distorted,
                                        std::size_t retailer) {
  DistortionComparison c;
  c.retailer = "R" + std::to_string(retailer + 1);
  for (const NodeResult* n : honest.of_role(Role::Retailer)) {
    if (n->node == c.retailer) c.honest_fill_rate.push_back(n->fill_rate.value_or(0.0));
  }
  for (const NodeResult* n : distorted.of_role(Role::Retailer)) {
    if (n->node == c.retailer) c.distorted_fill_rate.push_back(n->fill_rate.value_or(0.0));
  }
  if (c.honest_fill_rate.empty() || c.honest_fill_rate.size() != c.distorted_fill_rate.size()) {
    throw std::invalid_argument("runs are not paired for retailer " + c.retailer);
  }
  for (std::size_t i = 0; i < c.honest_fill_rate.size(); ++i) {
    if (c.distorted_fill_rate[i] < c.honest_fill_rate[i]) ++c.replications_lower;
  }
  auto others = [&](const ScenarioResults& r) {
    double sum = 0;
    int n = 0;
    for (const auto& node : r.averaged(Role::Retailer)) {
      if (node.node == c.retailer || !node.fill_rate) continue;
      sum += *node.fill_rate;
      ++n;
    }
    return n ? sum / n : 0.0;
  };
  c.others_honest_mean = others(honest);
  c.others_distorted_mean = others(distorted);
  c.others_change_pp = (c.others_distorted_mean - c.others_honest_mean) * 100.0;
  return c;
}

json results_to_json(const std::vector<ScenarioResults>& runs) {
  json out = json::array();
  for (const auto& run : runs) {
    json nodes = json::array();
    for (const auto& n : run.nodes) {
      nodes.push_back({{"replication", n.replication},
                       {"node", n.node},
                       {"role", role_name(n.role)},
                       {"revenue", n.revenue},
                       {"missing_revenue", n.missing_revenue},
                       {"inventory_cost", n.inventory_cost},
                       {"blockchain_cost", n.blockchain_cost},
                       {"total_cost", n.total_cost},
                       {"profit", n.profit},
                       {"fully_satisfied", n.fully_satisfied},
                       {"total_orders", n.total_orders},
                       {"fill_rate", optional_json(n.fill_rate)},
                       {"average_position", n.average_position},
                       {"average_inventory_cost", n.average_inventory_cost},
                       {"orders_emitted", n.orders_emitted},
                       {"tx_count", n.tx_count},
                       {"pending_time", n.pending_time}});
    }
    out.push_back({{"config", scenario_to_json(run.config)}, {"nodes", std::move(nodes)}});
  }
  return out;
}

std::vector<ScenarioResults> results_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("results: expected an array of scenarios");
  std::vector<ScenarioResults> out;
  for (const auto& run : j) {
    ScenarioResults r;
    r.config = scenario_from_json(run.at("config"));
    for (const auto& n : run.at("nodes")) {
      NodeResult x;
      x.replication = n.at("replication").get<std::size_t>();
      x.node = n.at("node").get<std::string>();
      x.role = n.at("role") == "wholesaler" ? Role::Wholesaler : Role::Retailer;
      x.revenue = n.at("revenue").get<double>();
      x.missing_revenue = n.at("missing_revenue").get<double>();
      x.inventory_cost = n.at("inventory_cost").get<double>();
      x.blockchain_cost = n.at("blockchain_cost").get<double>();
      x.total_cost = n.at("total_cost").get<double>();
      x.profit = n.at("profit").get<double>();
      x.fully_satisfied = n.at("fully_satisfied").get<std::uint64_t>();
      x.total_orders = n.at("total_orders").get<std::uint64_t>();
      if (!n.at("fill_rate").is_null()) x.fill_rate = n.at("fill_rate").get<double>();
      x.average_position = n.at("average_position").get<double>();
      x.average_inventory_cost = n.at("average_inventory_cost").get<double>();
      x.orders_emitted = n.at("orders_emitted").get<std::uint64_t>();
      x.tx_count = n.at("tx_count").get<std::uint64_t>();
      x.pending_time = n.at("pending_time").get<double>();
      r.nodes.push_back(std::move(x));
    }
    out.push_back(std::move(r));
  }
  return out;
}

void emit_scenario(const ScenarioResults& results, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string& name = results.config.name;
  {
    Csv csv(out_dir / ("results-" + name + ".csv"),
            {"replication", "node", "role", "revenue", "missing_revenue", "inventory_cost", "blockchain_cost_max",
             "total_cost", "profit", "fill_rate_pct", "fully_satisfied", "total_orders", "average_position",
             "average_inventory_cost", "orders_emitted", "tx_count", "pending_time"});
    for (const auto& n : results.nodes) {
      csv.row({std::to_string(n.replication), n.node, role_name(n.role), fixed(n.revenue), fixed(n.missing_revenue),
               fixed(n.inventory_cost), fixed(n.blockchain_cost), fixed(n.total_cost), fixed(n.profit),
               percent(n.fill_rate), std::to_string(n.fully_satisfied), std::to_string(n.total_orders),
               fixed(n.average_position), fixed(n.average_inventory_cost), std::to_string(n.orders_emitted),
               std::to_string(n.tx_count), fixed(n.pending_time)});
    }
  }
  const CostTable t = blockchain_cost_summary(results);
  Csv csv(out_dir / ("blockchain_costs-" + name + ".csv"),
          {"row", "tx_count", "cost_min", "cost_avg", "cost_max", "pending_time", "pending_time_per_day"});
  auto put = [&](const CostRow& r) {
    csv.row({r.label, fixed(r.tx_count), fixed(r.cost_min), fixed(r.cost_avg), fixed(r.cost_max),
             fixed(r.pending_time), fixed(r.pending_time_per_day)});
  };
  for (const auto& r : t.nodes) put(r);
  put(t.wholesalers);
  put(t.retailers);
  put(t.total);
  for (const auto& r : t.reference) put(r);
}

json emit_report(const ScenarioResults& no_is, const ScenarioResults& b_is, const std::filesystem::path& out_dir) {
  emit_scenario(no_is, out_dir);
  emit_scenario(b_is, out_dir);
  const std::vector<const ScenarioResults*> runs{&no_is, &b_is};
  economics_table(out_dir / "wholesaler_economics.csv", runs, Role::Wholesaler);
  inventory_table(out_dir / "wholesaler_inventory.csv", runs, Role::Wholesaler);
  economics_table(out_dir / "retailer_economics.csv", runs, Role::Retailer);
  inventory_table(out_dir / "retailer_inventory.csv", runs, Role::Retailer);

  json summary;
  {
    Csv csv(out_dir / "fill_rates.csv", {"scenario", "role", "mean_fill_rate_pct", "pooled_fill_rate_pct"});
    for (const auto* run : runs) {
      for (Role role : {Role::Wholesaler, Role::Retailer}) {
        const auto s = fill_rate_summary(*run, role);
        csv.row({run->config.name, role_name(role), percent(s.mean), percent(s.pooled)});
        summary["fill_rate"][run->config.name][role_name(role)] = {{"mean", optional_json(s.mean)},
                                                                   {"pooled", optional_json(s.pooled)}};
      }
    }
  }

  paired_panel(out_dir / "mwu_retailer_profit.csv", no_is, b_is, Role::Retailer, false);
  paired_panel(out_dir / "mwu_retailer_fill_rate.csv", no_is, b_is, Role::Retailer, true);
  paired_panel(out_dir / "mwu_wholesaler_profit.csv", no_is, b_is, Role::Wholesaler, false);
  struct Panel {
    const char* name;
    std::vector<double> b_is, no_is;
  };
  const std::vector<Panel> panels{
      {"retailer_profit", profits(b_is, Role::Retailer), profits(no_is, Role::Retailer)},
      {"retailer_fill_rate", fill_rates(b_is, Role::Retailer), fill_rates(no_is, Role::Retailer)},
      {"wholesaler_profit", profits(b_is, Role::Wholesaler), profits(no_is, Role::Wholesaler)},
  };
  {
    Csv csv(out_dir / "mann_whitney.csv",
            {"panel", "n1", "n2", "median_b_is", "median_no_is", "difference", "w", "u", "p", "method"});
    for (const auto& p : panels) {
      const auto r = mann_whitney(p.b_is, p.no_is);
      const bool rate = std::string_view(p.name) == "retailer_fill_rate";
      const double scale = rate ? 100.0 : 1.0;
      csv.row({p.name, std::to_string(r.n1), std::to_string(r.n2), fixed(r.median_a * scale),
               fixed(r.median_b * scale), fixed(r.median_difference * scale), fixed(r.w), fixed(r.u), fixed(r.p, 4),
               r.exact ? "exact" : "normal"});
      summary["mann_whitney"][p.name] = mwu_json(r);
    }
  }

  for (const auto* run : runs) {
    json& s = summary["scenarios"][run->config.name];
    s["config"] = scenario_to_json(run->config);
    for (Role role : {Role::Wholesaler, Role::Retailer}) {
      json rows = json::array();
      for (const auto& n : run->averaged(role)) rows.push_back(node_json(n));
      s[std::string(role_name(role)) + "s"] = rows;
    }
    const CostTable t = blockchain_cost_summary(*run);
    json costs = json::array();
    for (const auto& r : t.nodes) costs.push_back(cost_json(r));
    s["blockchain_costs"] = {{"nodes", costs},
                             {"wholesalers", cost_json(t.wholesalers)},
                             {"retailers", cost_json(t.retailers)},
                             {"total", cost_json(t.total)}};
  }
  write_json(out_dir / "summary.json", summary);
  return summary;
}

json emit_distortion(const ScenarioResults& honest, const ScenarioResults& distorted,
                     const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  emit_scenario(honest, out_dir);
  emit_scenario(distorted, out_dir);
  json out = json::array();
  Csv csv(out_dir / "distortion.csv",
          {"retailer", "factor", "replication", "honest_fill_rate_pct", "distorted_fill_rate_pct"});
  for (const auto& [r, factor] : distorted.config.sim.distortion) {
    const auto c = compare_distortion(honest, distorted, r);
    for (std::size_t i = 0; i < c.honest_fill_rate.size(); ++i) {
      csv.row({c.retailer, fixed(factor), std::to_string(i), fixed(c.honest_fill_rate[i] * 100.0),
               fixed(c.distorted_fill_rate[i] * 100.0)});
    }
    out.push_back({{"retailer", c.retailer},
                   {"factor", factor},
                   {"honest_fill_rate", c.honest_fill_rate},
                   {"distorted_fill_rate", c.distorted_fill_rate},
                   {"replications_lower", c.replications_lower},
                   {"others_honest_mean", c.others_honest_mean},
                   {"others_distorted_mean", c.others_distorted_mean},
                   {"others_change_pp", c.others_change_pp}});
  }
  write_json(out_dir / "distortion.json", out);
  return out;
}

}  // namespace chainsim::experiments
