#include "chainsim/experiments/runner.hpp"

#include <fstream>
#include <map>

#include "chainsim/inventory/costs.hpp"
#include "chainsim/sim/world.hpp"

namespace chainsim::experiments {

NodeResult summarize_node(const sim::SimConfig& config, std::size_t replication, std::size_t node,
                          const std::string& name, const sim::NodeMetrics& m) {
  const bool wholesaler = node < config.wholesalers;
  const auto& costs = wholesaler ? config.wholesaler.policy.costs : config.retailer.policy.costs;
  NodeResult r;
  r.replication = replication;
  r.node = name;
  r.role = wholesaler ? Role::Wholesaler : Role::Retailer;
  r.revenue = m.revenue;
  r.missing_revenue = m.missing_revenue;
  r.inventory_cost = inventory::total_inventory_cost(inventory::poe_cost(costs), m.orders_emitted,
                                                     inventory::storage_rate(costs), m.on_hand_integral,
                                                     m.purchase_spend);
  r.blockchain_cost = static_cast<double>(m.tx_count) * config.gas_pricing.per_tx_eur(ledger::GasTier::Max);
  r.total_cost = r.inventory_cost + r.blockchain_cost;
  r.profit = r.revenue - r.total_cost;
  r.fully_satisfied = m.fill.fully_satisfied;
  r.total_orders = m.fill.total;
  if (m.fill.total > 0) r.fill_rate = inventory::fill_rate(m.fill);
  if (m.position_samples > 0) r.average_position = m.position_sum / static_cast<double>(m.position_samples);
  r.average_inventory_cost = r.inventory_cost / (static_cast<double>(config.days) * static_cast<double>(config.items));
  r.orders_emitted = m.orders_emitted;
  r.tx_count = m.tx_count;
  r.pending_time = m.pending_time;
  return r;
}

std::vector<const NodeResult*> ScenarioResults::of_role(Role role) const {
  std::vector<const NodeResult*> out;
  for (const auto& n : nodes) {
    if (n.role == role) out.push_back(&n);
  }
  return out;
}

std::vector<NodeResult> ScenarioResults::averaged(Role role) const {
  std::vector<NodeResult> out;
  std::map<std::string, std::size_t> slot;
  std::vector<int> reps, rated;
  for (const NodeResult* n : of_role(role)) {
    auto [it, fresh] = slot.try_emplace(n->node, out.size());
    if (fresh) {
      NodeResult blank;
      blank.node = n->node;
      blank.role = role;
      out.push_back(blank);
      reps.push_back(0);
      rated.push_back(0);
    }
    NodeResult& a = out[it->second];
    ++reps[it->second];
    a.revenue += n->revenue;
    a.missing_revenue += n->missing_revenue;
    a.inventory_cost += n->inventory_cost;
    a.blockchain_cost += n->blockchain_cost;
    a.total_cost += n->total_cost;
    a.profit += n->profit;
    a.fully_satisfied += n->fully_satisfied;
    a.total_orders += n->total_orders;
    if (n->fill_rate) {
      a.fill_rate = a.fill_rate.value_or(0.0) + *n->fill_rate;
      ++rated[it->second];
    }
    a.average_position += n->average_position;
    a.average_inventory_cost += n->average_inventory_cost;
    a.orders_emitted += n->orders_emitted;
    a.tx_count += n->tx_count;
    a.pending_time += n->pending_time;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    NodeResult& a = out[i];
    const double k = reps[i];
    a.revenue /= k;
    a.missing_revenue /= k;
    a.inventory_cost /= k;
    a.blockchain_cost /= k;
    a.total_cost /= k;
    a.profit /= k;
    a.average_position /= k;
    a.average_inventory_cost /= k;
    if (a.fill_rate) *a.fill_rate /= rated[i];
  }
  return out;
}

namespace {

std::vector<NodeResult> run_replication(const ScenarioConfig& s, std::size_t rep, const RunOptions& options) {
  std::ofstream trace_file;
  sim::TraceSink sink;
  if (options.trace_dir) {
    const auto path = *options.trace_dir / ("trace-" + s.name + "-" + std::to_string(rep) + ".jsonl");
    trace_file.open(path);
    if (!trace_file) throw std::runtime_error("cannot write " + path.string());
    sink = sim::jsonl_sink(trace_file);
  }
  sim::World world(s.sim, rep, sim::draw_prices(s.sim), sink);
  world.run();
  std::vector<NodeResult> out;
  for (std::size_t n = 0; n < s.sim.nodes(); ++n) {
    out.push_back(summarize_node(s.sim, rep, n, world.node_name(n), world.metrics()[n]));
  }
  return out;
}

}  // namespace

std::vector<ScenarioResults> run_experiments(std::span<const ScenarioConfig> scenarios, const RunOptions& options) {
  struct Task {
    std::size_t scenario, replication;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    scenarios[i].validate();
    for (int r = 0; r < scenarios[i].replications; ++r) tasks.push_back({i, static_cast<std::size_t>(r)});
  }
  std::vector<std::vector<NodeResult>> done(tasks.size());
  std::vector<std::string> errors(tasks.size());

  auto work = [&](std::size_t t) {
    try {
      done[t] = run_replication(scenarios[tasks[t].scenario], tasks[t].replication, options);
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  };
  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
  if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < count; ++t) work(static_cast<std::size_t>(t));
  } else {
    for (std::ptrdiff_t t = 0; t < count; ++t) work(static_cast<std::size_t>(t));
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }

  std::vector<ScenarioResults> out(scenarios.size());
  for (std::size_t i = 0; i < scenarios.size(); ++i) out[i].config = scenarios[i];
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& nodes = out[tasks[t].scenario].nodes;
    nodes.insert(nodes.end(), done[t].begin(), done[t].end());
  }
  return out;
}

ScenarioResults run_experiment(const ScenarioConfig& scenario, const RunOptions& options) {
  return run_experiments(std::span(&scenario, 1), options).front();
}

}  // namespace chainsim::experiments
