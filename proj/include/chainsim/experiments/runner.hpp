#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chainsim/experiments/scenario.hpp"
#include "chainsim/sim/metrics.hpp"

namespace chainsim::experiments {

enum class Role { Wholesaler, Retailer };

/// Economic and inventory indicators for one node in one replication.
struct NodeResult {
  std::size_t replication = 0;
  std::string node;
  Role role = Role::Retailer;
  double revenue = 0;          // R
  double missing_revenue = 0;  // MR
  double inventory_cost = 0;   // TIC
  double blockchain_cost = 0;  // BC at the max tier
  double total_cost = 0;       // TC = TIC + BC
  double profit = 0;           // PM = R - TC
  std::uint64_t fully_satisfied = 0;
  std::uint64_t total_orders = 0;
  std::optional<double> fill_rate;  // empty when the node received no orders
  double average_position = 0;      // IP per item per day
  double average_inventory_cost = 0;  // AIC: TIC per day per item
  std::uint64_t orders_emitted = 0;
  std::uint64_t tx_count = 0;
  double pending_time = 0;  // seconds

  friend bool operator==(const NodeResult&, const NodeResult&) = default;
};

struct ScenarioResults {
  ScenarioConfig config;
  std::vector<NodeResult> nodes;  // replication-major, wholesalers first

  /// Node results of one role, all replications.
  std::vector<const NodeResult*> of_role(Role role) const;
  /// One row per node over all replications, in node order: amounts and
  /// ratios are means, counters are totals.
  std::vector<NodeResult> averaged(Role role) const;
};

NodeResult summarize_node(const sim::SimConfig& config, std::size_t replication, std::size_t node,
                          const std::string& name, const sim::NodeMetrics& metrics);

enum class Execution { Serial, Parallel };

struct RunOptions {
  Execution execution = Execution::Parallel;
  /// When set, every replication writes trace-<scenario>-<rep>.jsonl here.
  std::optional<std::filesystem::path> trace_dir;
};

/// Runs every replication of every scenario. Replication r of each scenario
/// uses the same seeds, so paired scenarios see the same customers.
std::vector<ScenarioResults> run_experiments(std::span<const ScenarioConfig> scenarios, const RunOptions& options = {});
ScenarioResults run_experiment(const ScenarioConfig& scenario, const RunOptions& options = {});

}  // namespace chainsim::experiments
