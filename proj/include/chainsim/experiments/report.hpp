#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainsim/experiments/runner.hpp"
#include "chainsim/experiments/stats.hpp"
#include "chainsim/ledger/gas.hpp"

namespace chainsim::experiments {

struct CostRow {
  std::string label;
  double tx_count = 0;  // per replication
  double cost_min = 0, cost_avg = 0, cost_max = 0;
  double pending_time = 0;          // seconds per replication
  double pending_time_per_day = 0;  // seconds

  friend bool operator==(const CostRow&, const CostRow&) = default;
};

struct CostTable {
  std::vector<CostRow> nodes;      // measured, one row per node
  CostRow retailers, wholesalers, total;  // measured sums
  std::vector<CostRow> reference;  // 90 tx per retailer, 600 per wholesaler, 3600 in total
};

CostRow cost_row(std::string label, double tx_count, const ledger::GasPricing& pricing, double pending_time = 0,
                 int days = 1);
CostTable blockchain_cost_summary(const ScenarioResults& results);

/// Mean fill rate over nodes that received orders, and the pooled FSO/TO.
struct FillRateSummary {
  std::optional<double> mean;
  std::optional<double> pooled;
};
FillRateSummary fill_rate_summary(const ScenarioResults& results, Role role);

/// Per-node means over replications, used as the Mann-Whitney samples.
std::vector<double> profits(const ScenarioResults& results, Role role);
std::vector<double> fill_rates(const ScenarioResults& results, Role role);

struct DistortionComparison {
  std::string retailer;
  std::vector<double> honest_fill_rate;     // per replication
  std::vector<double> distorted_fill_rate;  // per replication
  int replications_lower = 0;
  double others_honest_mean = 0;
  double others_distorted_mean = 0;
  double others_change_pp = 0;
};

/// Compares one retailer (index among retailers) across an honest and a
/// distorted run with the same seeds.
DistortionComparison compare_distortion(const ScenarioResults& honest, const ScenarioResults& distorted,
                                        std::size_t retailer);

/// Lossless form of run results, read back by `report`.
nlohmann::json results_to_json(const std::vector<ScenarioResults>& runs);
std::vector<ScenarioResults> results_from_json(const nlohmann::json& j);

/// Per-replication panel and cost table for one scenario.
void emit_scenario(const ScenarioResults& results, const std::filesystem::path& out_dir);
/// Paired tables for No-IS against B-IS, with the Mann-Whitney panels and summary.json.
nlohmann::json emit_report(const ScenarioResults& no_is, const ScenarioResults& b_is,
                           const std::filesystem::path& out_dir);
nlohmann::json emit_distortion(const ScenarioResults& honest, const ScenarioResults& distorted,
                               const std::filesystem::path& out_dir);

}  // namespace chainsim::experiments
