#pragma once

#include <cstdint>
#include <map>

#include "chainsim/inventory/costs.hpp"
#include "chainsim/ledger/gas.hpp"
#include "chainsim/ledger/pending_time.hpp"

namespace chainsim::sim {

enum class SharingMode { NoIS, BIS };

struct PolicyParams {
  double lead_time = 1;      // days
  std::size_t ses_window = 10;
  double ses_alpha = 0.7;
  double sd_factor = 2;      // k
  double sd_lead_time = 0.5; // days
  std::size_t ss_days = 20;  // N
  int review_period = 3;     // days
  inventory::CostParams costs;
};

struct RetailerParams {
  PolicyParams policy{5, 10, 0.7, 2, 0.5, 20, 3, {15, 60, 25, 0.65, 0.15, 0.15, 0.05, 0}};
  double interarrival_mean = 5000;
  double interarrival_min = 3600;
  double interarrival_max = 7200;
  double quantity_min = 18;
  double quantity_mode = 30;
  double quantity_max = 44;
};

struct WholesalerParams {
  PolicyParams policy{1, 15, 0.6, 2, 0.5, 20, 2, {20, 100, 40, 0.4, 0.15, 0.15, 0.05, 0}};
  double fulfilment_min = 0.9;
  double fulfilment_max = 1.0;
};

struct SimConfig {
  SharingMode mode = SharingMode::NoIS;
  int days = 60;
  std::size_t wholesalers = 3;
  std::size_t retailers = 20;
  std::size_t items = 60;
  std::size_t stores_per_retailer = 1;

  double business_open = 8 * 3600.0;   // seconds after midnight
  double business_hours = 12 * 3600.0;
  double wholesaler_cycle_delay = 3600.0;  // after close of business
  int review_horizon_days = 30;            // candidates for the optimized lot

  RetailerParams retailer;
  WholesalerParams wholesaler;

  double price_min = 8;
  double price_max = 12;
  double retail_markup = 1.3;
  double manufacturer_discount = 1.3;

  /// Retailer index -> factor applied to the demand it posts.
  std::map<std::size_t, double> distortion;
  /// Retailers post at close of business; false leaves B-IS with no records.
  bool retailer_posting = true;
  bool wholesaler_posting = false;

  ledger::GasTier gas_tier = ledger::GasTier::Avg;
  ledger::GasPricing gas_pricing;
  ledger::PendingTimeModel pending_time;

  std::uint64_t master_seed = 20200301;
  std::uint64_t price_seed = 7;

  std::size_t nodes() const { return wholesalers + retailers; }
  double distortion_for(std::size_t retailer) const;
  /// Seed demand per retailer and item: triangular mean times expected daily arrivals.
  double retailer_seed_demand() const;
  void validate() const;
};

std::string_view to_string(SharingMode mode);

}  // namespace chainsim::sim
