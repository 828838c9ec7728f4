#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "chainsim/inventory/forecast.hpp"
#include "chainsim/rng.hpp"
#include "chainsim/sim/config.hpp"
#include "chainsim/sim/metrics.hpp"
#include "chainsim/sim/trace.hpp"

namespace chainsim::connector {
class Connector;
struct Company;
}  // namespace chainsim::connector

namespace chainsim::sim {

struct PriceTable {
  std::vector<double> wholesale;  // per item
  double retail_markup = 1.3;
  double manufacturer_discount = 1.3;

  double retail(std::size_t k) const { return wholesale[k] * retail_markup; }
  double manufacturer(std::size_t k) const { return wholesale[k] / manufacturer_discount; }
};

/// Per-item wholesale prices drawn once from the price seed.
PriceTable draw_prices(const SimConfig& config);

enum class EventKind { CustomerArrival, StartOfBusiness, EndOfBusiness, OrderArrival, Delivery, MineTick };

struct SimEvent {
  double time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::StartOfBusiness;
  std::uint32_t node = 0;
  std::uint32_t item = 0;
  std::uint64_t ref = 0;  // store, delivery or block index depending on kind
};

struct PurchaseOrder {
  enum class Status { Open, Delivered, Short };

  std::uint64_t id = 0;
  std::size_t buyer = 0;     // node index
  std::size_t supplier = 0;  // node index
  std::size_t item = 0;
  std::int64_t qty_ordered = 0;
  std::int64_t qty_delivered = 0;
  double emitted_at = 0;
  double due_at = 0;
  Status status = Status::Open;
};

struct ItemState {
  std::int64_t on_hand = 0;   // alpha
  std::int64_t on_order = 0;  // beta
  std::int64_t to_ship = 0;   // gamma
  double safety_stock = 0;
  double reorder = 0;         // lambda
  double target = 0;          // theta
  std::vector<double> ss_history;  // last N daily observations
};

/// All-or-nothing store sale: either the whole quantity ships or the order is
/// lost. Both outcomes count toward the fill rate.
bool serve_customer(ItemState& stock, NodeMetrics& metrics, std::int64_t quantity, double unit_price);

/// One replication of the two-echelon chain. Node indices: wholesalers first,
/// then retailers.
class World {
 public:
  World(SimConfig config, std::uint64_t replication, PriceTable prices, TraceSink trace = {});
  ~World();
  World(World&&) noexcept;
  World& operator=(World&&) = delete;

  /// Runs the next simulated day and returns the cumulative metrics.
  MetricsSnapshot run_day();
  void run();

  int day() const { return day_; }
  bool finished() const { return day_ >= config_.days; }
  const SimConfig& config() const { return config_; }
  const PriceTable& prices() const { return prices_; }
  const std::vector<NodeMetrics>& metrics() const { return metrics_; }
  const std::vector<PurchaseOrder>& purchase_orders() const { return orders_; }
  const ItemState& item_state(std::size_t node, std::size_t item) const { return items_[node][item]; }
  /// Current demand estimate used by the node's policy.
  double forecast(std::size_t node, std::size_t item) const;
  /// Wholesaler's own smoothed estimate of one retailer's orders.
  double wholesaler_forecast(std::size_t w, std::size_t r, std::size_t item) const {
    return wholesale_forecast_[w][r][item].phi();
  }
  /// Present only in B-IS.
  const connector::Connector* connector() const { return connector_.get(); }
  std::string node_name(std::size_t node) const;
  /// Ledger address of a node. B-IS only.
  const std::string& address_id(std::size_t node) const;
  bool is_wholesaler(std::size_t node) const { return node < config_.wholesalers; }

  /// Test hook: runs before each wholesaler reads shared records (B-IS only).
  using FetchHook = std::function<void(connector::Connector&, std::size_t wholesaler, int day)>;
  void set_fetch_hook(FetchHook hook) { fetch_hook_ = std::move(hook); }

 private:
  struct Delivery {
    std::size_t node;
    std::size_t item;
    std::int64_t qty_ordered;
    std::int64_t qty_delivered;
    double unit_price;
    std::uint64_t po;  // purchase order id, or manufacturer order number
  };
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  struct SharedView {
    int day = -1;
    std::vector<double> lead_time_demand;             // per item
    std::vector<std::vector<double>> order_share;  // per item, per wholesaler
  };

  void schedule(double time, EventKind kind, std::uint32_t node = 0, std::uint32_t item = 0, std::uint64_t ref = 0);
  void dispatch(const SimEvent& e);

  void start_of_business(const SimEvent& e);
  void customer_arrival(const SimEvent& e);
  void end_of_business(const SimEvent& e);
  void wholesaler_cycle(const SimEvent& e);
  void deliver(const SimEvent& e);

  void review(std::size_t node, std::size_t item, double phi);
  void retailer_orders(double now);
  void post_retailer_record(std::size_t r, double now);
  void post_wholesaler_record(std::size_t w, double now);
  void fetch_shared(std::size_t w);
  void close_node_day(std::size_t node);
  void bootstrap_ledger();
  void emit(nlohmann::json record);

  double day_start(int d) const { return d * 86400.0; }
  double open_time(int d) const { return day_start(d) + config_.business_open; }
  double close_time(int d) const { return open_time(d) + config_.business_hours; }
  double cycle_time(int d) const { return close_time(d) + config_.wholesaler_cycle_delay; }

  SimConfig config_;
  std::uint64_t replication_;
  PriceTable prices_;
  TraceSink trace_;

  int day_ = 0;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  SimEvent current_{};

  std::vector<std::vector<ItemState>> items_;  // [node][item]
  std::vector<NodeMetrics> metrics_;
  std::vector<PurchaseOrder> orders_;
  std::vector<Delivery> deliveries_;
  std::uint64_t manufacturer_orders_ = 0;

  // Retailers: demand forecast per item and the day's requested quantity.
  std::vector<std::vector<inventory::ForecastState>> retail_forecast_;  // [r][k]
  std::vector<std::vector<std::int64_t>> requested_today_;             // [r][k]
  // Cumulative quantity each retailer ordered from each wholesaler.
  std::vector<std::vector<std::vector<double>>> ordered_from_;  // [r][k][w]

  // Wholesalers: SES per (retailer, item) over received orders.
  std::vector<std::vector<std::vector<inventory::ForecastState>>> wholesale_forecast_;  // [w][r][k]
  std::vector<std::vector<double>> estimate_;            // [w][k]
  std::vector<std::vector<std::uint64_t>> todays_pos_;   // [w] purchase order ids
  std::vector<std::vector<SharedView>> shared_;          // [w][r]
  std::vector<std::uint64_t> poll_cursor_;               // [w]

  // Named streams.
  std::vector<RngStream> arrival_rng_;   // [(r * stores + s) * items + k]
  std::vector<RngStream> quantity_rng_;  // same layout
  std::vector<RngStream> fulfilment_rng_;  // [w]

  std::unique_ptr<connector::Connector> connector_;
  std::vector<connector::Company> companies_;
  FetchHook fetch_hook_;
};

}  // namespace chainsim::sim
