#include "chainsim/sim/world.hpp"

#include <array>
#include <cmath>
#include <map>

#include "chainsim/connector/connector.hpp"
#include "chainsim/inventory/policy.hpp"
#include "chainsim/sim/allocation.hpp"
#include "chainsim/sim/distributions.hpp"

namespace chainsim::sim {

namespace {

constexpr std::uint64_t key(StreamPurpose p) { return static_cast<std::uint64_t>(p); }

const Date kFirstDay = parse_iso_date("2020-01-01");

ledger::KeyPair node_key(std::uint64_t master, std::uint64_t replication, std::size_t node) {
  RngStream rng(derive_seed(master, {replication, node, key(StreamPurpose::Keys)}));
  std::array<std::uint8_t, ledger::kSeedSize> seed{};
  for (std::size_t i = 0; i < seed.size(); i += 8) {
    const std::uint64_t word = rng.next_u64();
    for (std::size_t b = 0; b < 8; ++b) seed[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
  }
  return ledger::KeyPair::from_seed(seed);
}

}  // namespace

bool serve_customer(ItemState& stock, NodeMetrics& metrics, std::int64_t quantity, double unit_price) {
  const bool served = stock.on_hand >= quantity;
  const double value = static_cast<double>(quantity) * unit_price;
  if (served) {
    stock.on_hand -= quantity;
    metrics.revenue += value;
  } else {
    metrics.missing_revenue += value;
  }
  metrics.fill.record(served);
  return served;
}

PriceTable draw_prices(const SimConfig& config) {
  RngStream rng(derive_seed(config.price_seed, {key(StreamPurpose::Prices)}));
  PriceTable table;
  table.retail_markup = config.retail_markup;
  table.manufacturer_discount = config.manufacturer_discount;
  table.wholesale.reserve(config.items);
  for (std::size_t k = 0; k < config.items; ++k) table.wholesale.push_back(rng.uniform(config.price_min, config.price_max));
  return table;
}

World::World(SimConfig config, std::uint64_t replication, PriceTable prices, TraceSink trace)
    : config_(std::move(config)), replication_(replication), prices_(std::move(prices)), trace_(std::move(trace)) {
  config_.validate();
  if (prices_.wholesale.size() != config_.items) throw std::invalid_argument("price table does not match item count");

  const std::size_t W = config_.wholesalers, R = config_.retailers, K = config_.items, S = config_.stores_per_retailer;
  const auto& rp = config_.retailer.policy;
  const auto& wp = config_.wholesaler.policy;
  const double retail_seed = config_.retailer_seed_demand();

  items_.assign(config_.nodes(), std::vector<ItemState>(K));
  metrics_.assign(config_.nodes(), NodeMetrics{});

  retail_forecast_.assign(R, std::vector<inventory::ForecastState>(K, {rp.ses_alpha, rp.ses_window, retail_seed}));
  requested_today_.assign(R, std::vector<std::int64_t>(K, 0));
  ordered_from_.assign(R, std::vector<std::vector<double>>(K, std::vector<double>(W, retail_seed / static_cast<double>(W))));

  const inventory::ForecastState per_retailer{wp.ses_alpha, wp.ses_window, retail_seed / static_cast<double>(W)};
  wholesale_forecast_.assign(W, std::vector<std::vector<inventory::ForecastState>>(
                                    R, std::vector<inventory::ForecastState>(K, per_retailer)));
  estimate_.assign(W, std::vector<double>(K, retail_seed * static_cast<double>(R) / static_cast<double>(W)));
  todays_pos_.assign(W, {});
  shared_.assign(W, std::vector<SharedView>(R));
  poll_cursor_.assign(W, 0);

  for (std::size_t n = 0; n < config_.nodes(); ++n) {
    for (std::size_t k = 0; k < K; ++k) {
      review(n, k, forecast(n, k));
      items_[n][k].on_hand = static_cast<std::int64_t>(std::ceil(items_[n][k].target));
    }
  }

  arrival_rng_.reserve(R * S * K);
  quantity_rng_.reserve(R * S * K);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t k = 0; k < K; ++k) {
        const std::uint64_t node = W + r;
        arrival_rng_.emplace_back(
            derive_seed(config_.master_seed, {replication_, node, key(StreamPurpose::CustomerArrival), s, k}));
        quantity_rng_.emplace_back(
            derive_seed(config_.master_seed, {replication_, node, key(StreamPurpose::CustomerQuantity), s, k}));
      }
    }
  }
  for (std::size_t w = 0; w < W; ++w) {
    fulfilment_rng_.emplace_back(
        derive_seed(config_.master_seed, {replication_, w, key(StreamPurpose::ManufacturerFraction)}));
  }

  if (config_.mode == SharingMode::BIS) bootstrap_ledger();
}

World::~World() = default;
World::World(World&&) noexcept = default;

std::string World::node_name(std::size_t node) const {
  return is_wholesaler(node) ? "W" + std::to_string(node + 1) : "R" + std::to_string(node - config_.wholesalers + 1);
}

const std::string& World::address_id(std::size_t node) const {
  if (companies_.empty()) throw std::logic_error("no ledger in this mode");
  return companies_[node].address.id;
}

double World::forecast(std::size_t node, std::size_t item) const {
  if (is_wholesaler(node)) return estimate_[node][item];
  return retail_forecast_[node - config_.wholesalers][item].phi();
}

void World::bootstrap_ledger() {
  const std::uint64_t master = config_.master_seed;
  const ledger::KeyPair deployer = node_key(master, replication_, 0);
  connector::ConnectorOptions options;
  options.pending_time = config_.pending_time;
  options.gas_price = config_.gas_pricing.gas_price(config_.gas_tier);
  options.pending_seed = derive_seed(master, {replication_, key(StreamPurpose::PendingTime)});
  connector_ = std::make_unique<connector::Connector>(ledger::Ledger::genesis(deployer, 0.0),
                                                      connector::OffChainStore{}, options);
  for (std::size_t n = 0; n < config_.nodes(); ++n) {
    const auto address = connector_->add_wallet(n == 0 ? deployer : node_key(master, replication_, n));
    companies_.push_back(connector::Company{node_name(n), address, {}, {}});
  }
  // Every node joins through the voting flow; members vote in node order.
  double now = 0.0;
  auto advance = [&] { now = connector_->ledger().head().timestamp; };
  for (std::size_t n = 1; n < config_.nodes(); ++n) {
    const std::string& candidate = companies_[n].address.id;
    connector_->request_authorization(candidate, now);
    advance();
    for (std::size_t m = 0; m < n; ++m) {
      if (connector_->vote(companies_[m].address.id, candidate, true, now) == ledger::AuthorizationStatus::Authorized) {
        advance();
        break;
      }
      advance();
    }
  }
  poll_cursor_.assign(config_.wholesalers, connector_->ledger().contract().events().size());
}

void World::schedule(double time, EventKind kind, std::uint32_t node, std::uint32_t item, std::uint64_t ref) {
  queue_.push(SimEvent{time, next_seq_++, kind, node, item, ref});
}

void World::emit(nlohmann::json record) {
  if (!trace_) return;
  record["t"] = current_.time;
  record["seq"] = current_.seq;
  trace_(record);
}

MetricsSnapshot World::run_day() {
  if (finished()) throw std::logic_error("simulation already finished");
  const int d = day_;
  schedule(open_time(d), EventKind::StartOfBusiness);
  const double end = day_start(d + 1);
  while (!queue_.empty() && queue_.top().time < end) {
    current_ = queue_.top();
    queue_.pop();
    dispatch(current_);
  }
  ++day_;
  return MetricsSnapshot{d, metrics_};
}

void World::run() {
  while (!finished()) run_day();
}

void World::dispatch(const SimEvent& e) {
  switch (e.kind) {
    case EventKind::StartOfBusiness: start_of_business(e); break;
    case EventKind::CustomerArrival: customer_arrival(e); break;
    case EventKind::EndOfBusiness: end_of_business(e); break;
    case EventKind::OrderArrival: wholesaler_cycle(e); break;
    case EventKind::Delivery: deliver(e); break;
    case EventKind::MineTick:
      emit({{"kind", "mine"}, {"node", node_name(e.node)}, {"block", e.ref}});
      break;
  }
}

void World::review(std::size_t node, std::size_t item, double phi) {
  const PolicyParams& p = is_wholesaler(node) ? config_.wholesaler.policy : config_.retailer.policy;
  ItemState& s = items_[node][item];
  if (s.ss_history.size() >= p.ss_days) {
    std::span<const double> window(s.ss_history);
    s.safety_stock = inventory::safety_stock(window.last(p.ss_days), p.ss_days, p.sd_factor, p.sd_lead_time,
                                             p.lead_time);
  } else {
    // Too little history: zero-variance form around the current forecast.
    s.safety_stock = p.sd_factor * phi * p.sd_lead_time;
  }
  const double rho = p.review_period;
  s.reorder = inventory::reorder_level(p.lead_time, rho * phi, rho, s.safety_stock);
  int lot_days = 1;
  if (phi > 0) {
    const std::vector<double> horizon(static_cast<std::size_t>(config_.review_horizon_days), phi);
    lot_days = inventory::optimize_review_period(horizon, inventory::poe_cost(p.costs), inventory::storage_rate(p.costs));
  }
  s.target = inventory::target_level(lot_days * phi, s.reorder);
}

void World::start_of_business(const SimEvent& e) {
  const int d = day_;
  const std::size_t W = config_.wholesalers, K = config_.items;
  if (d % config_.retailer.policy.review_period == 0) {
    for (std::size_t r = 0; r < config_.retailers; ++r) {
      for (std::size_t k = 0; k < K; ++k) review(W + r, k, forecast(W + r, k));
    }
  }
  retailer_orders(e.time);

  const auto& rp = config_.retailer;
  const double close = close_time(d);
  for (std::size_t r = 0; r < config_.retailers; ++r) {
    for (std::size_t s = 0; s < config_.stores_per_retailer; ++s) {
      for (std::size_t k = 0; k < K; ++k) {
        const std::size_t stream = (r * config_.stores_per_retailer + s) * K + k;
        const double t = e.time + draw_interarrival(arrival_rng_[stream], rp.interarrival_mean, rp.interarrival_min,
                                                    rp.interarrival_max);
        if (t < close) {
          schedule(t, EventKind::CustomerArrival, static_cast<std::uint32_t>(W + r), static_cast<std::uint32_t>(k), s);
        }
      }
    }
  }
  schedule(close, EventKind::EndOfBusiness);
  for (std::size_t w = 0; w < W; ++w) schedule(cycle_time(d), EventKind::OrderArrival, static_cast<std::uint32_t>(w));
}

void World::retailer_orders(double now) {
  const std::size_t W = config_.wholesalers;
  const double lead_time = config_.retailer.policy.lead_time;
  std::vector<SupplierQuote> quotes(W);
  for (std::size_t r = 0; r < config_.retailers; ++r) {
    const std::size_t node = W + r;
    for (std::size_t k = 0; k < config_.items; ++k) {
      ItemState& s = items_[node][k];
      const double position = inventory::inventory_position(static_cast<double>(s.on_hand),
                                                            static_cast<double>(s.on_order),
                                                            static_cast<double>(s.to_ship));
      if (!inventory::should_order(position, s.reorder)) continue;
      const std::int64_t q = inventory::order_quantity(s.target, position);
      if (q <= 0) continue;
      for (std::size_t w = 0; w < W; ++w) {
        quotes[w] = SupplierQuote{items_[w][k].on_hand, lead_time};
      }
      const std::size_t w = *choose_supplier(quotes, q);

      PurchaseOrder po;
      po.id = orders_.size();
      po.buyer = node;
      po.supplier = w;
      po.item = k;
      po.qty_ordered = q;
      po.emitted_at = now;
      po.due_at = now + lead_time * 86400.0;
      orders_.push_back(po);

      s.on_order += q;
      todays_pos_[w].push_back(po.id);
      ordered_from_[r][k][w] += static_cast<double>(q);
      ++metrics_[node].orders_emitted;
      emit({{"kind", "po_emitted"}, {"node", node_name(node)}, {"item", k}, {"qty", q},
            {"supplier", node_name(w)}, {"po", po.id}});
    }
  }
}

void World::customer_arrival(const SimEvent& e) {
  const std::size_t node = e.node, k = e.item, r = node - config_.wholesalers;
  const std::size_t stream = (r * config_.stores_per_retailer + e.ref) * config_.items + k;
  const auto& rp = config_.retailer;
  const std::int64_t q = draw_quantity(quantity_rng_[stream], rp.quantity_min, rp.quantity_mode, rp.quantity_max);
  requested_today_[r][k] += q;
  const bool served = serve_customer(items_[node][k], metrics_[node], q, prices_.retail(k));
  emit({{"kind", "sale"}, {"node", node_name(node)}, {"item", k}, {"qty", q}, {"served", served},
        {"price", prices_.retail(k)}});

  const double next =
      e.time + draw_interarrival(arrival_rng_[stream], rp.interarrival_mean, rp.interarrival_min, rp.interarrival_max);
  if (next < close_time(day_)) schedule(next, EventKind::CustomerArrival, e.node, e.item, e.ref);
}

void World::end_of_business(const SimEvent& e) {
  const std::size_t W = config_.wholesalers;
  const std::size_t N = config_.retailer.policy.ss_days;
  for (std::size_t r = 0; r < config_.retailers; ++r) {
    for (std::size_t k = 0; k < config_.items; ++k) {
      const double demand = static_cast<double>(requested_today_[r][k]);
      retail_forecast_[r][k].update(demand);
      auto& hist = items_[W + r][k].ss_history;
      hist.push_back(demand);
      if (hist.size() > N) hist.erase(hist.begin());
      requested_today_[r][k] = 0;
    }
    close_node_day(W + r);
  }
  if (config_.mode == SharingMode::BIS && config_.retailer_posting) {
    for (std::size_t r = 0; r < config_.retailers; ++r) post_retailer_record(r, e.time);
  }
}

void World::close_node_day(std::size_t node) {
  NodeMetrics& m = metrics_[node];
  for (std::size_t k = 0; k < config_.items; ++k) {
    const ItemState& s = items_[node][k];
    const std::int64_t position = s.on_hand + s.on_order + s.to_ship;
    m.on_hand_integral += static_cast<double>(s.on_hand);
    m.position_sum += static_cast<double>(position);
    ++m.position_samples;
    emit({{"kind", "eod"}, {"node", node_name(node)}, {"item", k}, {"on_hand", s.on_hand},
          {"position", position}});
  }
}

void World::post_retailer_record(std::size_t r, double now) {
  const std::size_t W = config_.wholesalers, node = W + r;
  const double lead_time = config_.retailer.policy.lead_time;
  const double distortion = config_.distortion_for(r);
  nlohmann::json items = nlohmann::json::array();
  for (std::size_t k = 0; k < config_.items; ++k) {
    const auto& ordered = ordered_from_[r][k];
    double total = 0;
    for (double q : ordered) total += q;
    nlohmann::json share = nlohmann::json::array();
    for (double q : ordered) share.push_back(q / total);
    const double delta = inventory::lead_time_demand(retail_forecast_[r][k].phi(), lead_time) * distortion;
    items.push_back({{"item", k}, {"lead_time_demand", delta}, {"order_share", share}});
  }
  const nlohmann::json payload = {{"schema", "lead-time-demand/1"}, {"sender", node_name(node)}, {"day", day_},
                                  {"lead_time", lead_time}, {"items", items}};
  std::set<std::string> visibility;
  for (std::size_t w = 0; w < W; ++w) visibility.insert(companies_[w].address.id);
  const auto v = connector_->post_shared_info(companies_[node], payload, add_days(kFirstDay, day_), visibility, now);
  NodeMetrics& m = metrics_[node];
  ++m.tx_count;
  m.pending_time += v.mined_at - v.submitted_at;
  schedule(v.mined_at, EventKind::MineTick, static_cast<std::uint32_t>(node), 0, v.block_index);
}

void World::post_wholesaler_record(std::size_t w, double now) {
  const double lead_time = config_.wholesaler.policy.lead_time;
  nlohmann::json items = nlohmann::json::array();
  for (std::size_t k = 0; k < config_.items; ++k) {
    items.push_back({{"item", k}, {"lead_time_demand", inventory::lead_time_demand(estimate_[w][k], lead_time)}});
  }
  const nlohmann::json payload = {{"schema", "lead-time-demand/1"}, {"sender", node_name(w)}, {"day", day_},
                                  {"lead_time", lead_time}, {"items", items}};
  std::set<std::string> visibility;
  for (std::size_t n = config_.wholesalers; n < config_.nodes(); ++n) visibility.insert(companies_[n].address.id);
  const auto v = connector_->post_shared_info(companies_[w], payload, add_days(kFirstDay, day_), visibility, now);
  NodeMetrics& m = metrics_[w];
  ++m.tx_count;
  m.pending_time += v.mined_at - v.submitted_at;
  schedule(v.mined_at, EventKind::MineTick, static_cast<std::uint32_t>(w), 0, v.block_index);
}

void World::fetch_shared(std::size_t w) {
  const std::string& me = companies_[w].address.id;
  const auto poll = connector_->poll_new_info(me, poll_cursor_[w]);
  poll_cursor_[w] = poll.cursor;
  for (std::uint64_t id : poll.info_ids) {
    const connector::SharedInfo info = connector_->get_shared_info(me, id);
    if (connector_->verify_shared_info(info) != connector::VerifyStatus::Authentic) continue;
    std::size_t sender = config_.nodes();
    for (std::size_t n = config_.wholesalers; n < config_.nodes(); ++n) {
      if (companies_[n].address.id == info.owner) sender = n;
    }
    if (sender == config_.nodes()) continue;
    const auto doc = nlohmann::json::parse(info.payload);
    SharedView view;
    view.day = doc.at("day").get<int>();
    view.lead_time_demand.assign(config_.items, 0.0);
    view.order_share.assign(config_.items, std::vector<double>(config_.wholesalers, 0.0));
    for (const auto& item : doc.at("items")) {
      const auto k = item.at("item").get<std::size_t>();
      if (k >= config_.items) continue;
      view.lead_time_demand[k] = item.at("lead_time_demand").get<double>();
      view.order_share[k] = item.at("order_share").get<std::vector<double>>();
    }
    shared_[w][sender - config_.wholesalers] = std::move(view);
  }
}

void World::wholesaler_cycle(const SimEvent& e) {
  const std::size_t w = e.node, W = config_.wholesalers, R = config_.retailers, K = config_.items;
  const int d = day_;
  if (connector_) {
    if (fetch_hook_) fetch_hook_(*connector_, w, d);
    fetch_shared(w);
  }

  // Fulfilment, item by item, purchase orders in id order.
  std::map<std::size_t, std::vector<std::uint64_t>> by_item;
  for (std::uint64_t id : todays_pos_[w]) by_item[orders_[id].item].push_back(id);
  std::vector<std::vector<double>> received(R, std::vector<double>(K, 0.0));
  std::vector<double> received_total(K, 0.0);
  NodeMetrics& m = metrics_[w];
  const double retail_lead = config_.retailer.policy.lead_time;
  for (const auto& [k, ids] : by_item) {
    std::vector<std::int64_t> ordered;
    for (std::uint64_t id : ids) ordered.push_back(orders_[id].qty_ordered);
    const auto alloc = allocate_shortage(items_[w][k].on_hand, ordered);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      PurchaseOrder& po = orders_[ids[i]];
      const std::int64_t delivered = alloc[i];
      po.qty_delivered = delivered;
      po.status = delivered == po.qty_ordered ? PurchaseOrder::Status::Delivered : PurchaseOrder::Status::Short;
      items_[w][k].on_hand -= delivered;
      m.revenue += static_cast<double>(delivered) * prices_.wholesale[k];
      m.missing_revenue += static_cast<double>(po.qty_ordered - delivered) * prices_.wholesale[k];
      m.fill.record(delivered == po.qty_ordered);

      ItemState& buyer = items_[po.buyer][k];
      buyer.on_order -= po.qty_ordered;
      buyer.to_ship += delivered;
      const std::size_t r = po.buyer - W;
      received[r][k] += static_cast<double>(po.qty_ordered);
      received_total[k] += static_cast<double>(po.qty_ordered);
      emit({{"kind", "po_fulfilled"}, {"node", node_name(w)}, {"item", k}, {"buyer", node_name(po.buyer)},
            {"po", po.id}, {"ordered", po.qty_ordered}, {"qty", delivered}, {"price", prices_.wholesale[k]}});
      if (delivered > 0) {
        deliveries_.push_back(Delivery{po.buyer, k, po.qty_ordered, delivered, prices_.wholesale[k], po.id});
        schedule(open_time(d + static_cast<int>(retail_lead)), EventKind::Delivery,
                 static_cast<std::uint32_t>(po.buyer), static_cast<std::uint32_t>(k), deliveries_.size() - 1);
      }
    }
  }
  todays_pos_[w].clear();

  // Forecasts: own SES per retailer, replaced by verified shared demand.
  const auto& wp = config_.wholesaler.policy;
  for (std::size_t k = 0; k < K; ++k) {
    double estimate = 0;
    for (std::size_t r = 0; r < R; ++r) {
      auto& ses = wholesale_forecast_[w][r][k];
      ses.update(received[r][k]);
      const SharedView& view = shared_[w][r];
      estimate += view.day == d ? view.lead_time_demand[k] * view.order_share[k][w] : ses.phi();
    }
    estimate_[w][k] = estimate;
    auto& hist = items_[w][k].ss_history;
    hist.push_back(received_total[k]);
    if (hist.size() > wp.ss_days) hist.erase(hist.begin());
  }

  // Review and replenishment from the manufacturers.
  const bool review_day = d % wp.review_period == 0;
  const double fmin = config_.wholesaler.fulfilment_min, fmax = config_.wholesaler.fulfilment_max;
  for (std::size_t k = 0; k < K; ++k) {
    if (review_day) review(w, k, estimate_[w][k]);
    ItemState& s = items_[w][k];
    const double position = inventory::inventory_position(static_cast<double>(s.on_hand),
                                                          static_cast<double>(s.on_order),
                                                          static_cast<double>(s.to_ship));
    if (!inventory::should_order(position, s.reorder)) continue;
    const std::int64_t q = inventory::order_quantity(s.target, position);
    if (q <= 0) continue;
    const double fraction = draw_fulfilment_fraction(fulfilment_rng_[w], fmin, fmax);
    const auto delivered = static_cast<std::int64_t>(std::floor(static_cast<double>(q) * fraction));
    s.on_order += q;
    ++m.orders_emitted;
    const std::uint64_t number = manufacturer_orders_++;
    deliveries_.push_back(Delivery{w, k, q, delivered, prices_.manufacturer(k), number});
    schedule(open_time(d + static_cast<int>(wp.lead_time)), EventKind::Delivery, static_cast<std::uint32_t>(w),
             static_cast<std::uint32_t>(k), deliveries_.size() - 1);
    emit({{"kind", "mfg_order"}, {"node", node_name(w)}, {"item", k}, {"qty", q}, {"order", number}});
  }

  close_node_day(w);
  if (connector_ && config_.wholesaler_posting) post_wholesaler_record(w, e.time);
}

void World::deliver(const SimEvent& e) {
  const Delivery& d = deliveries_[e.ref];
  ItemState& s = items_[d.node][d.item];
  s.on_hand += d.qty_delivered;
  if (is_wholesaler(d.node)) {
    s.on_order -= d.qty_ordered;
  } else {
    s.to_ship -= d.qty_delivered;
  }
  metrics_[d.node].purchase_spend += static_cast<double>(d.qty_delivered) * d.unit_price;
  emit({{"kind", "receipt"}, {"node", node_name(d.node)}, {"item", d.item}, {"qty", d.qty_delivered},
        {"ordered", d.qty_ordered}, {"price", d.unit_price}});
}

}  // namespace chainsim::sim
