#include "chainsim/sim/config.hpp"

#include <stdexcept>
#include <string>

#include "chainsim/sim/distributions.hpp"

namespace chainsim::sim {

std::string_view to_string(SharingMode mode) { return mode == SharingMode::NoIS ? "no-is" : "b-is"; }

double SimConfig::distortion_for(std::size_t r) const {
  if (mode != SharingMode::BIS) return 1.0;
  auto it = distortion.find(r);
  return it == distortion.end() ? 1.0 : it->second;
}

double SimConfig::retailer_seed_demand() const {
  const auto& r = retailer;
  const double arrivals = business_hours / truncated_exponential_mean(r.interarrival_mean, r.interarrival_min,
                                                                      r.interarrival_max);
  const double quantity = (r.quantity_min + r.quantity_mode + r.quantity_max) / 3.0;
  return quantity * arrivals * static_cast<double>(stores_per_retailer);
}

namespace {

void check(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_policy(const PolicyParams& p, const std::string& who) {
  check(p.lead_time >= 1 && p.lead_time == static_cast<int>(p.lead_time), who + " lead time must be whole days >= 1");
  check(p.ses_alpha > 0 && p.ses_alpha <= 1, who + " SES alpha must lie in (0, 1]");
  check(p.sd_factor >= 0 && p.sd_lead_time >= 0, who + " safety parameters must be non-negative");
  check(p.ss_days >= 1, who + " safety-stock window must be >= 1 day");
  check(p.review_period >= 1, who + " review period must be >= 1 day");
  const auto& c = p.costs;
  for (double v : {c.c_order, c.c_transport, c.c_reception, c.c_storing, c.c_worsening, c.c_obsolescence,
                   c.c_interest}) {
    check(v >= 0, who + " costs must be non-negative");
  }
}

}  // namespace

void SimConfig::validate() const {
  check(days >= 1, "days must be >= 1");
  check(wholesalers >= 1 && retailers >= 1 && items >= 1 && stores_per_retailer >= 1, "node counts must be >= 1");
  check(business_hours > 0 && business_open >= 0 &&
            business_open + business_hours + wholesaler_cycle_delay + 200 < 86400,
        "business day must fit in 24 h with room for the wholesaler cycle");
  check(review_horizon_days >= 1, "review horizon must be >= 1 day");
  check_policy(retailer.policy, "retailer");
  check_policy(wholesaler.policy, "wholesaler");
  check(retailer.interarrival_mean > 0 && retailer.interarrival_min <= retailer.interarrival_max &&
            retailer.interarrival_min > 0,
        "bad interarrival parameters");
  check(retailer.quantity_min <= retailer.quantity_mode && retailer.quantity_mode <= retailer.quantity_max &&
            retailer.quantity_min >= 0,
        "bad quantity distribution");
  check(wholesaler.fulfilment_min > 0 && wholesaler.fulfilment_min <= wholesaler.fulfilment_max &&
            wholesaler.fulfilment_max <= 1,
        "fulfilment fraction must lie in (0, 1]");
  check(price_min > 0 && price_min <= price_max, "bad price range");
  check(retail_markup > 0 && manufacturer_discount > 0, "markups must be positive");
  for (const auto& [r, f] : distortion) {
    check(r < retailers, "distortion names retailer " + std::to_string(r) + " which does not exist");
    check(f > 0, "distortion factors must be > 0");
  }
}

}  // namespace chainsim::sim
