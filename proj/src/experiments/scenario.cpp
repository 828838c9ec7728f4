#include "chainsim/experiments/scenario.hpp"

#include <fstream>
#include <set>
#include <variant>
#include <vector>

namespace chainsim::experiments {

using nlohmann::json;

namespace {

static_assert(std::is_same_v<std::size_t, std::uint64_t>, "seeds and counts share one slot type");
using Slot = std::variant<double*, int*, std::size_t*, bool*>;

struct Field {
  const char* key;
  Slot slot;
};

std::vector<Field> policy_fields(sim::PolicyParams& p) {
  auto& c = p.costs;
  return {
      {"lead_time", &p.lead_time},
      {"ses_interval_for_historical_data", &p.ses_window},
      {"ses_alfa", &p.ses_alpha},
      {"standard_deviation_factor", &p.sd_factor},
      {"standard_deviation_of_the_lead_time", &p.sd_lead_time},
      {"n_days_for_ss", &p.ss_days},
      {"review_period", &p.review_period},
      {"ordering_cost", &c.c_order},
      {"transportation_cost", &c.c_transport},
      {"reception_cost", &c.c_reception},
      {"storing_cost", &c.c_storing},
      {"obsolescence_cost", &c.c_obsolescence},
      {"deterioration_cost", &c.c_worsening},
      {"interest_cost", &c.c_interest},
  };
}

std::vector<Field> retailer_fields(sim::RetailerParams& r) {
  auto f = policy_fields(r.policy);
  f.insert(f.end(), {
                        {"average_order_inter_arrival_time", &r.interarrival_mean},
                        {"lower_bound_for_the_inter_arrival_time", &r.interarrival_min},
                        {"upper_bound_for_the_inter_arrival_time", &r.interarrival_max},
                        {"triangular_minimum_value", &r.quantity_min},
                        {"triangular_mode", &r.quantity_mode},
                        {"triangular_maximum_value", &r.quantity_max},
                    });
  return f;
}

std::vector<Field> wholesaler_fields(sim::WholesalerParams& w) {
  auto f = policy_fields(w.policy);
  f.insert(f.end(), {
                        {"manufacturer_fulfilment_min", &w.fulfilment_min},
                        {"manufacturer_fulfilment_max", &w.fulfilment_max},
                    });
  return f;
}

std::vector<Field> top_fields(ScenarioConfig& s) {
  auto& c = s.sim;
  return {
      {"days", &c.days},
      {"replications", &s.replications},
      {"master_seed", &c.master_seed},
      {"price_seed", &c.price_seed},
      {"wholesalers", &c.wholesalers},
      {"retailers", &c.retailers},
      {"items", &c.items},
      {"stores_per_retailer", &c.stores_per_retailer},
      {"business_open", &c.business_open},
      {"business_hours", &c.business_hours},
      {"wholesaler_cycle_delay", &c.wholesaler_cycle_delay},
      {"review_horizon_days", &c.review_horizon_days},
      {"price_min", &c.price_min},
      {"price_max", &c.price_max},
      {"retail_markup", &c.retail_markup},
      {"manufacturer_discount", &c.manufacturer_discount},
      {"retailer_posting", &c.retailer_posting},
      {"wholesaler_posting", &c.wholesaler_posting},
  };
}

std::vector<Field> gas_fields(ledger::GasPricing& g) {
  return {{"min", &g.min_eur}, {"avg", &g.avg_eur}, {"max", &g.max_eur}};
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void read_slot(const json& v, const Slot& slot, const std::string& where) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, bool>) {
          if (!v.is_boolean()) fail(where, "expected true or false");
          *p = v.get<bool>();
        } else if constexpr (std::is_same_v<T, double>) {
          if (!v.is_number()) fail(where, "expected a number");
          *p = v.get<double>();
        } else {
          if (!v.is_number_integer()) fail(where, "expected an integer");
          if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
              fail(where, "expected a non-negative integer");
            }
          }
          *p = v.get<T>();
        }
      },
      slot);
}

void write_slot(json& out, const char* key, const Slot& slot) {
  std::visit([&](auto* p) { out[key] = *p; }, slot);
}

// Reads every key of `obj`, rejecting those not listed in `fields` or `extra`.
void read_object(const json& obj, const std::vector<Field>& fields, const std::string& where,
                 const std::set<std::string>& extra = {}) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (extra.count(key)) continue;
    bool found = false;
    for (const auto& f : fields) {
      if (key == f.key) {
        read_slot(value, f.slot, where.empty() ? key : where + "." + key);
        found = true;
        break;
      }
    }
    if (!found) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

json write_object(const std::vector<Field>& fields) {
  json out = json::object();
  for (const auto& f : fields) write_slot(out, f.key, f.slot);
  return out;
}

std::size_t parse_retailer_name(const std::string& name) {
  if (name.size() < 2 || name[0] != 'R') fail("distortion." + name, "retailer names look like R1, R2, ...");
  std::size_t pos = 0;
  unsigned long n = 0;
  try {
    n = std::stoul(name.substr(1), &pos);
  } catch (const std::exception&) {
    fail("distortion." + name, "retailer names look like R1, R2, ...");
  }
  if (pos != name.size() - 1 || n == 0) fail("distortion." + name, "retailer names look like R1, R2, ...");
  return n - 1;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (replications < 1) throw ConfigError("replications must be >= 1");
  try {
    sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig s;
  read_object(j, top_fields(s), "",
              {"name", "mode", "gas_tier", "distortion", "retailer", "wholesaler", "gas_cost_eur"});
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail("name", "expected a string");
    s.name = j["name"].get<std::string>();
  }
  if (j.contains("mode")) {
    const json& m = j["mode"];
    if (m == "no-is") {
      s.sim.mode = sim::SharingMode::NoIS;
    } else if (m == "b-is") {
      s.sim.mode = sim::SharingMode::BIS;
    } else {
      fail("mode", "expected \"no-is\" or \"b-is\"");
    }
  }
  if (j.contains("gas_tier")) {
    if (!j["gas_tier"].is_string()) fail("gas_tier", "expected \"min\", \"avg\" or \"max\"");
    try {
      s.sim.gas_tier = ledger::parse_gas_tier(j["gas_tier"].get<std::string>());
    } catch (const std::exception&) {
      fail("gas_tier", "expected \"min\", \"avg\" or \"max\"");
    }
  }
  if (j.contains("retailer")) read_object(j["retailer"], retailer_fields(s.sim.retailer), "retailer");
  if (j.contains("wholesaler")) read_object(j["wholesaler"], wholesaler_fields(s.sim.wholesaler), "wholesaler");
  if (j.contains("gas_cost_eur")) read_object(j["gas_cost_eur"], gas_fields(s.sim.gas_pricing), "gas_cost_eur");
  if (j.contains("distortion")) {
    const json& d = j["distortion"];
    if (!d.is_object()) fail("distortion", "expected an object of retailer -> factor");
    for (const auto& [name, factor] : d.items()) {
      if (!factor.is_number()) fail("distortion." + name, "expected a number");
      s.sim.distortion[parse_retailer_name(name)] = factor.get<double>();
    }
  }
  s.validate();
  return s;
}

json scenario_to_json(const ScenarioConfig& config) {
  ScenarioConfig s = config;
  json out = write_object(top_fields(s));
  out["name"] = s.name;
  out["mode"] = std::string(sim::to_string(s.sim.mode));
  out["gas_tier"] = std::string(ledger::to_string(s.sim.gas_tier));
  out["retailer"] = write_object(retailer_fields(s.sim.retailer));
  out["wholesaler"] = write_object(wholesaler_fields(s.sim.wholesaler));
  out["gas_cost_eur"] = write_object(gas_fields(s.sim.gas_pricing));
  json d = json::object();
  for (const auto& [r, f] : s.sim.distortion) d["R" + std::to_string(r + 1)] = f;
  out["distortion"] = d;
  return out;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  if (name == "no-is") return ScenarioKind::NoIS;
  if (name == "b-is") return ScenarioKind::BIS;
  if (name == "both") return ScenarioKind::Both;
  if (name == "distorted") return ScenarioKind::Distorted;
  throw ConfigError("unknown scenario '" + std::string(name) + "' (expected no-is, b-is, both or distorted)");
}

ScenarioConfig make_scenario(const ScenarioConfig& base, sim::SharingMode mode, DistortionUse distortion) {
  ScenarioConfig s = base;
  s.sim.mode = mode;
  s.name = std::string(sim::to_string(mode));
  switch (distortion) {
    case DistortionUse::AsConfigured: break;
    case DistortionUse::None: s.sim.distortion.clear(); break;
    case DistortionUse::Applied:
      if (s.sim.distortion.empty()) s.sim.distortion[0] = 0.5;
      s.name += "-distorted";
      break;
  }
  s.validate();
  return s;
}

}  // namespace chainsim::experiments
