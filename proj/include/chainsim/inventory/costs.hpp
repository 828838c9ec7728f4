#pragma once

#include <cstdint>

namespace chainsim::inventory {

struct CostParams {
  double c_order = 0.0;
  double c_transport = 0.0;
  double c_reception = 0.0;
  double c_storing = 0.0;
  double c_worsening = 0.0;
  double c_obsolescence = 0.0;
  double c_interest = 0.0;
  double price = 0.0;
};

/// Cost of emitting one purchase order.
inline double poe_cost(const CostParams& p) { return p.c_order + p.c_transport + p.c_reception; }
/// Cost of holding one item for one day.
inline double storage_rate(const CostParams& p) {
  return p.c_storing + p.c_worsening + p.c_obsolescence + p.c_interest;
}

struct FillRateCounter {
  std::uint64_t fully_satisfied = 0;
  std::uint64_t total = 0;

  void record(bool satisfied) {
    ++total;
    if (satisfied) ++fully_satisfied;
  }
  FillRateCounter& operator+=(const FillRateCounter& o) {
    fully_satisfied += o.fully_satisfied;
    total += o.total;
    return *this;
  }
  friend bool operator==(const FillRateCounter&, const FillRateCounter&) = default;
};

/// FSO / TO; throws NoOrders on an empty counter.
double fill_rate(const FillRateCounter& c);

double total_inventory_cost(double poe_cost, std::uint64_t orders_emitted, double storage_rate,
                            double on_hand_integral, double purchase_spend);

}  // namespace chainsim::inventory
