#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace chainsim::experiments {

class EmptySample : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MannWhitneyResult {
  std::size_t n1 = 0, n2 = 0;
  double w = 0;  // rank sum of the first sample
  double u = 0;  // w - n1(n1+1)/2
  double p = 1;  // one-sided, first sample greater
  bool exact = false;
  double median_a = 0, median_b = 0;
  double median_difference = 0;  // median_a - median_b
};

/// Midranks (1-based) of the pooled values.
std::vector<double> midranks(std::span<const double> pooled);

double median(std::span<const double> values);

/// One-sided test that `a` tends to be larger than `b`. Exact enumeration when
/// both samples have at most 8 values, otherwise the normal approximation.
MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b);

/// Exact permutation p-value of the rank sum, ties kept as midranks.
MannWhitneyResult mann_whitney_exact(std::span<const double> a, std::span<const double> b);
/// Normal approximation with tie-corrected variance and continuity correction.
MannWhitneyResult mann_whitney_normal(std::span<const double> a, std::span<const double> b);

}  // namespace chainsim::experiments
