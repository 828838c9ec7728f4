#include "chainsim/experiments/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace chainsim::experiments {

namespace {

constexpr std::size_t kExactLimit = 8;

void require_nonempty(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptySample("Mann-Whitney needs two non-empty samples");
}

MannWhitneyResult base_result(std::span<const double> a, std::span<const double> b, std::vector<double>& ranks) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  ranks = midranks(pooled);
  MannWhitneyResult r;
  r.n1 = a.size();
  r.n2 = b.size();
  r.w = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
  r.u = r.w - static_cast<double>(r.n1 * (r.n1 + 1)) / 2.0;
  r.median_a = median(a);
  r.median_b = median(b);
  r.median_difference = r.median_a - r.median_b;
  return r;
}

}  // namespace

std::vector<double> midranks(std::span<const double> pooled) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  std::vector<double> ranks(pooled.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double median(std::span<const double> values) {
  if (values.empty()) throw EmptySample("median of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

MannWhitneyResult mann_whitney_exact(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b);
  std::vector<double> ranks;
  MannWhitneyResult r = base_result(a, b, ranks);
  r.exact = true;

  // Midranks are multiples of 1/2, so doubled ranks are exact integers.
  // ways[k][s]: subsets of size k with doubled rank sum s.
  std::vector<std::size_t> doubled(ranks.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
    total += doubled[i];
  }
  const std::size_t n1 = r.n1;
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(total + 1, 0.0));
  ways[0][0] = 1;
  for (std::size_t v : doubled) {
    for (std::size_t k = n1; k >= 1; --k) {
      for (std::size_t s = total; s >= v; --s) ways[k][s] += ways[k - 1][s - v];
    }
  }
  const auto observed = static_cast<std::size_t>(std::llround(2.0 * r.w));
  double hits = 0, all = 0;
  for (std::size_t s = 0; s <= total; ++s) {
    all += ways[n1][s];
    if (s >= observed) hits += ways[n1][s];
  }
  r.p = hits / all;
  return r;
}

MannWhitneyResult mann_whitney_normal(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b);
  std::vector<double> ranks;
  MannWhitneyResult r = base_result(a, b, ranks);
  const double n1 = static_cast<double>(r.n1), n2 = static_cast<double>(r.n2), n = n1 + n2;

  std::vector<double> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  double ties = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  const double variance = n1 * n2 / 12.0 * ((n + 1) - (n > 1 ? ties / (n * (n - 1)) : 0.0));
  if (variance <= 0) {
    r.p = 1.0;
    return r;
  }
  const double z = (r.u - n1 * n2 / 2.0 - 0.5) / std::sqrt(variance);
  r.p = 0.5 * std::erfc(z / std::sqrt(2.0));
  return r;
}

MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b) {
  if (std::max(a.size(), b.size()) <= kExactLimit) return mann_whitney_exact(a, b);
  return mann_whitney_normal(a, b);
}

}  // namespace chainsim::experiments
