#include "platoon/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "platoon/errors.hpp"

namespace platoon {
namespace {

double quantile(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

AggregateStats aggregate(std::span<const double> values) {
  if (values.empty()) throw DomainError("aggregate needs at least one row");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  AggregateStats s;
  s.n = v.size();
  // Summed in sorted order so a permuted input gives the same bits.
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.variance = s.n > 1 ? ss / static_cast<double>(s.n - 1) : 0.0;
  s.min = v.front();
  s.max = v.back();
  s.q1 = quantile(v, 0.25);
  s.median = quantile(v, 0.5);
  s.q3 = quantile(v, 0.75);
  return s;
}

PairedDiff paired_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("paired samples must have equal size");
  if (a.size() < 2) throw DomainError("paired comparison needs at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  double sum = 0.0;
  for (double x : d) sum += x;
  const double n = static_cast<double>(d.size());
  PairedDiff out;
  out.mean = sum / n;
  double ss = 0.0;
  for (double x : d) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / (n - 1.0) / n);
  if (out.se > 0.0) {
    out.t = out.mean / out.se;
  } else {
    out.t = out.mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), out.mean);
  }
  return out;
}

}  // namespace platoon
