#pragma once

#include <span>

namespace platoon {

/// Box-plot summary plus moments of one metric over replications.
struct AggregateStats {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< sample variance, 0 for a single row
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Throws DomainError on empty input. Quartiles interpolate linearly between
/// order statistics, so the result does not depend on input order.
AggregateStats aggregate(std::span<const double> values);

/// Mean difference a - b, its standard error and t statistic over paired
/// samples. Throws DomainError when sizes differ or fewer than two pairs.
struct PairedDiff {
  double mean = 0.0;
  double se = 0.0;
  double t = 0.0;
};
PairedDiff paired_difference(std::span<const double> a, std::span<const double> b);

}  // namespace platoon
