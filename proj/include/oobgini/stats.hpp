#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace oobgini {

// Linear-interpolation quantile (type 7) on an ascending-sorted span.
double quantile_sorted(std::span<const double> sorted, double q);

struct MeanStdError {
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(n)
};
MeanStdError mean_std_error(std::span<const double> values);

// Tukey box: quartiles, whiskers at the most extreme points within 1.5*IQR,
// remaining points as outliers.
struct BoxStats {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::vector<double> outliers;
  std::int64_t n = 0;
};
BoxStats box_stats(std::vector<double> values);

}  // namespace oobgini
