#include "oobgini/stats.hpp"

#include <algorithm>
#include <cmath>

#include "oobgini/errors.hpp"

namespace oobgini {

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DomainError("quantile of empty data");
  if (sorted.size() == 1) return sorted[0];
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

MeanStdError mean_std_error(std::span<const double> values) {
  if (values.empty()) throw DomainError("mean of empty data");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(values.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw DomainError("boxplot of empty data");
  std::sort(values.begin(), values.end());
  BoxStats box;
  box.n = static_cast<std::int64_t>(values.size());
  box.q1 = quantile_sorted(values, 0.25);
  box.median = quantile_sorted(values, 0.5);
  box.q3 = quantile_sorted(values, 0.75);
  const double iqr = box.q3 - box.q1;
  const double lo_fence = box.q1 - 1.5 * iqr;
  const double hi_fence = box.q3 + 1.5 * iqr;
  box.whisker_lo = box.q3;
  box.whisker_hi = box.q1;
  bool any_in = false;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      box.outliers.push_back(v);
    } else {
      if (!any_in) {
        box.whisker_lo = v;
        any_in = true;
      }
      box.whisker_hi = v;
    }
  }
  if (!any_in) {  // degenerate: everything fenced out (cannot happen with finite iqr >= 0)
    box.whisker_lo = box.q1;
    box.whisker_hi = box.q3;
  }
  return box;
}

}  // namespace oobgini
