#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "hdmd/error.hpp"

namespace hdmd {

inline constexpr std::string_view kQuartileRule = "linear interpolation between order statistics, h = (n - 1) p";

/// Quantile of sorted data, linear interpolation at h = (n - 1) p.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  require(!sorted.empty(), ErrorCode::DegenerateData, "quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Boxplot summary. Whiskers reach the farthest sample within 1.5 IQR of
/// the box; samples beyond are outliers but stay in the raw data.
struct Summary {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

inline Summary summarize(std::span<const double> samples) {
  Summary s;
  s.n = samples.size();
  if (samples.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.q1 = s.median = s.q3 = s.whisker_lo = s.whisker_hi = s.mean = s.std = s.min = s.max = nan;
    return s;
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  s.min = sorted.front();
  s.max = sorted.back();
  const double iqr = s.q3 - s.q1;
  const double fence_lo = s.q1 - 1.5 * iqr;
  const double fence_hi = s.q3 + 1.5 * iqr;
  s.whisker_lo = *std::find_if(sorted.begin(), sorted.end(), [&](double v) { return v >= fence_lo; });
  s.whisker_hi = *std::find_if(sorted.rbegin(), sorted.rend(), [&](double v) { return v <= fence_hi; });

  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  double var = 0.0;
  for (double v : samples) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(s.n));
  return s;
}

}  // namespace hdmd
