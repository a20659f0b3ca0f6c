#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "hdmd/types.hpp"

namespace hdmd {

/// Half-open sample range [begin, end).
struct IndexRange {
  Index begin = 0;
  Index end = 0;
  Index size() const { return end - begin; }
};

/// Mean and population standard deviation of a row segment.
inline std::pair<double, double> mean_std(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double mean = row.mean();
  const double var = (row.array() - mean).square().mean();
  return {mean, std::sqrt(var)};
}

/// Statistics of every channel over `window`.
inline NormalizationContext normalization_over(const Eigen::Ref<const Matrix>& samples, IndexRange window,
                                               const std::vector<std::string>* names = nullptr) {
  require(window.begin >= 0 && window.end <= samples.cols() && window.size() > 0, ErrorCode::InvalidConfig,
          "normalization window is empty or outside the record");
  NormalizationContext ctx;
  ctx.mean.resize(static_cast<std::size_t>(samples.rows()));
  ctx.std.resize(static_cast<std::size_t>(samples.rows()));
  for (Index r = 0; r < samples.rows(); ++r) {
    const auto [m, s] = mean_std(samples.row(r).segment(window.begin, window.size()));
    // Relative threshold: a channel is constant if its spread is at the
    // round-off level of its magnitude.
    const bool constant = !(s > 1e-13 * std::max(1.0, std::abs(m)));
    if (constant) {
      const std::string label = names ? (*names)[static_cast<std::size_t>(r)] : std::to_string(r);
      fail(ErrorCode::ConstantChannel, "channel " + label + " is constant over the window");
    }
    ctx.mean[static_cast<std::size_t>(r)] = m;
    ctx.std[static_cast<std::size_t>(r)] = s;
  }
  return ctx;
}

/// Standardizes every channel with statistics taken over `window` only.
/// The whole record is transformed so later samples can be compared.
inline std::pair<TimeSeriesSet, NormalizationContext> zscore(const TimeSeriesSet& series, IndexRange window) {
  NormalizationContext ctx = normalization_over(series.samples, window, &series.channels);
  TimeSeriesSet out = series;
  out.samples = ctx.apply(series.samples);
  return {std::move(out), std::move(ctx)};
}

/// Linear-interpolation resampling to dt = reference_period / per_period.
inline TimeSeriesSet downsample(const TimeSeriesSet& series, int per_period, double reference_period) {
  require(per_period > 0 && reference_period > 0.0, ErrorCode::NonPositiveInput,
          "samples per period and reference period must be positive");
  const double target_dt = reference_period / per_period;
  require(target_dt >= series.dt * (1.0 - 1e-12), ErrorCode::Upsampling,
          "target dt " + std::to_string(target_dt) + " s is finer than source dt " + std::to_string(series.dt) + " s");
  require(series.n_samples() >= 1, ErrorCode::RecordTooShort, "cannot resample an empty record");

  const double span = static_cast<double>(series.n_samples() - 1) * series.dt;
  const Index count = static_cast<Index>(std::floor(span / target_dt + 1e-9)) + 1;
  Matrix out(series.n_channels(), count);
  const Index last = series.n_samples() - 1;
  for (Index k = 0; k < count; ++k) {
    const double pos = static_cast<double>(k) * target_dt / series.dt;
    Index i = static_cast<Index>(std::floor(pos));
    double frac = pos - static_cast<double>(i);
    if (i >= last) {
      i = last;
      frac = 0.0;
    } else if (frac < 1e-12) {
      frac = 0.0;
    }
    if (frac == 0.0)
      out.col(k) = series.samples.col(i);
    else
      out.col(k) = (1.0 - frac) * series.samples.col(i) + frac * series.samples.col(i + 1);
  }
  return TimeSeriesSet(series.channels, std::move(out), target_dt, series.t0);
}

/// Mean spacing of zero up-crossings of the mean-removed signal, with
/// crossing instants located by linear interpolation.
inline double estimate_reference_period(std::span<const double> channel, double dt) {
  require(dt > 0.0, ErrorCode::NonPositiveInput, "dt must be positive");
  require(channel.size() >= 2, ErrorCode::TooFewCrossings, "signal too short for crossing analysis");
  double mean = 0.0;
  for (double v : channel) mean += v;
  mean /= static_cast<double>(channel.size());

  std::vector<double> crossings;
  for (std::size_t i = 0; i + 1 < channel.size(); ++i) {
    const double a = channel[i] - mean;
    const double b = channel[i + 1] - mean;
    if (a < 0.0 && b >= 0.0) crossings.push_back((static_cast<double>(i) + (-a) / (b - a)) * dt);
  }
  require(crossings.size() >= 2, ErrorCode::TooFewCrossings,
          "found " + std::to_string(crossings.size()) + " zero up-crossings, need at least 2");
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

inline double estimate_reference_period(const TimeSeriesSet& series, const std::string& channel) {
  const Index r = series.channel_index(channel);
  const Eigen::RowVectorXd row = series.samples.row(r);
  return estimate_reference_period(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())),
                                   series.dt);
}

}  // namespace hdmd
