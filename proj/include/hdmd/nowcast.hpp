#pragma once

#include <cmath>
#include <optional>

#include "hdmd/dmd.hpp"
#include "hdmd/hankel.hpp"
#include "hdmd/preprocess.hpp"

namespace hdmd {

/// Integer window geometry of one nowcast: training samples, delays, and
/// forecast steps after the origin.
struct SampleCounts {
  Index n_tr = 0;
  Index n_d = 0;
  Index n_te = 0;

  void validate() const {
    require(n_te >= 1, ErrorCode::InvalidConfig, "forecast horizon must be at least one step");
    HankelSpec{n_d, n_tr}.validate();
  }
};

/// Hyperparameters in reference periods.
struct NowcastConfig {
  double l_tr = 1.0;
  double l_d = 1.0;
  double l_te = 5.0;
  double reference_period = 1.0;
  int samples_per_period = 32;

  SampleCounts counts(double dt) const {
    require(l_tr > 0.0 && l_te > 0.0 && l_d >= 0.0, ErrorCode::InvalidConfig,
            "observation and horizon lengths must be positive, delay length non-negative");
    require(l_d < l_tr, ErrorCode::InvalidConfig, "delay length must be shorter than observation length");
    SampleCounts c;
    c.n_tr = periods_to_samples(l_tr, reference_period, dt);
    c.n_d = l_d > 0.0 ? periods_to_samples(l_d, reference_period, dt) : 0;
    c.n_te = periods_to_samples(l_te, reference_period, dt);
    c.validate();
    return c;
  }
};

struct Forecast {
  Index origin = 0;
  double horizon = 0.0;  // seconds
  Matrix values;         // channels x (n_te + 1); column 0 is the origin sample
  SampleCounts counts;
  std::optional<NowcastConfig> config;
};

inline void check_origin(const TimeSeriesSet& series, Index origin, Index n_tr) {
  require(origin >= 0 && origin < series.n_samples(), ErrorCode::OriginOutOfRange,
          "origin " + std::to_string(origin) + " is outside a record of " + std::to_string(series.n_samples()) +
              " samples");
  require(origin - n_tr >= 0, ErrorCode::OriginOutOfRange,
          "origin " + std::to_string(origin) + " leaves fewer than " + std::to_string(n_tr) +
              " training samples before it");
}

/// Samples origin+1 .. origin+n_te, the truth the forecast is scored on.
inline Matrix truth_after(const TimeSeriesSet& series, Index origin, Index n_te) {
  require(origin >= 0 && origin + n_te < series.n_samples(), ErrorCode::OriginOutOfRange,
          "record ends before origin + " + std::to_string(n_te) + " steps");
  return series.samples.middleCols(origin + 1, n_te);
}

/// Fits a fresh Hankel-DMD model on the n_tr samples ending at `origin`
/// (inclusive) and forecasts n_te steps forward in physical units.
inline Forecast nowcast(const TimeSeriesSet& series, Index origin, const SampleCounts& counts) {
  counts.validate();
  check_origin(series, origin, counts.n_tr);

  const IndexRange window{origin - counts.n_tr + 1, origin + 1};
  const NormalizationContext norm = normalization_over(series.samples, window, &series.channels);
  const Matrix train = norm.apply(series.samples.middleCols(window.begin, window.size()));

  const SnapshotPair pair = build_hankel(train, HankelSpec{counts.n_d, counts.n_tr}, series.dt);
  DmdModel model = fit_dmd(pair, DmdOptions{series.n_channels()});
  model.norm = norm;

  Forecast out;
  out.origin = origin;
  out.counts = counts;
  out.horizon = static_cast<double>(counts.n_te) * series.dt;
  out.values = forecast(model, counts.n_te, Units::Physical);
  return out;
}

inline Forecast nowcast(const TimeSeriesSet& series, Index origin, const NowcastConfig& config) {
  Forecast out = nowcast(series, origin, config.counts(series.dt));
  out.config = config;
  return out;
}

}  // namespace hdmd
