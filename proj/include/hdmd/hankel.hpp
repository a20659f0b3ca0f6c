#pragma once

#include <cmath>

#include "hdmd/types.hpp"

namespace hdmd {

/// Pair of snapshot matrices with x_next one sample ahead of x_now.
struct SnapshotPair {
  Matrix x_now;
  Matrix x_next;
  double dt = 1.0;

  Index aug_dim() const { return x_now.rows(); }
  Index columns() const { return x_now.cols(); }

  void validate() const {
    require(x_now.rows() == x_next.rows() && x_now.cols() == x_next.cols(), ErrorCode::DimensionMismatch,
            "snapshot matrices differ in shape");
    require(dt > 0.0 && std::isfinite(dt), ErrorCode::NonPositiveInput, "sampling interval must be positive");
  }
};

/// Delay embedding geometry. `delays` is the lag of the most delayed copy,
/// `window` the number of samples consumed.
struct HankelSpec {
  Index delays = 0;
  Index window = 2;

  Index columns() const { return window - delays - 1; }

  void validate() const {
    require(delays >= 0, ErrorCode::InvalidConfig, "delay count must be non-negative");
    require(window >= delays + 2, ErrorCode::WindowTooShort,
            "window of " + std::to_string(window) + " samples cannot hold " + std::to_string(delays) +
                " delays (need at least delays + 2)");
  }
};

/// Builds the delay-augmented snapshot pair from the leading `spec.window`
/// columns of `window`. Block row d holds the series lagged by d samples:
/// x_now(d*channels + i, c) = window(i, delays - d + c).
inline SnapshotPair build_hankel(const Eigen::Ref<const Matrix>& window, const HankelSpec& spec, double dt = 1.0) {
  spec.validate();
  require(window.cols() >= spec.window, ErrorCode::WindowTooShort,
          "window has " + std::to_string(window.cols()) + " samples, spec needs " + std::to_string(spec.window));
  require(window.rows() >= 1, ErrorCode::DimensionMismatch, "window has no channels");
  require(window.leftCols(spec.window).allFinite(), ErrorCode::NonFinite, "window contains non-finite samples");

  const Index channels = window.rows();
  const Index blocks = spec.delays + 1;
  const Index cols = spec.columns();

  SnapshotPair pair;
  pair.dt = dt;
  pair.x_now.resize(channels * blocks, cols);
  pair.x_next.resize(channels * blocks, cols);
  for (Index d = 0; d < blocks; ++d) {
    const Index first = spec.delays - d;
    pair.x_now.middleRows(d * channels, channels) = window.middleCols(first, cols);
    pair.x_next.middleRows(d * channels, channels) = window.middleCols(first + 1, cols);
  }
  pair.validate();
  return pair;
}

/// Converts a duration in reference periods to a sample count, rounding half up.
inline Index periods_to_samples(double periods, double reference_period, double dt) {
  require(periods > 0.0 && reference_period > 0.0 && dt > 0.0, ErrorCode::NonPositiveInput,
          "periods, reference period and dt must all be positive");
  return static_cast<Index>(std::floor(periods * reference_period / dt + 0.5));
}

}  // namespace hdmd
