#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "hdmd/error.hpp"

namespace hdmd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;
using Index = Eigen::Index;

inline bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

/// Per-channel statistics applied by z-scoring, kept so forecasts can be
/// mapped back to physical units.
struct NormalizationContext {
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t size() const { return mean.size(); }

  static NormalizationContext identity(std::size_t channels) {
    return {std::vector<double>(channels, 0.0), std::vector<double>(channels, 1.0)};
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < mean.size(); ++i)
      if (mean[i] != 0.0 || std[i] != 1.0) return false;
    return true;
  }

  Matrix apply(const Matrix& values) const {
    require(static_cast<std::size_t>(values.rows()) == size(), ErrorCode::DimensionMismatch,
            "normalization context has " + std::to_string(size()) + " channels, data has " +
                std::to_string(values.rows()));
    Matrix out(values.rows(), values.cols());
    for (Index r = 0; r < values.rows(); ++r)
      out.row(r) = (values.row(r).array() - mean[r]) / std[r];
    return out;
  }

  Matrix invert(const Matrix& values) const {
    require(static_cast<std::size_t>(values.rows()) == size(), ErrorCode::DimensionMismatch,
            "normalization context has " + std::to_string(size()) + " channels, data has " +
                std::to_string(values.rows()));
    Matrix out(values.rows(), values.cols());
    for (Index r = 0; r < values.rows(); ++r)
      out.row(r) = values.row(r).array() * std[r] + mean[r];
    return out;
  }
};

/// Uniformly sampled multivariate record. Rows of `samples` are channels.
struct TimeSeriesSet {
  std::vector<std::string> channels;
  Matrix samples;
  double dt = 1.0;
  double t0 = 0.0;

  TimeSeriesSet() = default;
  TimeSeriesSet(std::vector<std::string> names, Matrix data, double step, double start = 0.0)
      : channels(std::move(names)), samples(std::move(data)), dt(step), t0(start) {
    validate();
  }

  Index n_channels() const { return samples.rows(); }
  Index n_samples() const { return samples.cols(); }
  double time(Index k) const { return t0 + static_cast<double>(k) * dt; }

  Index channel_index(const std::string& name) const {
    for (std::size_t i = 0; i < channels.size(); ++i)
      if (channels[i] == name) return static_cast<Index>(i);
    fail(ErrorCode::InvalidConfig, "unknown channel '" + name + "'");
  }

  TimeSeriesSet select(const std::vector<std::string>& names) const {
    Matrix out(static_cast<Index>(names.size()), n_samples());
    for (std::size_t i = 0; i < names.size(); ++i)
      out.row(static_cast<Index>(i)) = samples.row(channel_index(names[i]));
    return TimeSeriesSet(names, std::move(out), dt, t0);
  }

  void validate() const {
    require(dt > 0.0 && std::isfinite(dt), ErrorCode::NonPositiveInput, "sampling interval must be positive");
    require(static_cast<Index>(channels.size()) == samples.rows(), ErrorCode::DimensionMismatch,
            "channel name count does not match sample rows");
    require(samples.allFinite(), ErrorCode::NonFinite, "time series contains non-finite samples");
    std::unordered_set<std::string> seen;
    for (const auto& c : channels)
      require(seen.insert(c).second, ErrorCode::InvalidConfig, "duplicate channel name '" + c + "'");
  }
};

}  // namespace hdmd
