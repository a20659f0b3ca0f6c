#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hdmd/types.hpp"

namespace hdmd {

inline constexpr int kDefaultJsdBins = 32;

struct MetricsTriple {
  double nrmse = 0.0;
  double nammae = 0.0;
  double jsd = 0.0;
  double horizon = 0.0;  // reference periods
  Index n_vars = 0;
};

namespace detail {

inline void check_pair(const Eigen::Ref<const Matrix>& pred, const Eigen::Ref<const Matrix>& truth) {
  require(pred.rows() == truth.rows() && pred.cols() == truth.cols(), ErrorCode::DimensionMismatch,
          "prediction and truth differ in shape");
  require(pred.rows() >= 1 && pred.cols() >= 1, ErrorCode::DimensionMismatch, "empty metric window");
  require(pred.allFinite() && truth.allFinite(), ErrorCode::NonFinite, "metric inputs contain NaN or Inf");
}

inline double truth_std(const Eigen::Ref<const Eigen::RowVectorXd>& row, Index var) {
  const double m = row.mean();
  const double s = std::sqrt((row.array() - m).square().mean());
  require(s > 0.0, ErrorCode::ZeroVarianceTruth, "truth of variable " + std::to_string(var) + " has zero variance");
  return s;
}

// K(y) ln(K(y)/H(y)) summed where K > 0; H >= K/2 > 0 there.
inline double kl_to_mixture(const std::vector<double>& k, const std::vector<double>& m) {
  double sum = 0.0;
  for (std::size_t b = 0; b < k.size(); ++b)
    if (k[b] > 0.0) sum += k[b] * std::log(k[b] / m[b]);
  return sum;
}

}  // namespace detail

/// Mean over variables of the RMS error normalized by the truth's
/// population standard deviation over the window. Rows are variables.
inline double nrmse(const Eigen::Ref<const Matrix>& pred, const Eigen::Ref<const Matrix>& truth) {
  detail::check_pair(pred, truth);
  double total = 0.0;
  for (Index i = 0; i < truth.rows(); ++i) {
    const double s = detail::truth_std(truth.row(i), i);
    const double mse = (pred.row(i) - truth.row(i)).squaredNorm() / static_cast<double>(truth.cols());
    total += std::sqrt(mse / (s * s));
  }
  return total / static_cast<double>(truth.rows());
}

/// Normalized average error of the window minimum and maximum.
inline double nammae(const Eigen::Ref<const Matrix>& pred, const Eigen::Ref<const Matrix>& truth) {
  detail::check_pair(pred, truth);
  double total = 0.0;
  for (Index i = 0; i < truth.rows(); ++i) {
    const double s = detail::truth_std(truth.row(i), i);
    const double lo = std::abs(pred.row(i).minCoeff() - truth.row(i).minCoeff());
    const double hi = std::abs(pred.row(i).maxCoeff() - truth.row(i).maxCoeff());
    total += (lo + hi) / (2.0 * s);
  }
  return total / static_cast<double>(truth.rows());
}

/// Probability mass of `row` on `bins` equal-width bins spanning [lo, hi].
inline std::vector<double> histogram_pmf(const Eigen::Ref<const Eigen::RowVectorXd>& row, double lo, double hi,
                                         int bins) {
  std::vector<double> pmf(static_cast<std::size_t>(bins), 0.0);
  const double width = hi - lo;
  for (Index j = 0; j < row.size(); ++j) {
    int b = 0;
    if (width > 0.0) b = std::clamp(static_cast<int>(std::floor((row(j) - lo) / width * bins)), 0, bins - 1);
    pmf[static_cast<std::size_t>(b)] += 1.0;
  }
  for (double& p : pmf) p /= static_cast<double>(row.size());
  return pmf;
}

/// Jensen-Shannon divergence (natural log) between the value histograms of
/// prediction and truth, on shared bins over the joint range, averaged over
/// variables. Bounded by ln 2.
inline double jsd(const Eigen::Ref<const Matrix>& pred, const Eigen::Ref<const Matrix>& truth,
                  int bins = kDefaultJsdBins) {
  detail::check_pair(pred, truth);
  require(bins >= 2, ErrorCode::InvalidConfig, "JSD needs at least 2 bins");
  double total = 0.0;
  for (Index i = 0; i < truth.rows(); ++i) {
    const double lo = std::min(pred.row(i).minCoeff(), truth.row(i).minCoeff());
    const double hi = std::max(pred.row(i).maxCoeff(), truth.row(i).maxCoeff());
    const auto q = histogram_pmf(pred.row(i), lo, hi, bins);
    const auto r = histogram_pmf(truth.row(i), lo, hi, bins);
    std::vector<double> m(q.size());
    for (std::size_t b = 0; b < q.size(); ++b) m[b] = 0.5 * (q[b] + r[b]);
    total += 0.5 * detail::kl_to_mixture(q, m) + 0.5 * detail::kl_to_mixture(r, m);
  }
  return total / static_cast<double>(truth.rows());
}

inline MetricsTriple evaluate(const Eigen::Ref<const Matrix>& pred, const Eigen::Ref<const Matrix>& truth,
                              double horizon_periods = 0.0, int bins = kDefaultJsdBins) {
  return {nrmse(pred, truth), nammae(pred, truth), jsd(pred, truth, bins), horizon_periods, truth.rows()};
}

}  // namespace hdmd
