#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdmd/nowcast.hpp"
#include "hdmd/parallel.hpp"
#include "hdmd/random.hpp"

namespace hdmd {

/// Uniform priors on the observation length (reference periods) and on the
/// delay length as a fraction of the sampled observation length.
struct HyperPrior {
  double l_tr_lo = 1.0;
  double l_tr_hi = 5.0;
  double ratio_lo = 0.5;
  double ratio_hi = 0.75;
  int realizations = 100;
  std::uint64_t seed = 0;

  void validate() const {
    require(l_tr_lo > 0.0 && l_tr_lo <= l_tr_hi, ErrorCode::InvalidConfig, "need 0 < l_tr_lo <= l_tr_hi");
    require(ratio_lo >= 0.0 && ratio_lo <= ratio_hi && ratio_hi < 1.0, ErrorCode::InvalidConfig,
            "need 0 <= ratio_lo <= ratio_hi < 1");
    require(realizations >= 1, ErrorCode::InvalidConfig, "need at least one realization");
  }

  static HyperPrior point_mass(double l_tr, double l_d, std::uint64_t seed = 0) {
    return {l_tr, l_tr, l_d / l_tr, l_d / l_tr, 1, seed};
  }
};

inline constexpr int kRealizationRetries = 3;

struct RealizationRecord {
  int index = 0;
  int attempts = 0;
  double l_tr = 0.0;
  double l_d = 0.0;
  SampleCounts counts;
  bool ok = false;
  std::string error;
};

struct StochasticForecast {
  Index origin = 0;
  Matrix mean;
  Matrix std;
  int realizations = 0;  // members that contributed
  int requested = 0;
  double coverage_factor = 2.0;
  bool degraded = false;  // some realization exhausted its retry budget
  std::vector<RealizationRecord> log;
  std::vector<Matrix> members;  // filled only when requested

  Matrix lower() const { return mean - coverage_factor * std; }
  Matrix upper() const { return mean + coverage_factor * std; }
};

struct EnsembleOptions {
  bool keep_members = false;
  double coverage_factor = 2.0;
};

/// Integer part of a sample count, tolerant of representation error just
/// below an exact integer.
inline Index integer_part(double samples) { return static_cast<Index>(std::floor(samples + 1e-9)); }

/// Draws a hyperparameter pair for realization `index`, attempt `attempt`.
inline RealizationRecord draw_realization(const HyperPrior& prior, int index, Engine& engine, double l_te,
                                          double reference_period, double dt) {
  RealizationRecord rec;
  rec.index = index;
  rec.l_tr = uniform(engine, prior.l_tr_lo, prior.l_tr_hi);
  rec.l_d = rec.l_tr * uniform(engine, prior.ratio_lo, prior.ratio_hi);
  rec.counts.n_tr = periods_to_samples(rec.l_tr, reference_period, dt);
  rec.counts.n_d = integer_part(rec.l_d * reference_period / dt);
  rec.counts.n_te = periods_to_samples(l_te, reference_period, dt);
  return rec;
}

/// Entrywise mean and population standard deviation over ensemble members,
/// reduced in member order.
inline std::pair<Matrix, Matrix> ensemble_moments(const std::vector<Matrix>& members) {
  require(!members.empty(), ErrorCode::DegenerateData, "ensemble is empty");
  const double n = static_cast<double>(members.size());
  Matrix mean = Matrix::Zero(members.front().rows(), members.front().cols());
  for (const auto& m : members) mean += m;
  mean /= n;
  Matrix var = Matrix::Zero(mean.rows(), mean.cols());
  for (const auto& m : members) var += (m - mean).cwiseAbs2();
  var /= n;
  return {std::move(mean), var.cwiseSqrt()};
}

/// Monte Carlo ensemble of Hankel-DMD nowcasts over uniformly sampled
/// (l_tr, l_d). Each realization draws from its own seeded sub-stream, so
/// the result does not depend on the execution schedule.
inline StochasticForecast bayesian_nowcast(const TimeSeriesSet& series, Index origin, const HyperPrior& prior,
                                           double l_te, double reference_period, const EnsembleOptions& options = {}) {
  prior.validate();
  require(l_te > 0.0 && reference_period > 0.0, ErrorCode::InvalidConfig, "horizon and reference period must be positive");
  check_origin(series, origin, periods_to_samples(prior.l_tr_hi, reference_period, series.dt));

  const auto n = static_cast<std::size_t>(prior.realizations);
  std::vector<std::optional<Matrix>> results(n);
  std::vector<RealizationRecord> log(n);

  parallel_for(n, [&](std::size_t i) {
    Engine engine = make_engine(prior.seed, "hyperparameters", i);
    RealizationRecord rec;
    for (int attempt = 0; attempt <= kRealizationRetries; ++attempt) {
      rec = draw_realization(prior, static_cast<int>(i), engine, l_te, reference_period, series.dt);
      rec.attempts = attempt + 1;
      try {
        results[i] = nowcast(series, origin, rec.counts).values;
        rec.ok = true;
        break;
      } catch (const Error& e) {
        rec.error = e.what();
      }
    }
    log[i] = rec;
  });

  StochasticForecast out;
  out.origin = origin;
  out.requested = prior.realizations;
  out.coverage_factor = options.coverage_factor;
  std::vector<Matrix> members;
  members.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i])
      members.push_back(std::move(*results[i]));
    else
      out.degraded = true;
  }
  require(!members.empty(), ErrorCode::DegenerateData, "every realization failed: " + log.front().error);
  std::tie(out.mean, out.std) = ensemble_moments(members);
  out.realizations = static_cast<int>(members.size());
  out.log = std::move(log);
  if (options.keep_members) out.members = std::move(members);
  return out;
}

}  // namespace hdmd
