#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hdmd/bayesian.hpp"
#include "hdmd/metrics.hpp"
#include "hdmd/nowcast.hpp"
#include "hdmd/parallel.hpp"
#include "hdmd/random.hpp"
#include "hdmd/stats.hpp"

namespace hdmd {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kCodeVersion = "hdmd 0.1.0";

enum class Metric { Nrmse = 0, Nammae = 1, Jsd = 2 };
inline constexpr std::array<Metric, 3> kMetrics{Metric::Nrmse, Metric::Nammae, Metric::Jsd};

constexpr std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::Nrmse: return "nrmse";
    case Metric::Nammae: return "nammae";
    case Metric::Jsd: return "jsd";
  }
  return "unknown";
}

inline double metric_value(const MetricsTriple& t, Metric m) {
  switch (m) {
    case Metric::Nrmse: return t.nrmse;
    case Metric::Nammae: return t.nammae;
    case Metric::Jsd: return t.jsd;
  }
  return 0.0;
}

struct SweepConfig {
  std::vector<double> l_tr_levels{0.5, 1, 2, 3, 4, 5};
  std::vector<double> l_d_levels{0.5, 1, 2, 3, 4, 5};
  int n_starts = 250;
  std::vector<double> horizons{1, 2, 5};
  double max_horizon = 5.0;
  int bins = kDefaultJsdBins;
  std::uint64_t seed = 0;
  double reference_period = 1.0;
  /// Earliest origin is chosen so this much history (reference periods) is
  /// available; zero means the longest grid observation length.
  double history = 0.0;

  void validate() const {
    require(!l_tr_levels.empty() && !l_d_levels.empty(), ErrorCode::InvalidConfig, "empty hyperparameter grid");
    for (double v : l_tr_levels) require(v > 0.0, ErrorCode::InvalidConfig, "grid levels must be positive");
    for (double v : l_d_levels) require(v > 0.0, ErrorCode::InvalidConfig, "grid levels must be positive");
    require(n_starts >= 1, ErrorCode::InvalidConfig, "need at least one start point");
    require(!horizons.empty(), ErrorCode::InvalidConfig, "need at least one horizon");
    for (double h : horizons)
      require(h > 0.0 && h <= max_horizon, ErrorCode::InvalidConfig, "horizons must lie in (0, max_horizon]");
    require(bins >= 2, ErrorCode::InvalidConfig, "JSD needs at least 2 bins");
    require(reference_period > 0.0, ErrorCode::InvalidConfig, "reference period must be positive");
  }

  double longest_history() const {
    return std::max(history, *std::max_element(l_tr_levels.begin(), l_tr_levels.end()));
  }
  double longest_horizon() const { return *std::max_element(horizons.begin(), horizons.end()); }
};

struct GridCell {
  double l_tr = 0.0;
  double l_d = 0.0;
};

/// Grid cells satisfying the strict feasibility rule l_d < l_tr, in
/// (l_tr, l_d) level order.
inline std::vector<GridCell> feasible_cells(const SweepConfig& cfg, std::vector<GridCell>* skipped = nullptr) {
  std::vector<GridCell> cells;
  for (double tr : cfg.l_tr_levels)
    for (double d : cfg.l_d_levels) {
      if (d < tr)
        cells.push_back({tr, d});
      else if (skipped)
        skipped->push_back({tr, d});
    }
  return cells;
}

/// Metric samples for one (entry, horizon, metric), aligned with `origins`.
struct MetricSeries {
  std::vector<Index> origins;
  std::vector<double> values;
  Summary summary;
};

struct HorizonResult {
  double horizon = 0.0;  // reference periods
  Index steps = 0;
  std::array<MetricSeries, 3> metrics;

  MetricSeries& operator[](Metric m) { return metrics[static_cast<std::size_t>(m)]; }
  const MetricSeries& operator[](Metric m) const { return metrics[static_cast<std::size_t>(m)]; }
};

struct OriginFailure {
  Index origin = 0;
  std::string error;
};

struct ReportEntry {
  std::string label;
  std::string method;  // "deterministic" or "bayesian"
  double l_tr = 0.0;
  double l_d = 0.0;
  SampleCounts counts;
  std::optional<HyperPrior> prior;
  std::vector<HorizonResult> horizons;
  std::vector<OriginFailure> failures;
  int degraded_ensembles = 0;

  const HorizonResult& at(double horizon) const {
    for (const auto& h : horizons)
      if (h.horizon == horizon) return h;
    fail(ErrorCode::InvalidConfig, "entry " + label + " has no horizon " + std::to_string(horizon));
  }
};

struct PairedDelta {
  double horizon = 0.0;
  Metric metric = Metric::Nrmse;
  std::size_t n_pairs = 0;
  double mean_delta = 0.0;  // bayesian - deterministic
  double median_delta = 0.0;
};

struct Provenance {
  std::string dataset_id;
  std::uint64_t seed = 0;
  std::uint64_t origin_seed = 0;
  std::uint64_t hyperparameter_seed = 0;
  std::string config_hash;
  std::string code_version{kCodeVersion};
};

struct SweepReport {
  int schema_version = kReportSchemaVersion;
  std::string quartile_rule{kQuartileRule};
  double reference_period = 1.0;
  double dt = 1.0;
  int bins = kDefaultJsdBins;
  std::vector<Index> origins;
  bool origins_with_replacement = false;
  std::vector<GridCell> skipped_cells;
  std::size_t feasible_cells = 0;
  std::vector<ReportEntry> entries;
  std::vector<PairedDelta> deltas;
  Provenance provenance;

  const ReportEntry& entry(const std::string& label) const {
    for (const auto& e : entries)
      if (e.label == label) return e;
    fail(ErrorCode::InvalidConfig, "report has no entry '" + label + "'");
  }
};

inline std::string cell_label(double l_tr, double l_d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "ltr=%g;ld=%g", l_tr, l_d);
  return buf;
}

/// Draws `count` origins in [lo, hi] uniformly without replacement (with
/// replacement only when the range is too small), returned ascending.
inline std::vector<Index> sample_origins(Index lo, Index hi, int count, std::uint64_t seed, bool* replaced = nullptr) {
  require(hi >= lo, ErrorCode::RecordTooShort, "record too short: no valid prediction origin");
  Engine engine = make_engine(seed, "origins");
  const Index range = hi - lo + 1;
  std::vector<Index> out;
  if (range >= count) {
    std::vector<Index> pool(static_cast<std::size_t>(range));
    std::iota(pool.begin(), pool.end(), lo);
    for (int i = 0; i < count; ++i) {
      const auto j = static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(uniform01(engine) * static_cast<double>(range - i));
      std::swap(pool[static_cast<std::size_t>(i)], pool[std::min(j, pool.size() - 1)]);
      out.push_back(pool[static_cast<std::size_t>(i)]);
    }
    if (replaced) *replaced = false;
  } else {
    for (int i = 0; i < count; ++i)
      out.push_back(lo + std::min(range - 1, static_cast<Index>(uniform01(engine) * static_cast<double>(range))));
    if (replaced) *replaced = true;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Valid origin range for the configuration: enough history behind, the
/// longest horizon of truth ahead.
inline std::pair<Index, Index> origin_bounds(const TimeSeriesSet& series, const SweepConfig& cfg) {
  const Index history = periods_to_samples(cfg.longest_history(), cfg.reference_period, series.dt);
  const Index ahead = periods_to_samples(cfg.longest_horizon(), cfg.reference_period, series.dt);
  const Index lo = history;
  const Index hi = series.n_samples() - 1 - ahead;
  require(hi >= lo, ErrorCode::RecordTooShort,
          "record of " + std::to_string(series.n_samples()) + " samples cannot hold " + std::to_string(history) +
              " history + " + std::to_string(ahead) + " forecast samples");
  return {lo, hi};
}

/// Scores forecast columns 1..steps (the origin column is excluded)
/// against the record for every horizon.
inline std::vector<MetricsTriple> score_horizons(const Matrix& values, const TimeSeriesSet& series, Index origin,
                                                 const std::vector<double>& horizons, double reference_period,
                                                 int bins) {
  std::vector<MetricsTriple> out;
  for (double h : horizons) {
    const Index steps = periods_to_samples(h, reference_period, series.dt);
    require(values.cols() > steps, ErrorCode::InvalidConfig, "forecast shorter than scored horizon");
    const Matrix truth = truth_after(series, origin, steps);
    out.push_back(evaluate(values.middleCols(1, steps), truth, h, bins));
  }
  return out;
}

/// Recomputes every summary from its raw samples.
inline void refresh_summaries(ReportEntry& entry) {
  for (auto& h : entry.horizons)
    for (auto& m : h.metrics) m.summary = summarize(m.values);
}

namespace detail {

inline ReportEntry collect_entry(ReportEntry entry, const std::vector<Index>& origins,
                                 const std::vector<std::optional<std::vector<MetricsTriple>>>& scores,
                                 const std::vector<std::string>& errors, const SweepConfig& cfg, double dt) {
  for (double h : cfg.horizons) {
    HorizonResult hr;
    hr.horizon = h;
    hr.steps = periods_to_samples(h, cfg.reference_period, dt);
    entry.horizons.push_back(hr);
  }
  for (std::size_t o = 0; o < origins.size(); ++o) {
    if (!scores[o]) {
      entry.failures.push_back({origins[o], errors[o]});
      continue;
    }
    for (std::size_t h = 0; h < cfg.horizons.size(); ++h)
      for (Metric m : kMetrics) {
        auto& series = entry.horizons[h][m];
        series.origins.push_back(origins[o]);
        series.values.push_back(metric_value((*scores[o])[h], m));
      }
  }
  refresh_summaries(entry);
  return entry;
}

inline bool all_finite(const std::vector<MetricsTriple>& t) {
  for (const auto& x : t)
    if (!std::isfinite(x.nrmse) || !std::isfinite(x.nammae) || !std::isfinite(x.jsd)) return false;
  return true;
}

}  // namespace detail

/// Deterministic evaluation of every feasible grid cell on a shared set of
/// random origins.
inline SweepReport run_sweep(const TimeSeriesSet& series, const SweepConfig& cfg) {
  cfg.validate();
  SweepReport report;
  report.reference_period = cfg.reference_period;
  report.dt = series.dt;
  report.bins = cfg.bins;
  report.provenance.seed = cfg.seed;
  report.provenance.origin_seed = substream_seed(cfg.seed, "origins");

  const std::vector<GridCell> cells = feasible_cells(cfg, &report.skipped_cells);
  require(!cells.empty(), ErrorCode::InvalidConfig, "hyperparameter grid has no feasible cell (need l_d < l_tr)");
  report.feasible_cells = cells.size();

  const auto [lo, hi] = origin_bounds(series, cfg);
  report.origins = sample_origins(lo, hi, cfg.n_starts, cfg.seed, &report.origins_with_replacement);
  const std::size_t n_orig = report.origins.size();
  const Index n_te = periods_to_samples(cfg.longest_horizon(), cfg.reference_period, series.dt);

  std::vector<SampleCounts> counts(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    NowcastConfig nc{cells[c].l_tr, cells[c].l_d, cfg.longest_horizon(), cfg.reference_period};
    counts[c] = nc.counts(series.dt);
    counts[c].n_te = n_te;
  }

  const std::size_t n_tasks = cells.size() * n_orig;
  std::vector<std::optional<std::vector<MetricsTriple>>> scores(n_tasks);
  std::vector<std::string> errors(n_tasks);
  parallel_for(n_tasks, [&](std::size_t task) {
    const std::size_t c = task / n_orig;
    const Index origin = report.origins[task % n_orig];
    try {
      const Forecast f = nowcast(series, origin, counts[c]);
      auto s = score_horizons(f.values, series, origin, cfg.horizons, cfg.reference_period, cfg.bins);
      if (detail::all_finite(s))
        scores[task] = std::move(s);
      else
        errors[task] = "non-finite metric";
    } catch (const Error& e) {
      errors[task] = e.what();
    }
  });

  for (std::size_t c = 0; c < cells.size(); ++c) {
    ReportEntry entry;
    entry.label = cell_label(cells[c].l_tr, cells[c].l_d);
    entry.method = "deterministic";
    entry.l_tr = cells[c].l_tr;
    entry.l_d = cells[c].l_d;
    entry.counts = counts[c];
    const auto first = static_cast<std::ptrdiff_t>(c * n_orig);
    std::vector<std::optional<std::vector<MetricsTriple>>> cell_scores(scores.begin() + first,
                                                                      scores.begin() + first + static_cast<std::ptrdiff_t>(n_orig));
    std::vector<std::string> cell_errors(errors.begin() + first, errors.begin() + first + static_cast<std::ptrdiff_t>(n_orig));
    report.entries.push_back(detail::collect_entry(std::move(entry), report.origins, cell_scores, cell_errors, cfg, series.dt));
  }
  return report;
}

/// Deterministic entry with the lowest mean NRMSE at the shortest horizon.
inline const ReportEntry& best_cell(const SweepReport& report) {
  const ReportEntry* best = nullptr;
  for (const auto& e : report.entries) {
    if (e.method != "deterministic" || e.horizons.empty()) continue;
    const auto shortest = std::min_element(e.horizons.begin(), e.horizons.end(),
                                           [](const auto& a, const auto& b) { return a.horizon < b.horizon; });
    const double m = (*shortest)[Metric::Nrmse].summary.mean;
    if (!std::isfinite(m)) continue;
    if (!best) {
      best = &e;
      continue;
    }
    const auto bs = std::min_element(best->horizons.begin(), best->horizons.end(),
                                     [](const auto& a, const auto& b) { return a.horizon < b.horizon; });
    if (m < (*bs)[Metric::Nrmse].summary.mean) best = &e;
  }
  require(best != nullptr, ErrorCode::DegenerateData, "no deterministic entry with finite NRMSE");
  return *best;
}

/// Bayesian ensemble on the origins of `sweep`, paired per origin with the
/// deterministic entry `baseline`.
inline SweepReport compare_bayesian(const TimeSeriesSet& series, const SweepReport& sweep, const ReportEntry& baseline,
                                    const HyperPrior& prior, const SweepConfig& cfg) {
  cfg.validate();
  prior.validate();
  SweepReport report;
  report.reference_period = cfg.reference_period;
  report.dt = series.dt;
  report.bins = cfg.bins;
  report.origins = sweep.origins;
  report.origins_with_replacement = sweep.origins_with_replacement;
  report.skipped_cells = sweep.skipped_cells;
  report.feasible_cells = sweep.feasible_cells;
  report.provenance = sweep.provenance;
  report.provenance.hyperparameter_seed = substream_seed(prior.seed, "hyperparameters");

  const std::size_t n_orig = report.origins.size();
  std::vector<std::optional<std::vector<MetricsTriple>>> scores(n_orig);
  std::vector<std::string> errors(n_orig);
  std::vector<char> degraded(n_orig, 0);
  // Realizations already run in parallel inside each ensemble.
  for (std::size_t o = 0; o < n_orig; ++o) {
    const Index origin = report.origins[o];
    try {
      const StochasticForecast sf =
          bayesian_nowcast(series, origin, prior, cfg.longest_horizon(), cfg.reference_period);
      degraded[o] = sf.degraded ? 1 : 0;
      auto s = score_horizons(sf.mean, series, origin, cfg.horizons, cfg.reference_period, cfg.bins);
      if (detail::all_finite(s))
        scores[o] = std::move(s);
      else
        errors[o] = "non-finite metric";
    } catch (const Error& e) {
      errors[o] = e.what();
    }
  }

  ReportEntry det = baseline;
  det.label = "deterministic-best";
  report.entries.push_back(det);

  ReportEntry bayes;
  bayes.label = "bayesian";
  bayes.method = "bayesian";
  bayes.prior = prior;
  bayes.degraded_ensembles = static_cast<int>(std::count(degraded.begin(), degraded.end(), 1));
  report.entries.push_back(detail::collect_entry(std::move(bayes), report.origins, scores, errors, cfg, series.dt));

  const ReportEntry& b = report.entries.back();
  for (double h : cfg.horizons) {
    const HorizonResult& hd = det.at(h);
    const HorizonResult& hb = b.at(h);
    for (Metric m : kMetrics) {
      std::vector<double> diffs;
      const auto& sd = hd[m];
      const auto& sb = hb[m];
      std::size_t i = 0;
      for (std::size_t j = 0; j < sb.origins.size(); ++j) {
        while (i < sd.origins.size() && sd.origins[i] < sb.origins[j]) ++i;
        if (i < sd.origins.size() && sd.origins[i] == sb.origins[j]) diffs.push_back(sb.values[j] - sd.values[i]);
      }
      const Summary s = summarize(diffs);
      report.deltas.push_back({h, m, diffs.size(), s.mean, s.median});
    }
  }
  return report;
}

struct TimingSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;
  int repetitions = 0;
};

/// Wall time of fit + forecast on a pre-built Hankel pair taken from the
/// leading `spec.window` samples of the z-scored record.
inline TimingSummary benchmark_timing(const TimeSeriesSet& series, const HankelSpec& spec, Index n_te, int repetitions) {
  require(repetitions >= 1, ErrorCode::InvalidConfig, "need at least one repetition");
  require(series.n_samples() >= spec.window, ErrorCode::RecordTooShort, "record shorter than benchmark window");
  const IndexRange window{0, spec.window};
  const NormalizationContext norm = normalization_over(series.samples, window, &series.channels);
  const Matrix train = norm.apply(series.samples.leftCols(spec.window));
  const SnapshotPair pair = build_hankel(train, spec, series.dt);

  std::vector<double> times;
  double sink = 0.0;
  for (int r = 0; r < repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    DmdModel model = fit_dmd(pair, DmdOptions{series.n_channels()});
    model.norm = norm;
    const Matrix f = forecast(model, n_te, Units::Physical);
    const auto stop = std::chrono::steady_clock::now();
    sink += f(0, 0);
    times.push_back(std::chrono::duration<double>(stop - start).count());
  }
  (void)sink;
  const Summary s = summarize(times);
  return {s.min, s.max, s.mean, s.std, repetitions};
}

}  // namespace hdmd
