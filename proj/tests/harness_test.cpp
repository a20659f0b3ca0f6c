#include <gtest/gtest.h>

#include <numbers>

#include "hdmd/harness.hpp"
#include "hdmd/io.hpp"

using namespace hdmd;
using std::numbers::pi;

namespace {

constexpr double kPeriod = 8.0;
constexpr double kDt = kPeriod / 32;

TimeSeriesSet record(Index n) {
  Matrix x(2, n);
  std::srand(21);
  for (Index k = 0; k < n; ++k) {
    const double t = k * kDt;
    x(0, k) = std::sin(2 * pi * t / kPeriod) + 0.5 * std::cos(2 * pi * 1.3 * t / kPeriod);
    x(1, k) = std::cos(2 * pi * 0.8 * t / kPeriod + 0.3);
  }
  x += 0.1 * Matrix::Random(2, n);
  return TimeSeriesSet({"a", "b"}, x, kDt);
}

SweepConfig small_config(int starts) {
  SweepConfig cfg;
  cfg.n_starts = starts;
  cfg.reference_period = kPeriod;
  cfg.seed = 17;
  return cfg;
}

}  // namespace

TEST(Stats, QuartilesOfOneToEight) {
  const std::vector<double> v{5, 1, 8, 3, 2, 7, 4, 6};
  const Summary s = summarize(v);
  EXPECT_DOUBLE_EQ(s.q1, 2.75);
  EXPECT_DOUBLE_EQ(s.median, 4.5);
  EXPECT_DOUBLE_EQ(s.q3, 6.25);
  EXPECT_DOUBLE_EQ(s.whisker_lo, 1.0);
  EXPECT_DOUBLE_EQ(s.whisker_hi, 8.0);
  EXPECT_DOUBLE_EQ(s.mean, 4.5);
  EXPECT_NEAR(s.std, std::sqrt(5.25), 1e-15);
}

TEST(Stats, WhiskersStopAtFence) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 100};
  const Summary s = summarize(v);
  EXPECT_DOUBLE_EQ(s.q1, 3.0);
  EXPECT_DOUBLE_EQ(s.q3, 7.0);
  EXPECT_DOUBLE_EQ(s.whisker_hi, 8.0);
  EXPECT_DOUBLE_EQ(s.max, 100.0);
  EXPECT_DOUBLE_EQ(s.whisker_lo, 1.0);
}

TEST(Stats, SingleAndEmptySamples) {
  const std::vector<double> one{3.5};
  const Summary s = summarize(one);
  EXPECT_EQ(s.n, 1u);
  EXPECT_EQ(s.q1, 3.5);
  EXPECT_EQ(s.whisker_hi, 3.5);
  EXPECT_EQ(s.std, 0.0);
  EXPECT_TRUE(std::isnan(summarize(std::vector<double>{}).median));
}

TEST(Grid, DefaultGridHasFifteenFeasibleCells) {
  std::vector<GridCell> skipped;
  const auto cells = feasible_cells(SweepConfig{}, &skipped);
  EXPECT_EQ(cells.size(), 15u);
  EXPECT_EQ(skipped.size(), 21u);
  for (const auto& c : cells) EXPECT_LT(c.l_d, c.l_tr);
}

TEST(Grid, OriginSampling) {
  bool replaced = true;
  const auto o = sample_origins(10, 1000, 250, 3, &replaced);
  EXPECT_FALSE(replaced);
  ASSERT_EQ(o.size(), 250u);
  EXPECT_TRUE(std::is_sorted(o.begin(), o.end()));
  EXPECT_EQ(std::adjacent_find(o.begin(), o.end()), o.end());
  EXPECT_GE(o.front(), 10);
  EXPECT_LE(o.back(), 1000);
  EXPECT_EQ(o, sample_origins(10, 1000, 250, 3));

  const auto small = sample_origins(5, 8, 10, 3, &replaced);
  EXPECT_TRUE(replaced);
  EXPECT_EQ(small.size(), 10u);
  EXPECT_THROW(sample_origins(5, 4, 1, 0), Error);
}

TEST(Sweep, StructureAndCounts) {
  const TimeSeriesSet s = record(900);
  const SweepConfig cfg = small_config(12);
  const SweepReport r = run_sweep(s, cfg);
  EXPECT_EQ(r.entries.size(), 15u);
  EXPECT_EQ(r.feasible_cells, 15u);
  EXPECT_EQ(r.origins.size(), 12u);
  for (Index o : r.origins) {
    EXPECT_GE(o, 160);
    EXPECT_LE(o, 900 - 1 - 160);
  }
  for (const auto& e : r.entries) {
    ASSERT_EQ(e.horizons.size(), 3u);
    for (const auto& h : e.horizons)
      for (Metric m : kMetrics) {
        const auto& ms = h[m];
        EXPECT_EQ(ms.values.size() + e.failures.size(), r.origins.size());
        EXPECT_EQ(ms.summary.n, ms.values.size());
      }
    EXPECT_EQ(e.at(2.0).steps, 64);
  }
  EXPECT_EQ(audit_report(r), 0.0);
  EXPECT_EQ(r.entry("ltr=5;ld=4").counts.n_tr, 160);
  EXPECT_EQ(r.entry("ltr=1;ld=0.5").label, "ltr=1;ld=0.5");
  EXPECT_THROW(r.entry("ltr=0.5;ld=0.5"), Error);
}

TEST(Sweep, SingleStartPoint) {
  const TimeSeriesSet s = record(900);
  const SweepReport r = run_sweep(s, small_config(1));
  EXPECT_EQ(r.origins.size(), 1u);
  for (const auto& e : r.entries)
    for (const auto& h : e.horizons) {
      const auto& ms = h[Metric::Nrmse];
      if (ms.values.empty()) continue;
      EXPECT_EQ(ms.summary.q1, ms.values[0]);
      EXPECT_EQ(ms.summary.q3, ms.values[0]);
    }
}

TEST(Sweep, Reproducible) {
  const TimeSeriesSet s = record(900);
  const SweepReport a = run_sweep(s, small_config(6));
  const SweepReport b = run_sweep(s, small_config(6));
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(Sweep, RecordTooShort) {
  const TimeSeriesSet s = record(300);
  try {
    run_sweep(s, small_config(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RecordTooShort);
  }
}

TEST(Sweep, EmptyGridRejected) {
  SweepConfig cfg = small_config(3);
  cfg.l_tr_levels = {1};
  cfg.l_d_levels = {2, 3};
  EXPECT_THROW(run_sweep(record(900), cfg), Error);
}

TEST(Compare, PointMassPriorGivesZeroDeltas) {
  const TimeSeriesSet s = record(900);
  const SweepConfig cfg = small_config(8);
  const SweepReport sweep = run_sweep(s, cfg);
  const ReportEntry& best = best_cell(sweep);
  const HyperPrior p = HyperPrior::point_mass(best.l_tr, best.l_d, 4);
  const SweepReport cmp = compare_bayesian(s, sweep, best, p, cfg);
  ASSERT_EQ(cmp.entries.size(), 2u);
  EXPECT_EQ(cmp.origins, sweep.origins);
  EXPECT_EQ(cmp.deltas.size(), 9u);
  for (const auto& d : cmp.deltas) {
    EXPECT_EQ(d.n_pairs, sweep.origins.size());
    EXPECT_EQ(d.mean_delta, 0.0);
    EXPECT_EQ(d.median_delta, 0.0);
  }
}

TEST(Compare, DeltasArePairedByOrigin) {
  const TimeSeriesSet s = record(900);
  const SweepConfig cfg = small_config(8);
  const SweepReport sweep = run_sweep(s, cfg);
  const ReportEntry& best = best_cell(sweep);
  HyperPrior p;
  p.realizations = 10;
  p.seed = 5;
  const SweepReport cmp = compare_bayesian(s, sweep, best, p, cfg);
  const auto& det = cmp.entry("deterministic-best").at(1.0)[Metric::Nrmse];
  const auto& bay = cmp.entry("bayesian").at(1.0)[Metric::Nrmse];
  ASSERT_EQ(det.origins, bay.origins);
  double sum = 0.0;
  for (std::size_t i = 0; i < det.values.size(); ++i) sum += bay.values[i] - det.values[i];
  EXPECT_NEAR(cmp.deltas[0].mean_delta, sum / static_cast<double>(det.values.size()), 1e-12);
  EXPECT_EQ(audit_report(cmp), 0.0);
}

TEST(Compare, BestCellHasLowestShortHorizonError) {
  const TimeSeriesSet s = record(900);
  const SweepReport sweep = run_sweep(s, small_config(8));
  const ReportEntry& best = best_cell(sweep);
  for (const auto& e : sweep.entries)
    EXPECT_LE(best.at(1.0)[Metric::Nrmse].summary.mean, e.at(1.0)[Metric::Nrmse].summary.mean);
}

TEST(Timing, SingleRepetitionHasZeroSpread) {
  const TimeSeriesSet s = record(400);
  const TimingSummary t = benchmark_timing(s, HankelSpec{8, 40}, 32, 1);
  EXPECT_EQ(t.repetitions, 1);
  EXPECT_EQ(t.std, 0.0);
  EXPECT_EQ(t.min, t.max);
  EXPECT_GT(t.mean, 0.0);
  EXPECT_THROW(benchmark_timing(s, HankelSpec{8, 40}, 32, 0), Error);
}
