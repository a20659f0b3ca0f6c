#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hdmd/bayesian.hpp"
#include "hdmd/harness.hpp"
#include "hdmd/random.hpp"
#include "hdmd/types.hpp"

namespace hdmd {

using Json = nlohmann::ordered_json;

/// Fixed 15-significant-digit rendering used in every CSV artifact.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string config_hash(const Json& config) { return hex64(fnv1a64(config.dump())); }

// ---------------------------------------------------------------- CSV ----

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    std::size_t b = 0;
    while (b < field.size() && field[b] == ' ') ++b;
    fields.push_back(field.substr(b));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

/// Writes header `t,<channels...>` followed by one row per sample.
inline void write_csv(std::ostream& out, const TimeSeriesSet& series) {
  out << "t";
  for (const auto& c : series.channels) out << ',' << c;
  out << '\n';
  for (Index k = 0; k < series.n_samples(); ++k) {
    out << format_number(series.time(k));
    for (Index r = 0; r < series.n_channels(); ++r) out << ',' << format_number(series.samples(r, k));
    out << '\n';
  }
}

inline void write_csv(const std::string& path, const TimeSeriesSet& series) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  write_csv(out, series);
}

/// Parses a harness CSV. The first column must be `t` (seconds) and
/// uniformly spaced to within 1e-6 dt. Lines starting with '#' are skipped.
inline TimeSeriesSet read_csv(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  bool got = false;
  while ((got = static_cast<bool>(std::getline(in, line))) && !line.empty() && line[0] == '#') {
  }
  require(got, ErrorCode::ParseError, source + ": empty file");
  const auto header = split_csv_line(line);
  require(header.size() >= 2 && header.front() == "t", ErrorCode::ParseError,
          source + ": header must start with 't' followed by at least one channel");
  const std::vector<std::string> names(header.begin() + 1, header.end());

  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    require(fields.size() == header.size(), ErrorCode::ParseError,
            source + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " fields");
    std::vector<double> row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      try {
        std::size_t used = 0;
        const double v = std::stod(fields[i], &used);
        require(used == fields[i].size(), ErrorCode::ParseError, "trailing characters");
        row.push_back(v);
      } catch (const std::exception&) {
        fail(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": bad number '" + fields[i] + "'");
      }
    }
    times.push_back(row.front());
    rows.emplace_back(row.begin() + 1, row.end());
  }
  require(times.size() >= 2, ErrorCode::RecordTooShort, source + ": need at least two samples");

  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  require(dt > 0.0, ErrorCode::ParseError, source + ": time column must increase");
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double expected = times.front() + static_cast<double>(k) * dt;
    require(std::abs(times[k] - expected) <= 1e-6 * dt, ErrorCode::ParseError,
            source + ": irregular timestamp at row " + std::to_string(k + 1));
  }
  Matrix samples(static_cast<Index>(names.size()), static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t r = 0; r < names.size(); ++r)
      samples(static_cast<Index>(r), static_cast<Index>(k)) = rows[k][r];
  return TimeSeriesSet(names, std::move(samples), dt, times.front());
}

inline TimeSeriesSet read_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  return read_csv(in, path);
}

/// Forecast table: time, channels, and `<channel>_std` when `std` is given.
inline void write_forecast_csv(std::ostream& out, const std::vector<std::string>& channels, double t_origin, double dt,
                               const Matrix& values, const Matrix* std = nullptr) {
  out << "t";
  for (const auto& c : channels) out << ',' << c;
  if (std)
    for (const auto& c : channels) out << ',' << c << "_std";
  out << '\n';
  for (Index k = 0; k < values.cols(); ++k) {
    out << format_number(t_origin + static_cast<double>(k) * dt);
    for (Index r = 0; r < values.rows(); ++r) out << ',' << format_number(values(r, k));
    if (std)
      for (Index r = 0; r < values.rows(); ++r) out << ',' << format_number((*std)(r, k));
    out << '\n';
  }
}

// --------------------------------------------------------------- JSON ----

inline Json to_json(const Summary& s) {
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return Json{{"q1", num(s.q1)},         {"median", num(s.median)}, {"q3", num(s.q3)},
              {"whisker_lo", num(s.whisker_lo)}, {"whisker_hi", num(s.whisker_hi)}, {"mean", num(s.mean)},
              {"std", num(s.std)},       {"min", num(s.min)},       {"max", num(s.max)},
              {"n", s.n}};
}

inline Json to_json(const HyperPrior& p) {
  return Json{{"l_tr", {p.l_tr_lo, p.l_tr_hi}},
              {"l_d_ratio", {p.ratio_lo, p.ratio_hi}},
              {"realizations", p.realizations},
              {"seed", p.seed}};
}

inline Json to_json(const ReportEntry& e) {
  Json j{{"label", e.label}, {"method", e.method}};
  if (e.method == "deterministic") {
    j["l_tr"] = e.l_tr;
    j["l_d"] = e.l_d;
    j["n_tr"] = e.counts.n_tr;
    j["n_d"] = e.counts.n_d;
  }
  if (e.prior) j["prior"] = to_json(*e.prior);
  Json horizons = Json::array();
  for (const auto& h : e.horizons) {
    Json hj{{"horizon", h.horizon}, {"steps", h.steps}};
    Json metrics = Json::object();
    for (Metric m : kMetrics) {
      const auto& s = h[m];
      metrics[std::string(to_string(m))] = Json{{"summary", to_json(s.summary)}, {"origins", s.origins}, {"values", s.values}};
    }
    hj["metrics"] = std::move(metrics);
    horizons.push_back(std::move(hj));
  }
  j["horizons"] = std::move(horizons);
  Json failures = Json::array();
  for (const auto& f : e.failures) failures.push_back(Json{{"origin", f.origin}, {"error", f.error}});
  j["failures"] = std::move(failures);
  j["failure_count"] = e.failures.size();
  if (e.method == "bayesian") j["degraded_ensembles"] = e.degraded_ensembles;
  return j;
}

inline Json to_json(const SweepReport& r) {
  Json j;
  j["schema_version"] = r.schema_version;
  j["quartile_rule"] = r.quartile_rule;
  j["provenance"] = Json{{"dataset_id", r.provenance.dataset_id},
                         {"seed", r.provenance.seed},
                         {"origin_seed", r.provenance.origin_seed},
                         {"hyperparameter_seed", r.provenance.hyperparameter_seed},
                         {"config_hash", r.provenance.config_hash},
                         {"code_version", r.provenance.code_version}};
  j["reference_period"] = r.reference_period;
  j["dt"] = r.dt;
  j["jsd_bins"] = r.bins;
  j["feasible_cells"] = r.feasible_cells;
  Json skipped = Json::array();
  for (const auto& c : r.skipped_cells) skipped.push_back(Json{{"l_tr", c.l_tr}, {"l_d", c.l_d}});
  j["skipped_cells"] = std::move(skipped);
  j["origins"] = r.origins;
  j["origins_with_replacement"] = r.origins_with_replacement;
  Json entries = Json::array();
  for (const auto& e : r.entries) entries.push_back(to_json(e));
  j["entries"] = std::move(entries);
  Json deltas = Json::array();
  for (const auto& d : r.deltas)
    deltas.push_back(Json{{"horizon", d.horizon},
                          {"metric", std::string(to_string(d.metric))},
                          {"n_pairs", d.n_pairs},
                          {"mean_delta", d.mean_delta},
                          {"median_delta", d.median_delta}});
  j["deltas"] = std::move(deltas);
  return j;
}

/// Flat samples table: one row per (entry, origin, horizon, metric).
inline void write_report_csv(std::ostream& out, const SweepReport& r) {
  out << "# schema_version=" << r.schema_version << " config_hash=" << r.provenance.config_hash
      << " seed=" << r.provenance.seed << '\n';
  out << "config,method,l_tr,l_d,origin,horizon,metric,value\n";
  for (const auto& e : r.entries)
    for (const auto& h : e.horizons)
      for (Metric m : kMetrics) {
        const auto& s = h[m];
        for (std::size_t i = 0; i < s.values.size(); ++i)
          out << e.label << ',' << e.method << ',' << format_number(e.l_tr) << ','
              << format_number(e.l_d) << ',' << s.origins[i] << ',' << format_number(h.horizon) << ','
              << to_string(m) << ',' << format_number(s.values[i]) << '\n';
      }
}

/// Largest absolute difference between stored summaries and summaries
/// recomputed from the raw samples.
inline double audit_report(const SweepReport& r) {
  double worst = 0.0;
  auto cmp = [&](double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return;
    worst = std::max(worst, std::abs(a - b));
  };
  for (const auto& e : r.entries)
    for (const auto& h : e.horizons)
      for (const auto& m : h.metrics) {
        const Summary s = summarize(m.values);
        cmp(s.q1, m.summary.q1);
        cmp(s.median, m.summary.median);
        cmp(s.q3, m.summary.q3);
        cmp(s.whisker_lo, m.summary.whisker_lo);
        cmp(s.whisker_hi, m.summary.whisker_hi);
        cmp(s.mean, m.summary.mean);
        cmp(s.std, m.summary.std);
        if (s.n != m.summary.n) worst = std::max(worst, 1.0);
      }
  return worst;
}

}  // namespace hdmd
