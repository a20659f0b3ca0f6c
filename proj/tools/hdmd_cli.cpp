// hdmd: synthesize seaway records, nowcast a record, sweep hyperparameters.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "hdmd/hdmd.hpp"

namespace fs = std::filesystem;
using namespace hdmd;

namespace {

struct DataOptions {
  std::string input;
  std::string output;
  std::vector<std::string> channels;
  std::string ref_channel;
  double t_hat = 0.0;  // 0: estimate from the reference channel
  int samples_per_period = 32;
  std::uint64_t seed = 0;
  int bins = kDefaultJsdBins;
};

struct PriorOptions {
  bool bayes = false;
  int realizations = 100;
  std::vector<double> l_tr{1.0, 5.0};
  std::vector<double> ratio{0.5, 0.75};

  HyperPrior prior(std::uint64_t seed) const {
    return {l_tr.at(0), l_tr.at(1), ratio.at(0), ratio.at(1), realizations, seed};
  }
};

struct SynthOptions {
  std::string output;
  double duration = 2000.0;
  double dt = 0.0;  // 0: tp / 32
  WaveSpectrumSpec wave;
  double noise = 0.0;
  double roll_coupling = 0.1;
  std::vector<std::string> channels;
};

struct NowcastOptions {
  double l_tr = 2.0;
  double l_d = 1.0;
  double l_te = 1.0;
  long long origin = -1;  // -1: latest origin with a full truth window
};

struct SweepOptions {
  int starts = 250;
  std::vector<double> horizons{1, 2, 5};
  std::vector<double> grid_ltr{0.5, 1, 2, 3, 4, 5};
  std::vector<double> grid_ld{0.5, 1, 2, 3, 4, 5};
  std::string format = "json";
};

void warn(const std::string& msg) { std::cerr << "hdmd: warning: " << msg << '\n'; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

fs::path output_dir(const std::string& dir) {
  require(!dir.empty(), ErrorCode::InvalidConfig, "--output is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorCode::IoError, "cannot create output directory " + dir);
  return dir;
}

Json provenance_json(const std::string& hash, std::uint64_t seed, const Json& seeds) {
  return Json{{"config_hash", hash}, {"seed", seed}, {"seeds", seeds}, {"code_version", std::string(kCodeVersion)}};
}

// Record on the analysis grid together with how it was derived.
struct Working {
  TimeSeriesSet series;
  std::string dataset_id;
  std::string ref_channel;
  double t_hat = 0.0;
  bool t_hat_estimated = false;
  double source_dt = 0.0;
  bool resampled = false;

  Json describe() const {
    return Json{{"dataset_id", dataset_id},   {"channels", series.channels}, {"ref_channel", ref_channel},
                {"t_hat", t_hat},             {"t_hat_estimated", t_hat_estimated},
                {"source_dt", source_dt},     {"dt", series.dt},            {"resampled", resampled},
                {"n_samples", series.n_samples()}};
  }
};

Working prepare(const DataOptions& o) {
  require(!o.input.empty(), ErrorCode::InvalidConfig, "--input is required");
  const std::string text = read_file(o.input);
  std::istringstream in(text);
  const TimeSeriesSet raw = read_csv(in, o.input);

  Working w;
  w.dataset_id = hex64(fnv1a64(text));
  w.source_dt = raw.dt;
  w.ref_channel = o.ref_channel;
  if (w.ref_channel.empty()) {
    const bool has_eta = std::find(raw.channels.begin(), raw.channels.end(), "eta") != raw.channels.end();
    w.ref_channel = has_eta ? "eta" : (o.channels.empty() ? raw.channels.front() : o.channels.front());
  }
  require(std::find(raw.channels.begin(), raw.channels.end(), w.ref_channel) != raw.channels.end(),
          ErrorCode::InvalidConfig, "reference channel '" + w.ref_channel + "' is not in " + o.input);

  std::vector<std::string> chosen = o.channels;
  if (chosen.empty()) {
    for (const auto& c : raw.channels)
      if (c != w.ref_channel) chosen.push_back(c);
    if (chosen.empty()) chosen.push_back(w.ref_channel);
  }
  for (const auto& c : chosen)
    require(std::find(raw.channels.begin(), raw.channels.end(), c) != raw.channels.end(), ErrorCode::InvalidConfig,
            "channel '" + c + "' is not in " + o.input);

  require(o.t_hat >= 0.0, ErrorCode::InvalidConfig, "--t-hat must be positive");
  require(o.samples_per_period >= 1, ErrorCode::InvalidConfig, "--samples-per-period must be positive");
  w.t_hat_estimated = o.t_hat == 0.0;
  w.t_hat = w.t_hat_estimated ? estimate_reference_period(raw, w.ref_channel) : o.t_hat;

  const TimeSeriesSet picked = raw.select(chosen);
  const double target = w.t_hat / o.samples_per_period;
  if (target >= raw.dt * (1.0 - 1e-12)) {
    w.series = downsample(picked, o.samples_per_period, w.t_hat);
    w.resampled = std::abs(w.series.dt - raw.dt) > 1e-12 * raw.dt;
  } else {
    warn("record is coarser than t_hat/" + std::to_string(o.samples_per_period) + "; using its native dt " +
         format_number(raw.dt) + " s");
    w.series = picked;
  }
  return w;
}

Json data_config(const DataOptions& o) {
  return Json{{"input", fs::path(o.input).filename().string()},
              {"channels", o.channels},
              {"ref_channel", o.ref_channel},
              {"t_hat", o.t_hat},
              {"samples_per_period", o.samples_per_period},
              {"seed", o.seed},
              {"bins", o.bins}};
}

// ------------------------------------------------------------ commands --

int cmd_synth(const SynthOptions& o) {
  require(!o.output.empty(), ErrorCode::InvalidConfig, "--output is required");
  o.wave.validate();
  const double dt = o.dt > 0.0 ? o.dt : o.wave.tp / 32.0;
  require(o.duration >= 0.0, ErrorCode::InvalidConfig, "--duration must be non-negative");

  const SurrogateResponseSpec resp = default_ship_response(o.wave, o.roll_coupling, o.noise, o.wave.seed);
  TimeSeriesSet all = generate_seaway(o.wave, resp, o.duration, dt);
  if (!o.channels.empty()) all = all.select(o.channels);

  const fs::path path(o.output);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ostringstream csv;
  write_csv(csv, all);
  write_text(path, csv.str());

  const Json config{{"command", "synth"},
                    {"duration", o.duration},
                    {"dt", dt},
                    {"wave",
                     {{"hs", o.wave.hs},
                      {"tp", o.wave.tp},
                      {"gamma", o.wave.gamma},
                      {"n_components", o.wave.n_components},
                      {"omega_lo", o.wave.omega_lo},
                      {"omega_hi", o.wave.omega_hi},
                      {"delta_omega", o.wave.delta_omega()}}},
                    {"noise", o.noise},
                    {"roll_coupling", o.roll_coupling},
                    {"channels", all.channels}};
  const std::string hash = config_hash(config);
  Json meta{{"schema_version", kReportSchemaVersion},
            {"config", config},
            {"provenance", provenance_json(hash, o.wave.seed,
                                           {{"phases", substream_seed(o.wave.seed, "phases")},
                                            {"noise", substream_seed(o.wave.seed, "noise")}})},
            {"rows", all.n_samples()},
            {"csv_hash", hex64(fnv1a64(csv.str()))}};
  fs::path sidecar = path;
  sidecar.replace_extension(".meta.json");
  write_text(sidecar, meta.dump(2) + "\n");
  std::cout << "wrote " << all.n_samples() << " rows x " << all.n_channels() << " channels to " << path.string()
            << '\n';
  return 0;
}

int cmd_nowcast(const DataOptions& d, const NowcastOptions& o, const PriorOptions& p) {
  const fs::path out = output_dir(d.output);
  const Working w = prepare(d);
  const TimeSeriesSet& s = w.series;

  const NowcastConfig nc{o.l_tr, o.l_d, o.l_te, w.t_hat, d.samples_per_period};
  const Index n_te = periods_to_samples(o.l_te, w.t_hat, s.dt);
  const Index origin = o.origin >= 0 ? static_cast<Index>(o.origin) : s.n_samples() - 1 - n_te;
  require(origin >= 0 && origin < s.n_samples(), ErrorCode::OriginOutOfRange,
          "origin " + std::to_string(origin) + " is outside a record of " + std::to_string(s.n_samples()) +
              " samples");

  Json config{{"command", "nowcast"}, {"data", data_config(d)}, {"origin", origin}, {"l_te", o.l_te}};
  if (p.bayes) {
    config["prior"] = to_json(p.prior(d.seed));
  } else {
    config["l_tr"] = o.l_tr;
    config["l_d"] = o.l_d;
  }
  config["dataset"] = w.describe();
  const std::string hash = config_hash(config);
  const Json seeds = p.bayes ? Json{{"hyperparameters", substream_seed(d.seed, "hyperparameters")}} : Json::object();

  Matrix values;
  std::optional<Matrix> spread;
  Json run{{"schema_version", kReportSchemaVersion}, {"config", config}, {"provenance", provenance_json(hash, d.seed, seeds)}};
  if (p.bayes) {
    const StochasticForecast f = bayesian_nowcast(s, origin, p.prior(d.seed), o.l_te, w.t_hat);
    values = f.mean;
    spread = f.std;
    Json log = Json::array();
    for (const auto& r : f.log)
      log.push_back(Json{{"index", r.index}, {"attempts", r.attempts}, {"l_tr", r.l_tr}, {"l_d", r.l_d},
                         {"n_tr", r.counts.n_tr}, {"n_d", r.counts.n_d}, {"ok", r.ok}, {"error", r.error}});
    run["ensemble"] = Json{{"requested", f.requested}, {"realizations", f.realizations}, {"degraded", f.degraded},
                           {"coverage_factor", f.coverage_factor}, {"log", log}};
  } else {
    const Forecast f = nowcast(s, origin, nc);
    values = f.values;
    run["counts"] = Json{{"n_tr", f.counts.n_tr}, {"n_d", f.counts.n_d}, {"n_te", f.counts.n_te}};
  }

  std::ostringstream csv;
  csv << "# config_hash=" << hash << " seed=" << d.seed << '\n';
  write_forecast_csv(csv, s.channels, s.time(origin), s.dt, values, spread ? &*spread : nullptr);
  write_text(out / "forecast.csv", csv.str());
  write_text(out / "run.json", run.dump(2) + "\n");

  if (origin + n_te < s.n_samples()) {
    const Matrix truth = truth_after(s, origin, n_te);
    const MetricsTriple m = evaluate(values.rightCols(n_te), truth, o.l_te, d.bins);
    const Json metrics{{"nrmse", m.nrmse},     {"nammae", m.nammae}, {"jsd", m.jsd},
                       {"horizon", o.l_te},    {"steps", n_te},      {"jsd_bins", d.bins},
                       {"config_hash", hash},  {"seed", d.seed}};
    write_text(out / "metrics.json", metrics.dump(2) + "\n");
  } else {
    warn("no truth beyond the forecast horizon; metrics.json not written");
  }
  std::cout << "wrote forecast at origin " << origin << " (t = " << format_number(s.time(origin)) << " s) to "
            << out.string() << '\n';
  return 0;
}

void write_report(const fs::path& out, const std::string& stem, const SweepReport& r, const std::string& format) {
  if (format == "csv") {
    std::ostringstream csv;
    write_report_csv(csv, r);
    write_text(out / (stem + ".csv"), csv.str());
  } else {
    write_text(out / (stem + ".json"), to_json(r).dump(2) + "\n");
  }
}

int cmd_sweep(const DataOptions& d, const SweepOptions& o, const PriorOptions& p) {
  const fs::path out = output_dir(d.output);
  const Working w = prepare(d);

  SweepConfig cfg;
  cfg.l_tr_levels = o.grid_ltr;
  cfg.l_d_levels = o.grid_ld;
  cfg.n_starts = o.starts;
  cfg.horizons = o.horizons;
  cfg.max_horizon = std::max(5.0, *std::max_element(o.horizons.begin(), o.horizons.end()));
  cfg.bins = d.bins;
  cfg.seed = d.seed;
  cfg.reference_period = w.t_hat;
  if (p.bayes) cfg.history = p.l_tr.at(1);
  cfg.validate();

  Json config{{"command", "sweep"},         {"data", data_config(d)},   {"grid_ltr", o.grid_ltr},
              {"grid_ld", o.grid_ld},       {"starts", o.starts},       {"horizons", o.horizons},
              {"history", cfg.history},     {"format", o.format},       {"dataset", w.describe()}};
  if (p.bayes) config["prior"] = to_json(p.prior(d.seed));
  const std::string hash = config_hash(config);

  SweepReport sweep = run_sweep(w.series, cfg);
  sweep.provenance.dataset_id = w.dataset_id;
  sweep.provenance.config_hash = hash;
  write_report(out, "sweep", sweep, o.format);

  const ReportEntry& best = best_cell(sweep);
  std::cout << sweep.feasible_cells << " feasible cells x " << sweep.origins.size() << " origins; best cell "
            << best.label << '\n';
  if (p.bayes) {
    const SweepReport cmp = compare_bayesian(w.series, sweep, best, p.prior(d.seed), cfg);
    write_report(out, "comparison", cmp, o.format);
    for (const auto& delta : cmp.deltas)
      if (delta.metric == Metric::Nrmse)
        std::cout << "horizon " << format_number(delta.horizon) << ": mean NRMSE delta (bayesian - best) "
                  << format_number(delta.mean_delta) << '\n';
  }
  return 0;
}

int report_error(ErrorCode code, const std::string& message, int status) {
  const Json err{{"error", std::string(to_string(code))}, {"message", message}, {"exit_code", status}};
  std::cerr << err.dump() << '\n';
  return status;
}

void add_data_options(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--input", d.input, "Input CSV (column t plus channels)")->required();
  cmd->add_option("--output", d.output, "Output directory")->required();
  cmd->add_option("--channels", d.channels, "Channels to forecast (default: all but the reference)")->delimiter(',');
  cmd->add_option("--ref-channel", d.ref_channel, "Channel used to estimate the reference period (default eta)");
  cmd->add_option("--t-hat", d.t_hat, "Reference period in seconds (default: estimated)");
  cmd->add_option("--samples-per-period", d.samples_per_period, "Samples per reference period")->capture_default_str();
  cmd->add_option("--seed", d.seed, "Root seed")->capture_default_str();
  cmd->add_option("--bins", d.bins, "JSD histogram bins")->capture_default_str();
}

void add_prior_options(CLI::App* cmd, PriorOptions& p) {
  cmd->add_flag("--bayes", p.bayes, "Use the Bayesian ensemble");
  cmd->add_option("--realizations", p.realizations, "Ensemble size")->capture_default_str();
  cmd->add_option("--prior-ltr", p.l_tr, "Uniform prior range of l_tr (periods)")->expected(2)->delimiter(',');
  cmd->add_option("--prior-ratio", p.ratio, "Uniform prior range of l_d / l_tr")->expected(2)->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hankel-DMD nowcasting of ship motions"};
  app.require_subcommand(1);

  SynthOptions so;
  auto* synth = app.add_subcommand("synth", "Generate a JONSWAP seaway and surrogate ship motions");
  synth->add_option("--output", so.output, "Output CSV path")->required();
  synth->add_option("--duration", so.duration, "Record length in seconds")->capture_default_str();
  synth->add_option("--dt", so.dt, "Sampling interval in seconds (default tp/32)");
  synth->add_option("--hs", so.wave.hs, "Significant wave height, m")->capture_default_str();
  synth->add_option("--tp", so.wave.tp, "Peak period, s")->capture_default_str();
  synth->add_option("--gamma", so.wave.gamma, "JONSWAP peak enhancement")->capture_default_str();
  synth->add_option("--components", so.wave.n_components, "Wave components")->capture_default_str();
  synth->add_option("--omega-lo", so.wave.omega_lo, "Lowest component frequency, rad/s")->capture_default_str();
  synth->add_option("--omega-hi", so.wave.omega_hi, "Highest component frequency, rad/s")->capture_default_str();
  synth->add_option("--noise", so.noise, "Noise std relative to each channel's std")->capture_default_str();
  synth->add_option("--roll-coupling", so.roll_coupling, "Quadratic roll coupling")->capture_default_str();
  synth->add_option("--channels", so.channels, "Subset of eta,x3,phi,theta,psi,alpha,v1,v2")->delimiter(',');
  synth->add_option("--seed", so.wave.seed, "Root seed")->capture_default_str();

  DataOptions nd;
  NowcastOptions no;
  PriorOptions np;
  auto* nowcast_cmd = app.add_subcommand("nowcast", "Forecast from one origin");
  add_data_options(nowcast_cmd, nd);
  add_prior_options(nowcast_cmd, np);
  nowcast_cmd->add_option("--ltr", no.l_tr, "Observation length (periods)")->capture_default_str();
  nowcast_cmd->add_option("--ld", no.l_d, "Delay length (periods)")->capture_default_str();
  nowcast_cmd->add_option("--lte", no.l_te, "Forecast length (periods)")->capture_default_str();
  nowcast_cmd->add_option("--origin", no.origin, "Origin sample index on the analysis grid (default: latest scored)");

  DataOptions sd;
  SweepOptions sw;
  PriorOptions sp;
  auto* sweep = app.add_subcommand("sweep", "Hyperparameter grid sweep over random origins");
  add_data_options(sweep, sd);
  add_prior_options(sweep, sp);
  sweep->add_option("--starts", sw.starts, "Random prediction origins")->capture_default_str();
  sweep->add_option("--horizons", sw.horizons, "Scored horizons (periods)")->delimiter(',');
  sweep->add_option("--grid-ltr", sw.grid_ltr, "l_tr levels (periods)")->delimiter(',');
  sweep->add_option("--grid-ld", sw.grid_ld, "l_d levels (periods)")->delimiter(',');
  sweep->add_option("--format", sw.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report_error(ErrorCode::InvalidConfig, e.what(), static_cast<int>(ErrorCategory::Config));
  }

  try {
    if (*synth) return cmd_synth(so);
    if (*nowcast_cmd) return cmd_nowcast(nd, no, np);
    return cmd_sweep(sd, sw, sp);
  } catch (const Error& e) {
    return report_error(e.code(), e.what(), static_cast<int>(category(e.code())));
  } catch (const std::exception& e) {
    return report_error(ErrorCode::IoError, e.what(), static_cast<int>(ErrorCategory::Config));
  }
}
