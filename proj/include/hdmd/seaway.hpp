#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hdmd/random.hpp"
#include "hdmd/types.hpp"

namespace hdmd {

/// Long-crested JONSWAP sea discretized into evenly spaced components.
struct WaveSpectrumSpec {
  double hs = 7.0;     // significant wave height, m
  double tp = 9.2;     // peak period, s
  double gamma = 3.3;  // peak enhancement
  int n_components = 100;
  double omega_lo = 0.41;  // rad/s
  double omega_hi = 1.47;
  std::uint64_t seed = 0;

  void validate() const {
    require(hs >= 0.0 && tp > 0.0 && gamma >= 1.0, ErrorCode::InvalidConfig, "need hs >= 0, tp > 0, gamma >= 1");
    require(n_components >= 1, ErrorCode::InvalidConfig, "need at least one wave component");
    require(omega_lo > 0.0 && omega_lo < omega_hi, ErrorCode::InvalidConfig, "need 0 < omega_lo < omega_hi");
  }

  double delta_omega() const {
    return n_components > 1 ? (omega_hi - omega_lo) / (n_components - 1) : omega_hi - omega_lo;
  }
};

/// JONSWAP spectral density S(omega) in m^2 s, Goda's normalization so the
/// zeroth moment is close to hs^2 / 16.
inline double jonswap_density(double omega, double hs, double tp, double gamma) {
  if (omega <= 0.0 || hs == 0.0) return 0.0;
  const double wp = 2.0 * std::numbers::pi / tp;
  const double sigma = omega <= wp ? 0.07 : 0.09;
  const double r = std::exp(-(omega - wp) * (omega - wp) / (2.0 * sigma * sigma * wp * wp));
  const double pm = 5.0 / 16.0 * hs * hs * std::pow(wp, 4) * std::pow(omega, -5) * std::exp(-1.25 * std::pow(wp / omega, 4));
  return pm * (1.0 - 0.287 * std::log(gamma)) * std::pow(gamma, r);
}

struct WaveComponents {
  std::vector<double> omega;
  std::vector<double> amplitude;  // zeta_i = sqrt(2 S(omega_i) d_omega)
  std::vector<double> phase;

  std::size_t size() const { return omega.size(); }
  double variance() const {
    double v = 0.0;
    for (double a : amplitude) v += 0.5 * a * a;
    return v;
  }
};

inline WaveComponents wave_components(const WaveSpectrumSpec& spec) {
  spec.validate();
  WaveComponents c;
  const auto n = static_cast<std::size_t>(spec.n_components);
  const double dw = spec.delta_omega();
  Engine engine = make_engine(spec.seed, "phases");
  for (std::size_t i = 0; i < n; ++i) {
    const double w = spec.omega_lo + static_cast<double>(i) * dw;
    c.omega.push_back(w);
    c.amplitude.push_back(std::sqrt(2.0 * jonswap_density(w, spec.hs, spec.tp, spec.gamma) * dw));
    c.phase.push_back(uniform(engine, 0.0, 2.0 * std::numbers::pi));
  }
  return c;
}

/// Samples in a record of `duration` seconds including both end points.
inline Index record_length(double duration, double dt) {
  require(dt > 0.0 && duration >= 0.0, ErrorCode::NonPositiveInput, "need dt > 0 and duration >= 0");
  if (duration == 0.0) return 0;
  return static_cast<Index>(std::floor(duration / dt + 1e-9)) + 1;
}

/// Response of one surrogate channel: complex gain per wave component, an
/// optional quadratic self-coupling y + q y^2.
struct ChannelResponse {
  std::string name;
  CVector weights;
  double quadratic = 0.0;
};

struct SurrogateResponseSpec {
  std::vector<ChannelResponse> channels;
  /// Gaussian noise std as a fraction of each channel's noise-free std.
  double noise = 0.0;
  std::uint64_t seed = 0;

  void validate(std::size_t n_components) const {
    require(noise >= 0.0, ErrorCode::InvalidConfig, "noise std must be non-negative");
    for (const auto& c : channels) {
      require(static_cast<std::size_t>(c.weights.size()) == n_components, ErrorCode::DimensionMismatch,
              "channel " + c.name + " has wrong number of response weights");
      require(c.weights.allFinite() && std::isfinite(c.quadratic), ErrorCode::NonFinite,
              "channel " + c.name + " has non-finite gains");
    }
  }
};

inline const std::vector<std::string>& ship_state_channels() {
  static const std::vector<std::string> names{"x3", "phi", "theta", "psi", "alpha", "v1", "v2"};
  return names;
}

/// Second-order resonator gain * wn^2 / (wn^2 - w^2 + 2 i zeta wn w).
inline Complex resonator(double omega, double gain, double wn, double zeta) {
  return gain * wn * wn / Complex(wn * wn - omega * omega, 2.0 * zeta * wn * omega);
}

/// Stand-in ship responders for the seven-channel state: heave, roll,
/// pitch, yaw, rudder angle, surge and sway velocity. Roll sits close to
/// resonance and carries the quadratic coupling.
inline SurrogateResponseSpec default_ship_response(const WaveSpectrumSpec& wave, double roll_coupling = 0.1,
                                                   double noise = 0.0, std::uint64_t seed = 0) {
  const WaveComponents comp = wave_components(wave);
  const auto n = static_cast<Index>(comp.size());
  const Complex i1(0.0, 1.0);
  SurrogateResponseSpec spec;
  spec.noise = noise;
  spec.seed = seed;
  for (const auto& name : ship_state_channels()) spec.channels.push_back({name, CVector(n), 0.0});
  for (Index k = 0; k < n; ++k) {
    const double w = comp.omega[static_cast<std::size_t>(k)];
    const Complex heave = resonator(w, 0.9, 0.95, 0.35);
    const Complex roll = resonator(w, 0.12, 0.62, 0.06) * std::exp(i1 * 0.4);
    const Complex pitch = resonator(w, 0.05, 1.05, 0.30) * std::exp(-i1 * 1.2);
    const Complex yaw = resonator(w, 0.03, 0.55, 0.45) * std::exp(i1 * 2.0);
    spec.channels[0].weights(k) = heave;
    spec.channels[1].weights(k) = roll;
    spec.channels[2].weights(k) = pitch;
    spec.channels[3].weights(k) = yaw;
    spec.channels[4].weights(k) = -(1.5 + 0.8 * i1 * w) * yaw;  // PD course keeping
    spec.channels[5].weights(k) = 0.25 * i1 * w * resonator(w, 1.0, 0.8, 0.5);
    spec.channels[6].weights(k) = 0.4 * i1 * w * resonator(w, 1.0, 0.7, 0.3);
  }
  spec.channels[1].quadratic = roll_coupling;
  return spec;
}

/// Linear superposition of cosine components at t = 0, dt, 2 dt, ...
inline TimeSeriesSet generate_elevation(const WaveSpectrumSpec& spec, double duration, double dt,
                                        const std::string& name = "eta") {
  const WaveComponents comp = wave_components(spec);
  const Index len = record_length(duration, dt);
  Matrix eta = Matrix::Zero(1, len);
  for (Index k = 0; k < len; ++k) {
    const double t = static_cast<double>(k) * dt;
    double sum = 0.0;
    for (std::size_t i = 0; i < comp.size(); ++i) sum += comp.amplitude[i] * std::cos(comp.omega[i] * t + comp.phase[i]);
    eta(0, k) = sum;
  }
  return TimeSeriesSet({name}, std::move(eta), dt);
}

inline TimeSeriesSet generate_motions(const WaveSpectrumSpec& wave, const SurrogateResponseSpec& response,
                                      double duration, double dt) {
  const WaveComponents comp = wave_components(wave);
  response.validate(comp.size());
  const Index len = record_length(duration, dt);
  const auto n_ch = static_cast<Index>(response.channels.size());
  const auto n = static_cast<Index>(comp.size());

  // Complex weight matrix scaled by component amplitude: channel = Re(W z(t)).
  CMatrix weights(n_ch, n);
  for (Index c = 0; c < n_ch; ++c)
    for (Index i = 0; i < n; ++i)
      weights(c, i) = response.channels[static_cast<std::size_t>(c)].weights(i) * comp.amplitude[static_cast<std::size_t>(i)];

  Matrix out(n_ch, len);
  CVector z(n);
  for (Index k = 0; k < len; ++k) {
    const double t = static_cast<double>(k) * dt;
    for (Index i = 0; i < n; ++i)
      z(i) = std::polar(1.0, comp.omega[static_cast<std::size_t>(i)] * t + comp.phase[static_cast<std::size_t>(i)]);
    out.col(k) = (weights * z).real();
  }

  std::vector<std::string> names;
  for (Index c = 0; c < n_ch; ++c) {
    const auto& ch = response.channels[static_cast<std::size_t>(c)];
    names.push_back(ch.name);
    if (ch.quadratic != 0.0) out.row(c) = out.row(c).array() + ch.quadratic * out.row(c).array().square();
    if (response.noise > 0.0 && len > 1) {
      const double m = out.row(c).mean();
      const double s = std::sqrt((out.row(c).array() - m).square().mean());
      if (s > 0.0) {
        Engine engine = make_engine(response.seed, "noise", static_cast<std::uint64_t>(c));
        std::normal_distribution<double> gauss(0.0, response.noise * s);
        for (Index k = 0; k < len; ++k) out(c, k) += gauss(engine);
      }
    }
  }
  return TimeSeriesSet(std::move(names), std::move(out), dt);
}

/// Elevation followed by the surrogate motion channels on one time grid.
inline TimeSeriesSet generate_seaway(const WaveSpectrumSpec& wave, const SurrogateResponseSpec& response,
                                     double duration, double dt, const std::string& elevation_name = "eta") {
  const TimeSeriesSet eta = generate_elevation(wave, duration, dt, elevation_name);
  const TimeSeriesSet motions = generate_motions(wave, response, duration, dt);
  std::vector<std::string> names{elevation_name};
  names.insert(names.end(), motions.channels.begin(), motions.channels.end());
  Matrix all(1 + motions.n_channels(), eta.n_samples());
  all.row(0) = eta.samples.row(0);
  all.bottomRows(motions.n_channels()) = motions.samples;
  return TimeSeriesSet(std::move(names), std::move(all), dt);
}

}  // namespace hdmd
