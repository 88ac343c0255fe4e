#pragma once

// The CLI subcommands as library functions returning tables, so that the
// tool stays a thin argument parser.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fewave/config.hpp"
#include "fewave/emission.hpp"
#include "fewave/io.hpp"
#include "fewave/kinematics.hpp"

#ifndef FEWAVE_VERSION
#define FEWAVE_VERSION "0.0.0"
#endif

namespace fewave {

inline constexpr const char* kToolVersion = FEWAVE_VERSION;

/// Evaluates f(i) for i in [0, n) on up to hardware_concurrency threads.
/// Each index writes its own slot, so the result is order-independent.
template <class T, class F>
[[nodiscard]] std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct ResolvedScenario {
  DimensionlessScenario scenario;
  std::optional<PhysicalSetup> setup;
  std::optional<BeamKinematics> beam;
};

[[nodiscard]] inline ResolvedScenario resolve(const ScenarioConfig& cfg) {
  ResolvedScenario r;
  if (cfg.physical) {
    r.setup = cfg.physical;
    r.beam = beam_kinematics(*cfg.physical);
    r.scenario = derive_scenario(*cfg.physical);
  } else {
    r.scenario = *cfg.dimensionless;
  }
  return r;
}

inline void add_common_meta(Table& t, const char* command, const ScenarioConfig* cfg) {
  t.add_meta("tool", std::string("fewave ") + kToolVersion);
  t.add_meta("command", command);
  if (cfg) t.add_meta("scenario", cfg->source.dump());
}

// ---------------------------------------------------------------------------
// emit
// ---------------------------------------------------------------------------

struct EmitReport {
  DimensionlessScenario scenario;
  PhotonFieldState state;
  EmissionResult result;
  double dnu_sp = 0.0;
  std::optional<double> einstein;         // (dnu1)^2 / dnu_sp, coherent light only
  std::optional<double> signal_to_noise;  // 4 sqrt(nu0) / Ups, coherent light only
  std::optional<double> z_G;              // m, physical configs only
  std::optional<double> drift_length;     // m
  std::optional<double> spontaneous_rate; // 1/s
  std::vector<std::string> warnings;
};

[[nodiscard]] inline EmitReport run_emit(const ScenarioConfig& cfg) {
  const ResolvedScenario rs = resolve(cfg);
  EmitReport rep;
  rep.scenario = rs.scenario;
  rep.state = cfg.photon_state;
  rep.result = emit(rs.scenario, cfg.photon_state);
  rep.dnu_sp = spontaneous(rs.scenario.ups, rs.scenario.theta_e());
  if (is_coherent(cfg.photon_state)) {
    if (rep.dnu_sp > std::numeric_limits<double>::min()) rep.einstein = einstein_ratio(rep.result.dnu1, rep.dnu_sp);
    if (rs.scenario.ups > 0.0) rep.signal_to_noise = fewave::signal_to_noise(rs.scenario.nu0, rs.scenario.ups);
  }
  if (rs.setup && rs.beam) {
    rep.z_G = drift_limit_zG(rs.beam->beta0, rs.beam->gamma0, 2.0 * std::numbers::pi * constants::c / rs.setup->omega);
    rep.drift_length = rs.setup->drift_length;
    rep.spontaneous_rate = fewave::spontaneous_rate(rep.dnu_sp, rs.beam->v0, rs.setup->interaction_length);
  }
  rep.warnings = rs.scenario.warnings;
  if (rep.z_G && rep.drift_length && *rep.drift_length > *rep.z_G)
    rep.warnings.push_back("drift length exceeds z_G; the wavepacket is past classical visibility");
  return rep;
}

[[nodiscard]] inline Table emit_table(const EmitReport& rep, const ScenarioConfig* cfg) {
  Table t;
  add_common_meta(t, "emit", cfg);
  for (const auto& w : rep.warnings) t.add_meta("warning", w);
  t.columns = {"quantity", "value"};
  const auto& s = rep.scenario;
  auto row = [&](const char* name, double v) { t.add_row({name, v}); };
  t.add_row({"state", describe(rep.state)});
  t.add_row({"wavepacket", s.modulation ? "modulated" : "gaussian"});
  row("nu0", s.nu0);
  row("ups", s.ups);
  row("theta", s.theta);
  row("eps", s.eps);
  row("phi0", s.phi0);
  row("Gamma0", s.Gamma0);
  row("chirp", s.chirp);
  row("Gamma", s.Gamma);
  if (s.modulation) {
    row("g_mag", s.modulation->g_mag);
    row("r", s.modulation->r);
    row("w", s.modulation->w);
  }
  row("dnu1", rep.result.dnu1);
  row("dnu2", rep.result.dnu2);
  row("total", rep.result.total());
  row("energy_per_hbar_omega", rep.result.energy_per_hbar_omega());
  row("dnu_sp", rep.dnu_sp);
  if (rep.spontaneous_rate) row("spontaneous_rate", *rep.spontaneous_rate);
  if (rep.einstein) row("einstein_ratio", *rep.einstein);
  if (rep.signal_to_noise) row("signal_to_noise", *rep.signal_to_noise);
  if (rep.z_G) row("z_G", *rep.z_G);
  if (rep.drift_length) row("drift_length", *rep.drift_length);
  return t;
}

/// Human-readable block for the terminal.
inline void print_emit_block(std::ostream& out, const EmitReport& rep) {
  const Table t = emit_table(rep, nullptr);
  for (const auto& w : rep.warnings) out << "warning: " << w << '\n';
  for (const auto& r : t.rows) {
    std::string name = r[0].get<std::string>();
    name.resize(std::max<std::size_t>(name.size(), 22), ' ');
    out << name << (r[1].is_string() ? r[1].get<std::string>() : format_double(r[1].get<double>())) << '\n';
  }
  if (rep.z_G && rep.drift_length)
    out << "drift/z_G             " << format_double(*rep.drift_length / *rep.z_G)
        << (*rep.drift_length > *rep.z_G ? " (beyond)" : " (within)") << '\n';
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Scenario at one sweep coordinate. Physical t_D sweeps re-derive from SI;
/// every other axis overrides the reduced parameters directly. In a
/// dimensionless config t_D is measured in units of 1/xi, so it sets C.
[[nodiscard]] inline DimensionlessScenario sweep_point(const ScenarioConfig& cfg, const ResolvedScenario& base,
                                                       SweepAxis axis, double x) {
  if (axis == SweepAxis::t_D && cfg.physical) {
    PhysicalSetup setup = *cfg.physical;
    if (x < 0.0) throw ConfigError("sweep: t_D must be >= 0");
    setup.drift_length = x * base.beam->v0;
    return derive_scenario(setup);
  }
  DimensionlessScenario s = base.scenario;
  switch (axis) {
    case SweepAxis::Gamma:
      if (x < 0.0) throw ConfigError("sweep: Gamma must be >= 0");
      s.Gamma = x;
      s.Gamma0 = x / drift_factor(s.chirp);
      break;
    case SweepAxis::w:
      if (x < 0.0) throw ConfigError("sweep: w must be >= 0");
      s.modulation->w = x;
      s.Gamma0 = x * s.modulation->r;
      s.Gamma = s.Gamma0 * drift_factor(s.chirp);
      break;
    case SweepAxis::t_D:
      s.chirp = x;
      s.Gamma = s.Gamma0 * drift_factor(x);
      break;
    case SweepAxis::theta: s.theta = x; break;
    case SweepAxis::phi0: s.phi0 = x; break;
  }
  return s;
}

[[nodiscard]] inline Table run_sweep(const ScenarioConfig& cfg) {
  if (!cfg.sweep) throw ConfigError("sweep: missing from the config");
  const SweepSpec sw = *cfg.sweep;
  const ResolvedScenario base = resolve(cfg);
  Table t;
  add_common_meta(t, "sweep", &cfg);
  t.add_meta("axis", to_string(sw.axis));
  t.add_meta("steps", std::to_string(sw.steps));
  t.columns = {to_string(sw.axis), "Gamma", "dnu1", "dnu2", "total", "dnu_sp"};
  const auto rows = parallel_map<std::vector<Cell>>(static_cast<std::size_t>(sw.steps), [&](std::size_t i) {
    const double x = sw.at(static_cast<int>(i));
    const DimensionlessScenario s = sweep_point(cfg, base, sw.axis, x);
    const EmissionResult r = emit(s, cfg.photon_state);
    return std::vector<Cell>{x, s.Gamma, r.dnu1, r.dnu2, r.total(), spontaneous(s.ups, s.theta_e())};
  });
  for (const auto& r : rows) t.add_row(r);
  return t;
}

// ---------------------------------------------------------------------------
// fig3: first-order increment against the extinction parameter
// ---------------------------------------------------------------------------

inline constexpr int kFig3Points = 201;
inline constexpr double kFig3GammaMax = 4.0;

[[nodiscard]] inline Table run_fig3(const ScenarioConfig* cfg = nullptr) {
  double ups = 0.05, nu0 = 1.0, theta = 0.0, eps = 0.0, phi0 = 0.0;
  if (cfg) {
    const ResolvedScenario rs = resolve(*cfg);
    if (rs.scenario.modulation) throw ConfigError("fig3: needs an unmodulated scenario");
    if (!is_coherent(cfg->photon_state)) throw ConfigError("fig3: needs a coherent photon state");
    ups = rs.scenario.ups;
    nu0 = rs.scenario.nu0;
    theta = rs.scenario.theta;
    eps = rs.scenario.eps;
    phi0 = rs.scenario.phi0;
  }
  const double ref = stimulated_coherent_gaussian(ups, nu0, 0.0, theta, eps, phi0).dnu1;
  if (ref == 0.0) throw ConfigError("fig3: the first-order increment vanishes at Gamma = 0; cannot normalize");
  Table t;
  add_common_meta(t, "fig3", cfg);
  t.add_meta("points", std::to_string(kFig3Points));
  t.columns = {"Gamma", "dnu1", "dnu1_normalized", "extinction"};
  for (int i = 0; i < kFig3Points; ++i) {
    const double g = kFig3GammaMax * static_cast<double>(i) / (kFig3Points - 1);
    const double d = stimulated_coherent_gaussian(ups, nu0, g, theta, eps, phi0).dnu1;
    t.add_row({g, d, d / ref, extinction(g)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// fig4: bunching spectrum beyond the cut-off
// ---------------------------------------------------------------------------

inline constexpr double kFig4GammaB = 4.0;
inline constexpr double kFig4WMax = 8.0;
inline constexpr int kFig4Points = 801;

struct OptimalDrift {
  double chirp = 0.0;
  double r = 0.0;
  double B2 = 0.0;
};

/// Drift C maximizing |B_2| at fixed Gamma_b = r sqrt(1 + C^2): a coarse
/// scan over C in [0, 4] followed by golden-section refinement.
[[nodiscard]] inline OptimalDrift optimal_drift(double g_mag, double gamma_b = kFig4GammaB) {
  auto b2 = [&](double c) { return std::abs(bunching_Bl(g_mag, gamma_b / drift_factor(c), c, 2)); };
  constexpr int scan = 4000;
  constexpr double c_max = 4.0;
  int best = 0;
  double best_v = -1.0;
  for (int i = 0; i <= scan; ++i) {
    const double v = b2(c_max * i / scan);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = c_max * std::max(0, best - 1) / scan;
  double b = c_max * std::min(scan, best + 1) / scan;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double c1 = b - inv_phi * (b - a);
    const double c2 = a + inv_phi * (b - a);
    if (b2(c1) >= b2(c2)) b = c2;
    else a = c1;
  }
  OptimalDrift o;
  o.chirp = 0.5 * (a + b);
  o.r = gamma_b / drift_factor(o.chirp);
  o.B2 = bunching_Bl(g_mag, o.r, o.chirp, 2);
  return o;
}

struct Fig4Data {
  OptimalDrift drift;
  double g_mag = 0.0;
  BunchingSpectrum spectrum;
  Table table;
};

[[nodiscard]] inline Fig4Data run_fig4_data(double g_mag, const ScenarioConfig* cfg = nullptr) {
  Fig4Data d;
  d.g_mag = g_mag;
  d.drift = optimal_drift(g_mag);
  std::vector<double> w_grid(kFig4Points);
  for (int i = 0; i < kFig4Points; ++i) w_grid[static_cast<std::size_t>(i)] = kFig4WMax * i / (kFig4Points - 1);
  d.spectrum = bunching_spectrum(g_mag, d.drift.r, d.drift.chirp, w_grid);

  Table& t = d.table;
  add_common_meta(t, "fig4", cfg);
  t.add_meta("g_mag", format_double(g_mag));
  t.add_meta("Gamma_b", format_double(kFig4GammaB));
  t.add_meta("chirp", format_double(d.drift.chirp));
  t.add_meta("r", format_double(d.drift.r));
  for (const auto& [l, bl] : d.spectrum.harmonics)
    if (l >= 0 && std::abs(bl) > 0.0) t.add_meta("B_" + std::to_string(l), format_double(bl));
  t.columns = {"w", "envelope", "B", "Q", "B_e_re", "B_e_im"};
  for (std::size_t i = 0; i < w_grid.size(); ++i) {
    const double w = w_grid[i];
    const double env = detail::safe_exp(-0.5 * w * w * kFig4GammaB * kFig4GammaB);
    const BunchingPair exact = bunching_B_ea(g_mag, d.drift.r, d.drift.chirp, w);
    t.add_row({w, env, d.spectrum.in_phase[i], d.spectrum.quadrature[i], exact.emission.real(),
               exact.emission.imag()});
  }
  return d;
}

[[nodiscard]] inline Table run_fig4(const ScenarioConfig* cfg = nullptr) {
  double g_mag = 1.0;
  if (cfg) {
    const ResolvedScenario rs = resolve(*cfg);
    if (!rs.scenario.modulation) throw ConfigError("fig4: needs a modulated scenario");
    g_mag = rs.scenario.modulation->g_mag;
  }
  return run_fig4_data(g_mag, cfg).table;
}

// ---------------------------------------------------------------------------
// table1: the photon-state gallery at one scenario
// ---------------------------------------------------------------------------

[[nodiscard]] inline DimensionlessScenario default_table1_scenario() {
  return gaussian_scenario(0.05, 1.0, 0.0, 0.01, 0.0, 1.0, 0.0);
}

[[nodiscard]] inline Table run_table1(const ScenarioConfig* cfg = nullptr) {
  DimensionlessScenario s = cfg ? resolve(*cfg).scenario : default_table1_scenario();
  const double nu0 = cfg ? mean_photon_number(cfg->photon_state) : 1.0;
  s.nu0 = nu0;
  const long fock_n = static_cast<long>(std::llround(nu0));
  Table t;
  add_common_meta(t, "table1", cfg);
  t.columns = {"state", "wavepacket", "nu0", "dnu1", "dnu2", "total"};
  auto add = [&](const char* state_name, const char* packet, double n, const EmissionResult& r) {
    t.add_row({state_name, packet, n, r.dnu1, r.dnu2, r.total()});
  };
  const double theta_e = s.theta_e();
  const double theta_a = s.theta_a();
  add("vacuum", "any", 0.0, emit(s, Vacuum{}));
  add("fock", "any", static_cast<double>(fock_n), stimulated_fock(s.ups, fock_n, theta_e, theta_a));
  add("coherent", "point", nu0, stimulated_coherent_gaussian(s.ups, nu0, 0.0, s.theta, s.eps, s.phi0));
  if (!s.modulation) {
    add("coherent", "gaussian", nu0, stimulated_coherent_gaussian(s.ups, nu0, s.Gamma, s.theta, s.eps, s.phi0));
  } else {
    add("coherent", "modulated", nu0, stimulated_coherent_modulated(s.ups, nu0, s));
  }
  return t;
}

}  // namespace fewave
