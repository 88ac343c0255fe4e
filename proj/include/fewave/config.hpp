#pragma once

// JSON scenario documents. Unit-bearing fields are {value, unit} objects
// drawn from a closed vocabulary; unknown keys are rejected so that typos
// fail loudly instead of falling back to defaults.

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fewave/kinematics.hpp"
#include "fewave/photon_state.hpp"
#include "fewave/scenario.hpp"

namespace fewave {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Dimension { energy, length, time, angle, angular_frequency, wavenumber, impedance, field };

[[nodiscard]] inline const char* to_string(Dimension d) {
  switch (d) {
    case Dimension::energy: return "energy";
    case Dimension::length: return "length";
    case Dimension::time: return "time";
    case Dimension::angle: return "angle";
    case Dimension::angular_frequency: return "angular frequency";
    case Dimension::wavenumber: return "wavenumber";
    case Dimension::impedance: return "impedance";
    case Dimension::field: return "field";
  }
  return "unknown";
}

struct UnitEntry {
  std::string_view name;
  Dimension dimension;
  double to_si;
};

inline constexpr UnitEntry kUnits[] = {
    {"eV", Dimension::energy, constants::e},
    {"J", Dimension::energy, 1.0},
    {"m", Dimension::length, 1.0},
    {"nm", Dimension::length, 1e-9},
    {"s", Dimension::time, 1.0},
    {"rad", Dimension::angle, 1.0},
    {"rad/s", Dimension::angular_frequency, 1.0},
    {"1/m", Dimension::wavenumber, 1.0},
    {"ohm", Dimension::impedance, 1.0},
    {"V/m", Dimension::field, 1.0},
};

enum class SweepAxis { Gamma, w, t_D, theta, phi0 };

[[nodiscard]] inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Gamma: return "Gamma";
    case SweepAxis::w: return "w";
    case SweepAxis::t_D: return "t_D";
    case SweepAxis::theta: return "theta";
    case SweepAxis::phi0: return "phi0";
  }
  return "unknown";
}

struct SweepSpec {
  SweepAxis axis = SweepAxis::Gamma;
  double start = 0.0;
  double stop = 0.0;
  int steps = 2;

  [[nodiscard]] double at(int i) const noexcept {
    if (i == steps - 1) return stop;
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
};

enum class OutputFormat { csv, json };

struct OutputSpec {
  std::optional<std::string> path;
  OutputFormat format = OutputFormat::csv;
};

struct ScenarioConfig {
  std::optional<PhysicalSetup> physical;
  std::optional<DimensionlessScenario> dimensionless;
  PhotonFieldState photon_state = Vacuum{};
  std::optional<SweepSpec> sweep;
  OutputSpec output;
  nlohmann::json source;  // the document as read, echoed into output metadata
};

namespace config_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
}

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || item.key() == a;
    if (!known) fail(join(path, item.key()), "unknown key");
  }
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

inline std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

/// {value, unit} converted to SI; the unit must carry `dim`.
inline double quantity(const json& j, const std::string& path, Dimension dim) {
  if (!j.is_object()) fail(path, std::string("expected {\"value\", \"unit\"} with a unit of ") + to_string(dim));
  reject_unknown(j, path, {"value", "unit"});
  if (!j.contains("value")) fail(join(path, "value"), "missing");
  if (!j.contains("unit")) fail(join(path, "unit"), "missing");
  const double value = number(j.at("value"), join(path, "value"));
  const std::string unit = text(j.at("unit"), join(path, "unit"));
  for (const auto& u : kUnits) {
    if (u.name != unit) continue;
    if (u.dimension != dim)
      fail(join(path, "unit"), "'" + unit + "' is a unit of " + to_string(u.dimension) + ", expected " + to_string(dim));
    return value * u.to_si;
  }
  fail(join(path, "unit"), "unknown unit '" + unit + "'");
}

/// Angles may be bare numbers (radians) or {value, unit: "rad"}.
inline double angle(const json& j, const std::string& path) {
  if (j.is_number()) return number(j, path);
  return quantity(j, path, Dimension::angle);
}

inline const json* find(const json& j, std::string_view key) {
  const auto it = j.find(std::string(key));
  return it == j.end() ? nullptr : &*it;
}

inline const json& need(const json& j, const std::string& path, std::string_view key) {
  const json* v = find(j, key);
  if (!v) fail(join(path, key), "missing");
  return *v;
}

inline PhotonFieldState parse_photon_state(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"kind", "nu0"});
  const std::string kind = text(need(j, path, "kind"), join(path, "kind"));
  if (kind == "vacuum") {
    if (find(j, "nu0") && number(j.at("nu0"), join(path, "nu0")) != 0.0)
      fail(join(path, "nu0"), "vacuum has nu0 = 0");
    return Vacuum{};
  }
  const double nu0 = number(need(j, path, "nu0"), join(path, "nu0"));
  if (nu0 < 0.0) fail(join(path, "nu0"), "must be >= 0");
  if (kind == "fock") {
    if (nu0 != std::floor(nu0) || nu0 > 1e15) fail(join(path, "nu0"), "Fock photon number must be a whole number");
    return Fock{static_cast<long>(nu0)};
  }
  if (kind == "coherent") return Coherent{nu0};
  fail(join(path, "kind"), "expected one of vacuum, fock, coherent");
}

inline PhysicalSetup parse_physical(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"electron_kinetic_energy", "sigma_z0", "drift_length", "drift_time", "interaction_length", "omega",
                  "wavelength", "q_z", "phi0", "pierce_impedance", "field_amplitude", "modulation"});
  PhysicalSetup s;
  auto q = [&](std::string_view key, Dimension d) { return quantity(need(j, path, key), join(path, key), d); };
  s.electron_kinetic_energy = q("electron_kinetic_energy", Dimension::energy);
  s.sigma_z0 = q("sigma_z0", Dimension::length);
  s.interaction_length = q("interaction_length", Dimension::length);

  const bool has_omega = find(j, "omega") != nullptr;
  const bool has_lambda = find(j, "wavelength") != nullptr;
  if (has_omega == has_lambda) fail(path, "give exactly one of omega and wavelength");
  if (has_omega) {
    s.omega = q("omega", Dimension::angular_frequency);
  } else {
    const double lambda = q("wavelength", Dimension::length);
    if (!(lambda > 0.0)) fail(join(path, "wavelength"), "must be > 0");
    s.omega = 2.0 * std::numbers::pi * constants::c / lambda;
  }

  if (find(j, "drift_length") && find(j, "drift_time")) fail(path, "give at most one of drift_length and drift_time");
  if (find(j, "phi0")) s.phi0 = angle(j.at("phi0"), join(path, "phi0"));
  if (find(j, "pierce_impedance")) s.pierce_impedance = q("pierce_impedance", Dimension::impedance);
  if (find(j, "field_amplitude")) s.field_amplitude = q("field_amplitude", Dimension::field);
  if (s.pierce_impedance.has_value() == s.field_amplitude.has_value())
    fail(path, "give exactly one of pierce_impedance and field_amplitude");

  // Positivity checks here give field-level messages; kinematics repeats them.
  auto positive = [&](double v, std::string_view key) {
    if (!(v > 0.0)) fail(join(path, key), "must be > 0");
  };
  positive(s.electron_kinetic_energy, "electron_kinetic_energy");
  positive(s.sigma_z0, "sigma_z0");
  positive(s.interaction_length, "interaction_length");
  positive(s.omega, has_omega ? "omega" : "wavelength");
  if (s.pierce_impedance) positive(*s.pierce_impedance, "pierce_impedance");
  if (s.field_amplitude) positive(*s.field_amplitude, "field_amplitude");

  const BeamKinematics beam = beam_kinematics(s);
  if (find(j, "drift_length")) {
    s.drift_length = q("drift_length", Dimension::length);
  } else if (find(j, "drift_time")) {
    s.drift_length = q("drift_time", Dimension::time) * beam.v0;
  }
  if (s.drift_length < 0.0) fail(join(path, find(j, "drift_time") ? "drift_time" : "drift_length"), "must be >= 0");

  // Omitted q_z means the synchronous slow-wave harmonic, q_z = omega / v0.
  s.q_z = find(j, "q_z") ? q("q_z", Dimension::wavenumber) : s.omega / beam.v0;
  positive(s.q_z, "q_z");

  if (const json* m = find(j, "modulation")) {
    const std::string mp = join(path, "modulation");
    require_object(*m, mp);
    reject_unknown(*m, mp, {"g_mag", "omega_b", "wavelength_b"});
    PhysicalModulation mod;
    mod.g_mag = number(need(*m, mp, "g_mag"), join(mp, "g_mag"));
    if (mod.g_mag < 0.0) fail(join(mp, "g_mag"), "must be >= 0");
    const bool has_wb = find(*m, "omega_b") != nullptr;
    if (has_wb == (find(*m, "wavelength_b") != nullptr)) fail(mp, "give exactly one of omega_b and wavelength_b");
    if (has_wb) {
      mod.omega_b = quantity(m->at("omega_b"), join(mp, "omega_b"), Dimension::angular_frequency);
    } else {
      const double lb = quantity(m->at("wavelength_b"), join(mp, "wavelength_b"), Dimension::length);
      if (!(lb > 0.0)) fail(join(mp, "wavelength_b"), "must be > 0");
      mod.omega_b = 2.0 * std::numbers::pi * constants::c / lb;
    }
    if (!(mod.omega_b > 0.0)) fail(join(mp, "omega_b"), "must be > 0");
    s.modulation = mod;
  }
  return s;
}

inline DimensionlessScenario parse_dimensionless(const json& j, const std::string& path, double nu0) {
  require_object(j, path);
  reject_unknown(j, path, {"ups", "theta", "eps", "phi0", "Gamma0", "chirp", "modulation", "small_ratios"});
  const double ups = number(need(j, path, "ups"), join(path, "ups"));
  const double theta = find(j, "theta") ? angle(j.at("theta"), join(path, "theta")) : 0.0;
  const double eps = find(j, "eps") ? number(j.at("eps"), join(path, "eps")) : 0.0;
  const double phi0 = find(j, "phi0") ? angle(j.at("phi0"), join(path, "phi0")) : 0.0;
  const double chirp = find(j, "chirp") ? number(j.at("chirp"), join(path, "chirp")) : 0.0;
  if (ups < 0.0) fail(join(path, "ups"), "must be >= 0");
  if (eps < 0.0) fail(join(path, "eps"), "must be >= 0");

  SmallRatios ratios;
  if (const json* r = find(j, "small_ratios")) {
    const std::string rp = join(path, "small_ratios");
    require_object(*r, rp);
    reject_unknown(*r, rp, {"rec_over_p0", "qz_over_p0", "sig_over_p0", "delta"});
    auto get = [&](std::string_view key) {
      const double v = find(*r, key) ? number(r->at(std::string(key)), join(rp, key)) : 0.0;
      if (v < 0.0) fail(join(rp, key), "must be >= 0");
      return v;
    };
    ratios = {get("rec_over_p0"), get("qz_over_p0"), get("sig_over_p0"), get("delta")};
  }

  try {
    if (const json* m = find(j, "modulation")) {
      const std::string mp = join(path, "modulation");
      require_object(*m, mp);
      reject_unknown(*m, mp, {"g_mag", "r", "w"});
      if (find(j, "Gamma0")) fail(join(path, "Gamma0"), "fixed by modulation.w * modulation.r; omit it");
      const ModulationParams mod{number(need(*m, mp, "g_mag"), join(mp, "g_mag")),
                                 number(need(*m, mp, "r"), join(mp, "r")), number(need(*m, mp, "w"), join(mp, "w"))};
      return modulated_scenario(ups, nu0, theta, eps, phi0, chirp, mod, ratios);
    }
    const double gamma0 = number(need(j, path, "Gamma0"), join(path, "Gamma0"));
    return gaussian_scenario(ups, nu0, theta, eps, phi0, gamma0, chirp, ratios);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

inline SweepSpec parse_sweep(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"axis", "start", "stop", "steps"});
  SweepSpec s;
  const std::string axis = text(need(j, path, "axis"), join(path, "axis"));
  if (axis == "Gamma") s.axis = SweepAxis::Gamma;
  else if (axis == "w") s.axis = SweepAxis::w;
  else if (axis == "t_D") s.axis = SweepAxis::t_D;
  else if (axis == "theta") s.axis = SweepAxis::theta;
  else if (axis == "phi0") s.axis = SweepAxis::phi0;
  else fail(join(path, "axis"), "unknown axis '" + axis + "' (expected Gamma, w, t_D, theta or phi0)");
  s.start = number(need(j, path, "start"), join(path, "start"));
  s.stop = number(need(j, path, "stop"), join(path, "stop"));
  const json& steps = need(j, path, "steps");
  if (!steps.is_number_integer()) fail(join(path, "steps"), "expected an integer");
  const auto n = steps.get<long long>();
  if (n < 2) fail(join(path, "steps"), "must be >= 2");
  if (n > 10'000'000) fail(join(path, "steps"), "must be <= 10000000");
  s.steps = static_cast<int>(n);
  return s;
}

inline OutputSpec parse_output(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"path", "format"});
  OutputSpec o;
  if (find(j, "path")) o.path = text(j.at("path"), join(path, "path"));
  if (find(j, "format")) {
    const std::string f = text(j.at("format"), join(path, "format"));
    if (f == "csv") o.format = OutputFormat::csv;
    else if (f == "json") o.format = OutputFormat::json;
    else fail(join(path, "format"), "expected csv or json");
  }
  return o;
}

}  // namespace config_detail

[[nodiscard]] inline ScenarioConfig parse_config(const nlohmann::json& doc) {
  using namespace config_detail;
  require_object(doc, "");
  reject_unknown(doc, "", {"physical", "dimensionless", "photon_state", "sweep", "output"});
  const bool phys = find(doc, "physical") != nullptr;
  const bool dimless = find(doc, "dimensionless") != nullptr;
  if (phys == dimless) fail("<root>", "give exactly one of physical and dimensionless");

  ScenarioConfig cfg;
  cfg.source = doc;
  cfg.photon_state = parse_photon_state(need(doc, "", "photon_state"), "photon_state");
  const double nu0 = mean_photon_number(cfg.photon_state);
  try {
    if (phys) {
      cfg.physical = parse_physical(doc.at("physical"), "physical");
      cfg.physical->photon_state = cfg.photon_state;
    } else {
      cfg.dimensionless = parse_dimensionless(doc.at("dimensionless"), "dimensionless", nu0);
    }
  } catch (const std::invalid_argument& e) {
    fail(phys ? "physical" : "dimensionless", e.what());
  }
  if (const json* s = find(doc, "sweep")) {
    cfg.sweep = parse_sweep(*s, "sweep");
    const bool modulated = phys ? cfg.physical->modulation.has_value() : cfg.dimensionless->modulation.has_value();
    if (cfg.sweep->axis == SweepAxis::w && !modulated) fail("sweep.axis", "axis w needs a modulated scenario");
    if (cfg.sweep->axis == SweepAxis::Gamma && modulated)
      fail("sweep.axis", "Gamma follows from w and r in a modulated scenario; sweep w instead");
  }
  if (const json* o = find(doc, "output")) cfg.output = parse_output(*o, "output");
  return cfg;
}

[[nodiscard]] inline ScenarioConfig parse_config_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("<document>: invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

[[nodiscard]] inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace fewave
