#pragma once

// SI-unit electron/mode setups and their reduction to DimensionlessScenario.
// All recoil and detuning algebra lives here.

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "fewave/photon_state.hpp"
#include "fewave/scenario.hpp"

namespace fewave {

// CODATA 2018 (SI exact where defined).
namespace constants {
inline constexpr double c = 299792458.0;
inline constexpr double h = 6.62607015e-34;
inline constexpr double hbar = h / (2.0 * std::numbers::pi);
inline constexpr double e = 1.602176634e-19;
inline constexpr double m_e = 9.1093837015e-31;
inline constexpr double compton_wavelength = h / (m_e * c);
}  // namespace constants

struct PhysicalModulation {
  double g_mag = 0.0;    // PINEM coupling |g|
  double omega_b = 0.0;  // modulation laser angular frequency, rad/s
};

struct PhysicalSetup {
  double electron_kinetic_energy = 0.0;  // J
  double sigma_z0 = 0.0;                 // m
  double drift_length = 0.0;             // L_D, m (zero allowed)
  double interaction_length = 0.0;       // L, m
  double omega = 0.0;                    // rad/s
  double q_z = 0.0;                      // 1/m
  double phi0 = 0.0;                     // rad
  std::optional<double> pierce_impedance;  // ohm
  std::optional<double> field_amplitude;   // E_qz0, V/m
  PhotonFieldState photon_state = Vacuum{};
  std::optional<PhysicalModulation> modulation;
};

/// Beam quantities derived from the kinetic energy and the initial width.
struct BeamKinematics {
  double gamma0 = 1.0;
  double beta0 = 0.0;
  double v0 = 0.0;
  double m_eff = 0.0;     // gamma0^3 m
  double p0 = 0.0;        // gamma0 m v0
  double sigma_p0 = 0.0;  // hbar / (2 sigma_z0)
  double xi = 0.0;        // 2 sigma_p0^2 / (m_eff hbar)
  double t_drift = 0.0;   // L_D / v0
};

struct InteractionDetuning {
  double p_rec0 = 0.0;  // hbar omega / v0
  double delta = 0.0;   // hbar omega / (2 m_eff v0^2)
  double p_rec_e = 0.0;
  double p_rec_a = 0.0;
  double theta = 0.0;
  double eps = 0.0;
  double theta_e = 0.0;
  double theta_a = 0.0;
};

namespace detail {
inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + ": must be positive and finite");
}
}  // namespace detail

/// Single-photon slow-wave amplitude from the Pierce impedance and the
/// one-photon energy quantized over the transit time L / v0.
[[nodiscard]] inline double mode_amplitude(double pierce_impedance, double q_z, double omega, double length,
                                           double v0) {
  detail::require_positive(pierce_impedance, "pierce_impedance");
  detail::require_positive(q_z, "q_z");
  detail::require_positive(omega, "omega");
  detail::require_positive(length, "interaction_length");
  detail::require_positive(v0, "v0");
  return std::sqrt(2.0 * pierce_impedance * q_z * q_z * constants::hbar * omega * v0 / length);
}

[[nodiscard]] inline InteractionDetuning recoil_detuning(double v0, double m_eff, double omega, double q_z,
                                                         double length) {
  detail::require_positive(v0, "v0");
  detail::require_positive(m_eff, "m_eff");
  detail::require_positive(omega, "omega");
  detail::require_positive(q_z, "q_z");
  detail::require_positive(length, "interaction_length");
  InteractionDetuning d;
  d.p_rec0 = constants::hbar * omega / v0;
  d.delta = constants::hbar * omega / (2.0 * m_eff * v0 * v0);
  d.p_rec_e = d.p_rec0 * (1.0 + d.delta);
  d.p_rec_a = d.p_rec0 * (1.0 - d.delta);
  d.theta = (omega / v0 - q_z) * length;
  d.eps = d.delta * (omega / v0) * length;
  d.theta_e = d.theta + 0.5 * d.eps;
  d.theta_a = d.theta - 0.5 * d.eps;
  return d;
}

/// Drift distance beyond which the wavepacket has spread past classical
/// visibility: beta0^3 gamma0^3 lambda^2 / (pi lambda_c).
[[nodiscard]] inline double drift_limit_zG(double beta0, double gamma0, double wavelength,
                                           double compton_wavelength = constants::compton_wavelength) {
  const double bg = beta0 * gamma0;
  return bg * bg * bg * wavelength * wavelength / (std::numbers::pi * compton_wavelength);
}

[[nodiscard]] inline BeamKinematics beam_kinematics(const PhysicalSetup& setup) {
  detail::require_positive(setup.electron_kinetic_energy, "electron_kinetic_energy");
  detail::require_positive(setup.sigma_z0, "sigma_z0");
  if (!(setup.drift_length >= 0.0) || !std::isfinite(setup.drift_length))
    throw std::invalid_argument("drift_length: must be >= 0 and finite");
  using namespace constants;
  BeamKinematics b;
  b.gamma0 = 1.0 + setup.electron_kinetic_energy / (m_e * c * c);
  b.beta0 = std::sqrt(1.0 - 1.0 / (b.gamma0 * b.gamma0));
  b.v0 = b.beta0 * c;
  b.m_eff = b.gamma0 * b.gamma0 * b.gamma0 * m_e;
  b.p0 = b.gamma0 * m_e * b.v0;
  b.sigma_p0 = hbar / (2.0 * setup.sigma_z0);
  if (!(b.sigma_p0 > 0.0) || !std::isfinite(b.sigma_p0))
    throw std::invalid_argument("sigma_z0: derived sigma_p0 must be positive");
  b.xi = 2.0 * b.sigma_p0 * b.sigma_p0 / (b.m_eff * hbar);
  b.t_drift = setup.drift_length / b.v0;
  return b;
}

[[nodiscard]] inline double single_photon_field(const PhysicalSetup& setup, const BeamKinematics& beam) {
  if (setup.pierce_impedance.has_value() == setup.field_amplitude.has_value())
    throw std::invalid_argument("exactly one of pierce_impedance and field_amplitude must be supplied");
  if (setup.field_amplitude) {
    detail::require_positive(*setup.field_amplitude, "field_amplitude");
    return *setup.field_amplitude;
  }
  return mode_amplitude(*setup.pierce_impedance, setup.q_z, setup.omega, setup.interaction_length, beam.v0);
}

[[nodiscard]] inline DimensionlessScenario derive_scenario(const PhysicalSetup& setup) {
  detail::require_positive(setup.interaction_length, "interaction_length");
  detail::require_positive(setup.omega, "omega");
  detail::require_positive(setup.q_z, "q_z");
  if (!std::isfinite(setup.phi0)) throw std::invalid_argument("phi0: must be finite");
  validate(setup.photon_state);

  const BeamKinematics beam = beam_kinematics(setup);
  const InteractionDetuning det = recoil_detuning(beam.v0, beam.m_eff, setup.omega, setup.q_z,
                                                  setup.interaction_length);
  const double field = single_photon_field(setup, beam);
  const double length = setup.interaction_length;
  const double ups = constants::e * field * length / (4.0 * constants::hbar * setup.omega);
  const double gamma0_ext = setup.omega / beam.v0 * setup.sigma_z0;
  const double chirp = beam.xi * beam.t_drift;
  const double nu0 = mean_photon_number(setup.photon_state);

  const SmallRatios ratios{det.p_rec0 / beam.p0, constants::hbar * setup.q_z / beam.p0, beam.sigma_p0 / beam.p0,
                           det.delta};

  DimensionlessScenario s;
  if (setup.modulation) {
    detail::require_positive(setup.modulation->omega_b, "modulation.omega_b");
    if (!(setup.modulation->g_mag >= 0.0)) throw std::invalid_argument("modulation.g_mag: must be >= 0");
    const double delta_p = constants::hbar * setup.modulation->omega_b / beam.v0;
    const ModulationParams mod{setup.modulation->g_mag, delta_p / (2.0 * beam.sigma_p0),
                               setup.omega / setup.modulation->omega_b};
    s = modulated_scenario(ups, nu0, det.theta, det.eps, setup.phi0, chirp, mod, ratios);
    // Keep the Gaussian-route Gamma0; the comb route must agree with it.
    s.Gamma0 = gamma0_ext;
    s.Gamma = gamma0_ext * drift_factor(chirp);
  } else {
    s = gaussian_scenario(ups, nu0, det.theta, det.eps, setup.phi0, gamma0_ext, chirp, ratios);
  }

  const double mismatch = std::abs(1.0 - setup.q_z * beam.v0 / setup.omega);
  if (mismatch > 1e-2)
    s.warnings.push_back("synchronism v0 = omega/q_z violated by " + std::to_string(mismatch * 100.0) + "%");
  return s;
}

}  // namespace fewave
