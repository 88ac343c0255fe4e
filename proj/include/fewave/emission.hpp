#pragma once

// Closed-form photon-emission increments for free-electron wavepackets
// interacting with a single quantized mode.
//
// Every increment splits into a first-order interference term dnu1 (depends
// on the wavepacket and, for coherent light, on the injection phase) and a
// second-order term dnu2 (plane-wave FEL gain plus spontaneous emission).

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "fewave/emission_result.hpp"
#include "fewave/kinematics.hpp"
#include "fewave/photon_state.hpp"
#include "fewave/scenario.hpp"
#include "fewave/specfun.hpp"

namespace fewave {

struct SincLineshape {
  double operator()(double x) const noexcept { return sinc(x); }
};

/// exp(-Gamma^2/2), flushed to exactly zero once the exponent passes 745.
[[nodiscard]] inline double extinction(double Gamma) noexcept {
  const double exponent = 0.5 * Gamma * Gamma;
  if (exponent > 745.0) return 0.0;
  return std::exp(-exponent);
}

namespace detail {
[[nodiscard]] inline double safe_exp(double exponent) noexcept {
  return exponent < -745.0 ? 0.0 : std::exp(exponent);
}
}  // namespace detail

/// Single-photon emission from the vacuum. Takes no wavepacket argument:
/// spontaneous emission does not depend on it.
template <class Lineshape = SincLineshape>
[[nodiscard]] double spontaneous(double ups, double theta_e, const Lineshape& lineshape = Lineshape{}) {
  const double s = lineshape(0.5 * theta_e);
  return ups * ups * (s * s);
}

/// Spontaneous photons per second: dnu_sp divided by the transit time L / v0.
[[nodiscard]] inline double spontaneous_rate(double dnu_sp, double v0, double length) {
  detail::require_positive(v0, "v0");
  detail::require_positive(length, "interaction_length");
  return (v0 / length) * dnu_sp;
}

/// Wavepacket-independent term, identical for Fock and coherent light.
template <class Lineshape = SincLineshape>
[[nodiscard]] double second_order(double ups, double nu0, double theta_e, double theta_a,
                                  const Lineshape& lineshape = Lineshape{}) {
  const double se = lineshape(0.5 * theta_e);
  const double sa = lineshape(0.5 * theta_a);
  return ups * ups * ((nu0 + 1.0) * se * se - nu0 * sa * sa);
}

template <class Lineshape = SincLineshape>
[[nodiscard]] EmissionResult stimulated_fock(double ups, long nu0, double theta_e, double theta_a,
                                             const Lineshape& lineshape = Lineshape{}) {
  if (nu0 < 0) throw std::invalid_argument("stimulated_fock: nu0 must be >= 0");
  // A Fock state has no phase: the first-order term is structurally zero.
  return {0.0, second_order(ups, static_cast<double>(nu0), theta_e, theta_a, lineshape)};
}

template <class Lineshape = SincLineshape>
[[nodiscard]] EmissionResult stimulated_coherent_gaussian(double ups, double nu0, double Gamma, double theta,
                                                          double eps, double phi0,
                                                          const Lineshape& lineshape = Lineshape{}) {
  if (!(Gamma >= 0.0)) throw std::invalid_argument("stimulated_coherent_gaussian: Gamma must be >= 0");
  if (!(nu0 >= 0.0)) throw std::invalid_argument("stimulated_coherent_gaussian: nu0 must be >= 0");
  const double theta_e = theta + 0.5 * eps;
  const double theta_a = theta - 0.5 * eps;
  const double branch_e = lineshape(0.5 * theta_e) * std::cos(0.5 * theta_e + phi0);
  const double branch_a = lineshape(0.5 * theta_a) * std::cos(0.5 * theta_a + phi0);
  EmissionResult out;
  out.dnu1 = 2.0 * ups * std::sqrt(nu0) * extinction(Gamma) * (branch_e + branch_a);
  out.dnu2 = second_order(ups, nu0, theta_e, theta_a, lineshape);
  return out;
}

/// First-order increment driven by a classical slow-wave field E_cl.
[[nodiscard]] inline double classical_field_increment(double field, double length, double omega, double Gamma,
                                                      double theta, double phi0) {
  detail::require_positive(field, "E_cl");
  detail::require_positive(length, "interaction_length");
  detail::require_positive(omega, "omega");
  const double kick = constants::e * field * length / (constants::hbar * omega);
  return kick * extinction(Gamma) * sinc(0.5 * theta) * std::cos(0.5 * theta + phi0);
}

// ---------------------------------------------------------------------------
// Modulated wavepackets
// ---------------------------------------------------------------------------

/// Bunching decay parameters for emission and absorption. Under the
/// p_rec^(e,a) = p_rec0 approximation absorption is the conjugate of emission.
struct BunchingPair {
  std::complex<double> emission;
  std::complex<double> absorption;

  /// In-phase spectrum B(omega) = (B_e + B_a) / 2.
  [[nodiscard]] double in_phase() const noexcept { return 0.5 * (emission + absorption).real(); }
  /// Quadrature part carried by odd harmonics; zero without drift.
  [[nodiscard]] double quadrature() const noexcept { return emission.imag(); }
};

// Harmonic terms with Gaussian weight below this are dropped. The induced
// error is at most kBunchingCutoff * (sum_n |J_n|)^2.
inline constexpr double kBunchingCutoff = 1e-18;

[[nodiscard]] inline BunchingPair bunching_B_ea(double g_mag, double r, double chirp, double w) {
  if (!(g_mag >= 0.0)) throw std::invalid_argument("bunching: g_mag must be >= 0");
  if (!(r > 0.0)) throw std::invalid_argument("bunching: r must be > 0");
  const BesselRow row = bessel_row(2.0 * g_mag);
  const int band = row.order_max;
  const double r2 = r * r;
  const double log_cut = std::log(kBunchingCutoff);
  std::complex<double> sum{0.0, 0.0};
  for (int l = -2 * band; l <= 2 * band; ++l) {
    const double detune = -0.5 * r2 * (l - w) * (l - w);
    if (detune < log_cut) continue;
    const double weight = detail::safe_exp(detune - 0.5 * r2 * chirp * chirp * w * w);
    if (weight == 0.0) continue;
    std::complex<double> inner{0.0, 0.0};
    for (int n = std::max(-band, l - band); n <= std::min(band, l + band); ++n) {
      const double phase = (2 * n - l) * w * chirp * r2;
      inner += row(n) * row(n - l) * std::polar(1.0, phase);
    }
    sum += weight * inner;
  }
  return {sum, std::conj(sum)};
}

/// In-phase bunching harmonic B_l; vanishes for odd l.
[[nodiscard]] inline double bunching_Bl(double g_mag, double r, double chirp, int l) {
  if (!(g_mag >= 0.0)) throw std::invalid_argument("bunching: g_mag must be >= 0");
  const BesselRow row = bessel_row(2.0 * g_mag);
  const int band = row.order_max;
  const double cr2 = chirp * r * r;
  double sum = 0.0;
  for (int n = std::max(-band, l - band); n <= std::min(band, l + band); ++n)
    sum += row(n) * row(n - l) * std::cos((2 * n - l) * l * cr2);
  return detail::safe_exp(-0.5 * l * l * chirp * chirp * r * r) * sum;
}

/// Quadrature bunching harmonic Q_l; vanishes for even l.
[[nodiscard]] inline double bunching_Ql(double g_mag, double r, double chirp, int l) {
  if (!(g_mag >= 0.0)) throw std::invalid_argument("bunching: g_mag must be >= 0");
  const BesselRow row = bessel_row(2.0 * g_mag);
  const int band = row.order_max;
  const double cr2 = chirp * r * r;
  double sum = 0.0;
  for (int n = std::max(-band, l - band); n <= std::min(band, l + band); ++n)
    sum += row(n) * row(n - l) * std::sin((2 * n - l) * l * cr2);
  return detail::safe_exp(-0.5 * l * l * chirp * chirp * r * r) * sum;
}

struct BunchingSpectrum {
  std::map<int, double> harmonics;             // l -> B_l
  std::map<int, double> quadrature_harmonics;  // l -> Q_l
  double envelope_sigma = 0.0;                 // Gamma_b = r sqrt(1 + C^2)
  std::vector<double> w;
  std::vector<double> in_phase;    // B(w)
  std::vector<double> quadrature;  // Q(w)

  [[nodiscard]] double envelope(int l, double wv) const noexcept {
    const double d = (wv - l) * envelope_sigma;
    return detail::safe_exp(-0.5 * d * d);
  }
  /// Contribution of harmonic l to B at frequency ratio wv.
  [[nodiscard]] double term(int l, double wv) const {
    const auto it = harmonics.find(l);
    return it == harmonics.end() ? 0.0 : it->second * envelope(l, wv);
  }
  [[nodiscard]] double B(double wv) const {
    double sum = 0.0;
    for (const auto& [l, bl] : harmonics) sum += bl * envelope(l, wv);
    return sum;
  }
  [[nodiscard]] double Q(double wv) const {
    double sum = 0.0;
    for (const auto& [l, ql] : quadrature_harmonics) sum += ql * envelope(l, wv);
    return sum;
  }
};

[[nodiscard]] inline BunchingSpectrum bunching_spectrum(double g_mag, double r, double chirp,
                                                        std::span<const double> w_grid) {
  if (!(r > 0.0)) throw std::invalid_argument("bunching_spectrum: r must be > 0");
  for (double wv : w_grid)
    if (!std::isfinite(wv)) throw std::invalid_argument("bunching_spectrum: w grid must be finite");
  BunchingSpectrum sp;
  sp.envelope_sigma = r * drift_factor(chirp);
  const int band = bessel_row(2.0 * g_mag).order_max;
  for (int l = -2 * band; l <= 2 * band; ++l) {
    sp.harmonics[l] = bunching_Bl(g_mag, r, chirp, l);
    sp.quadrature_harmonics[l] = bunching_Ql(g_mag, r, chirp, l);
  }
  sp.w.assign(w_grid.begin(), w_grid.end());
  sp.in_phase.reserve(w_grid.size());
  sp.quadrature.reserve(w_grid.size());
  for (double wv : w_grid) {
    sp.in_phase.push_back(sp.B(wv));
    sp.quadrature.push_back(sp.Q(wv));
  }
  return sp;
}

/// Coherent light on a comb-modulated wavepacket. The interference term
/// carries conj(B_e) against exp(+i(theta_e/2 + phi0)) and conj(B_a) against
/// exp(-i(theta_a/2 + phi0)), so the in-phase spectrum multiplies the cosine
/// and the quadrature spectrum the sine.
template <class Lineshape = SincLineshape>
[[nodiscard]] EmissionResult stimulated_coherent_modulated(double ups, double nu0,
                                                           const DimensionlessScenario& scenario,
                                                           const Lineshape& lineshape = Lineshape{}) {
  if (!scenario.modulation) throw std::invalid_argument("stimulated_coherent_modulated: scenario has no modulation");
  if (!(nu0 >= 0.0)) throw std::invalid_argument("stimulated_coherent_modulated: nu0 must be >= 0");
  const auto& mod = *scenario.modulation;
  const BunchingPair b = bunching_B_ea(mod.g_mag, mod.r, scenario.chirp, mod.w);
  const double theta_e = scenario.theta_e();
  const double theta_a = scenario.theta_a();
  const double phase_e = 0.5 * theta_e + scenario.phi0;
  const double phase_a = 0.5 * theta_a + scenario.phi0;
  const double branch_e = lineshape(0.5 * theta_e) * (std::conj(b.emission) * std::polar(1.0, phase_e)).real();
  const double branch_a = lineshape(0.5 * theta_a) * (std::conj(b.absorption) * std::polar(1.0, -phase_a)).real();
  EmissionResult out;
  out.dnu1 = 2.0 * ups * std::sqrt(nu0) * (branch_e + branch_a);
  out.dnu2 = second_order(ups, nu0, theta_e, theta_a, lineshape);
  return out;
}

/// Dispatch on the photon state and wavepacket kind.
template <class Lineshape = SincLineshape>
[[nodiscard]] EmissionResult emit(const DimensionlessScenario& s, const PhotonFieldState& state,
                                  const Lineshape& lineshape = Lineshape{}) {
  validate(state);
  if (std::holds_alternative<Vacuum>(state)) return {0.0, spontaneous(s.ups, s.theta_e(), lineshape)};
  if (const auto* f = std::get_if<Fock>(&state)) return stimulated_fock(s.ups, f->nu0, s.theta_e(), s.theta_a(), lineshape);
  const double nu0 = std::get<Coherent>(state).nu0;
  if (s.modulation) return stimulated_coherent_modulated(s.ups, nu0, s, lineshape);
  return stimulated_coherent_gaussian(s.ups, nu0, s.Gamma, s.theta, s.eps, s.phi0, lineshape);
}

// ---------------------------------------------------------------------------
// Derived figures of merit
// ---------------------------------------------------------------------------

/// (dnu1)^2 / dnu_sp; structure-independent since Ups^2 cancels.
[[nodiscard]] inline double einstein_ratio(double dnu1, double dnu_sp) {
  if (!(dnu_sp > std::numeric_limits<double>::min()))
    throw std::domain_error("einstein_ratio: spontaneous emission underflows");
  return dnu1 * dnu1 / dnu_sp;
}

[[nodiscard]] inline double einstein_ratio_analytic(double nu0, double Gamma, double theta, double phi0) {
  const double c = std::cos(0.5 * theta + phi0);
  const double ext = extinction(Gamma);
  return 16.0 * nu0 * ext * ext * c * c;
}

/// Peak first-order increment over the spontaneous baseline at that point,
/// 4 sqrt(nu0) / Ups (point-particle limit, Gamma = 0).
[[nodiscard]] inline double signal_to_noise(double nu0, double ups) {
  if (!(ups > 0.0)) throw std::invalid_argument("signal_to_noise: ups must be > 0");
  if (!(nu0 >= 0.0)) throw std::invalid_argument("signal_to_noise: nu0 must be >= 0");
  return 4.0 * std::sqrt(nu0) / ups;
}

}  // namespace fewave
