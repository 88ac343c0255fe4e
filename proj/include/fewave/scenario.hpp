#pragma once

// The dimensionless parameter bundle consumed by the emission engine and
// the momentum-quadrature oracle. No SI quantities appear past this point.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fewave {

/// Ratios to the central momentum p0; only the oracle reads them.
struct SmallRatios {
  double rec_over_p0 = 0.0;  // hbar*omega/v0 / p0
  double qz_over_p0 = 0.0;   // hbar*q_z / p0
  double sig_over_p0 = 0.0;  // sigma_p0 / p0
  double delta = 0.0;        // recoil asymmetry: p_rec^(e,a) = p_rec0 (1 +- delta)

  [[nodiscard]] double max_ratio() const noexcept {
    return std::max({rec_over_p0, qz_over_p0, sig_over_p0});
  }

  /// Messages for ratios outside the p_rec, hbar*q_z, sigma_p0 << p0 regime.
  [[nodiscard]] std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    auto check = [&](double v, const char* name) {
      if (v > 1e-2) out.push_back(std::string(name) + " = " + std::to_string(v) + " exceeds 1e-2");
    };
    check(rec_over_p0, "p_rec/p0");
    check(qz_over_p0, "hbar*q_z/p0");
    check(sig_over_p0, "sigma_p0/p0");
    return out;
  }

  void validate() const {
    if (!(rec_over_p0 >= 0.0 && qz_over_p0 >= 0.0 && sig_over_p0 >= 0.0 && delta >= 0.0))
      throw std::invalid_argument("small_ratios: all ratios must be >= 0");
  }
};

/// PINEM-type comb modulation in reduced form.
struct ModulationParams {
  double g_mag = 0.0;  // |g|; Bessel argument is 2|g|
  double r = 0.0;      // delta_p / (2 sigma_p0)
  double w = 0.0;      // omega / omega_b
};

struct DimensionlessScenario {
  double ups = 0.0;     // coupling e E_qz0 L / (4 hbar omega)
  double nu0 = 0.0;     // photon number (mean for coherent states)
  double theta = 0.0;   // classical detuning (omega/v0 - q_z) L
  double eps = 0.0;     // quantum recoil parameter
  double phi0 = 0.0;    // injection phase
  double Gamma0 = 0.0;  // extinction parameter before drift
  double chirp = 0.0;   // C = xi * t_D
  double Gamma = 0.0;   // Gamma0 * sqrt(1 + C^2)
  std::optional<ModulationParams> modulation;
  SmallRatios small_ratios{};
  std::vector<std::string> warnings;

  [[nodiscard]] double theta_e() const noexcept { return theta + 0.5 * eps; }
  [[nodiscard]] double theta_a() const noexcept { return theta - 0.5 * eps; }
  [[nodiscard]] double g_mag() const noexcept { return modulation ? modulation->g_mag : 0.0; }
};

[[nodiscard]] inline double drift_factor(double chirp) noexcept { return std::sqrt(1.0 + chirp * chirp); }

namespace detail {

inline void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + ": must be finite");
}

inline void annotate(DimensionlessScenario& s) {
  if (s.eps > 0.1)
    s.warnings.push_back("eps = " + std::to_string(s.eps) + " is not << 1; recoil expansion may be inaccurate");
  for (auto& w : s.small_ratios.warnings()) s.warnings.push_back(std::move(w));
}

inline void check_common(double ups, double nu0, double theta, double eps, double phi0, double chirp) {
  check_finite(ups, "ups");
  check_finite(nu0, "nu0");
  check_finite(theta, "theta");
  check_finite(eps, "eps");
  check_finite(phi0, "phi0");
  check_finite(chirp, "chirp");
  if (ups < 0.0) throw std::invalid_argument("ups: must be >= 0");
  if (nu0 < 0.0) throw std::invalid_argument("nu0: must be >= 0");
}

}  // namespace detail

/// Unmodulated Gaussian wavepacket.
[[nodiscard]] inline DimensionlessScenario gaussian_scenario(double ups, double nu0, double theta, double eps,
                                                             double phi0, double Gamma0, double chirp,
                                                             SmallRatios ratios = {}) {
  detail::check_common(ups, nu0, theta, eps, phi0, chirp);
  detail::check_finite(Gamma0, "Gamma0");
  if (Gamma0 < 0.0) throw std::invalid_argument("Gamma0: must be >= 0");
  ratios.validate();
  DimensionlessScenario s;
  s.ups = ups;
  s.nu0 = nu0;
  s.theta = theta;
  s.eps = eps;
  s.phi0 = phi0;
  s.Gamma0 = Gamma0;
  s.chirp = chirp;
  s.Gamma = Gamma0 * drift_factor(chirp);
  s.small_ratios = ratios;
  detail::annotate(s);
  return s;
}

/// Comb-modulated wavepacket; Gamma0 follows from the comb route, w * r.
[[nodiscard]] inline DimensionlessScenario modulated_scenario(double ups, double nu0, double theta, double eps,
                                                              double phi0, double chirp, ModulationParams mod,
                                                              SmallRatios ratios = {}) {
  detail::check_finite(mod.g_mag, "modulation.g_mag");
  detail::check_finite(mod.r, "modulation.r");
  detail::check_finite(mod.w, "modulation.w");
  if (mod.g_mag < 0.0) throw std::invalid_argument("modulation.g_mag: must be >= 0");
  if (!(mod.r > 0.0)) throw std::invalid_argument("modulation.r: must be > 0");
  if (mod.w < 0.0) throw std::invalid_argument("modulation.w: must be >= 0");
  auto s = gaussian_scenario(ups, nu0, theta, eps, phi0, mod.w * mod.r, chirp, ratios);
  s.modulation = mod;
  return s;
}

/// Extinction parameter through the comb route, w * r * sqrt(1 + C^2).
[[nodiscard]] inline double comb_route_gamma(const DimensionlessScenario& s) {
  if (!s.modulation) throw std::logic_error("comb_route_gamma: scenario has no modulation");
  return s.modulation->w * s.modulation->r * drift_factor(s.chirp);
}

/// Small ratios consistent with the scenario's recoil shift:
/// p_rec/sigma_p0 = 2 Gamma0, so rec = 2 Gamma0 * sig.
[[nodiscard]] inline SmallRatios consistent_ratios(double Gamma0, double sig_over_p0, double qz_over_p0,
                                                   double delta) {
  return SmallRatios{2.0 * Gamma0 * sig_over_p0, qz_over_p0, sig_over_p0, delta};
}

}  // namespace fewave
