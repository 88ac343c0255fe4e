#pragma once

// Brute-force evaluation of the first- and second-order photon sums by
// direct quadrature over electron momentum, using explicit momentum-space
// amplitudes. Nothing here calls the closed-form engine.
//
// Momentum is measured as u = (p - p0) / sigma_p0. A recoil p_rec shifts u
// by p_rec / sigma_p0 = rec_over_p0 / sig_over_p0. The global phase of the
// drifted amplitude multiplies c*(p) and c(p +- p_rec) alike and is dropped.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fewave/emission_result.hpp"
#include "fewave/photon_state.hpp"
#include "fewave/quadrature.hpp"
#include "fewave/scenario.hpp"
#include "fewave/specfun.hpp"

namespace fewave {

/// Lobe margin (in u) that every quadrature domain must keep around the
/// Gaussian lobes it integrates over; exp(-8^2/2) ~ 1e-14 in |c|^2.
inline constexpr double kRequiredMargin = 8.0;
/// Margin used when the grid is built automatically.
inline constexpr double kGridMargin = 10.0;

class MomentumGrid {
 public:
  MomentumGrid() = default;
  explicit MomentumGrid(CompositeRule rule) : rule_(std::move(rule)) {}

  /// Panels over [lo, hi] narrow enough to resolve the chirp C u^2 / 4 with
  /// at least 32 nodes per period at the domain edge. `density` multiplies
  /// the panel count.
  [[nodiscard]] static MomentumGrid covering(double lo, double hi, double chirp, double density = 1.0) {
    if (!(density >= 1.0)) throw std::invalid_argument("MomentumGrid: density must be >= 1");
    const double edge = std::max(std::abs(lo), std::abs(hi));
    double width = 0.5;
    if (chirp != 0.0 && edge > 0.0) width = std::min(width, 2.0 * std::numbers::pi / (std::abs(chirp) * edge));
    const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / width * density));
    return MomentumGrid(CompositeRule(lo, hi, std::max<std::size_t>(panels, 1)));
  }

  [[nodiscard]] double u_min() const noexcept { return rule_.lo(); }
  [[nodiscard]] double u_max() const noexcept { return rule_.hi(); }
  [[nodiscard]] std::span<const double> nodes() const noexcept { return rule_.nodes(); }
  [[nodiscard]] std::span<const double> weights() const noexcept { return rule_.weights(); }
  [[nodiscard]] std::size_t node_count() const noexcept { return rule_.nodes().size(); }
  [[nodiscard]] const CompositeRule& rule() const noexcept { return rule_; }

  [[nodiscard]] bool covers(double lo, double hi) const noexcept { return u_min() <= lo && u_max() >= hi; }

 private:
  CompositeRule rule_;
};

enum class AmplitudeProvenance { gaussian, modulated, modulated_per_comb };

[[nodiscard]] inline const char* to_string(AmplitudeProvenance p) {
  switch (p) {
    case AmplitudeProvenance::gaussian: return "gaussian";
    case AmplitudeProvenance::modulated: return "modulated";
    case AmplitudeProvenance::modulated_per_comb: return "modulated_per_comb";
  }
  return "unknown";
}

/// Momentum-space amplitude c(u), normalized to integral |c|^2 du = 1.
/// Keeps its generating parameters so it can be evaluated off-grid at the
/// recoil-shifted points.
class MomentumAmplitude {
 public:
  MomentumAmplitude(AmplitudeProvenance provenance, double chirp, double g_mag, double r, MomentumGrid grid)
      : provenance_(provenance), chirp_(chirp), spacing_(2.0 * r), grid_(std::move(grid)) {
    if (!std::isfinite(chirp)) throw std::invalid_argument("MomentumAmplitude: chirp must be finite");
    if (provenance != AmplitudeProvenance::gaussian) {
      if (!(g_mag >= 0.0)) throw std::invalid_argument("MomentumAmplitude: g_mag must be >= 0");
      if (!(r > 0.0)) throw std::invalid_argument("MomentumAmplitude: r must be > 0");
      row_ = bessel_row(2.0 * g_mag);
    } else {
      row_ = bessel_row(0.0);
      spacing_ = 0.0;
    }
    if (!grid_.covers(lobe_min() - kRequiredMargin, lobe_max() + kRequiredMargin)) {
      std::ostringstream msg;
      msg << "momentum grid [" << grid_.u_min() << ", " << grid_.u_max() << "] is too narrow: lobes span ["
          << lobe_min() << ", " << lobe_max() << "] and need a margin of " << kRequiredMargin;
      throw std::invalid_argument(msg.str());
    }
    values_.reserve(grid_.node_count());
    for (double u : grid_.nodes()) values_.push_back((*this)(u));
  }

  [[nodiscard]] std::complex<double> operator()(double u) const {
    constexpr double lobe_reach = 40.0;  // exp(-40^2/4) underflows any lobe beyond this
    const int band = row_.order_max;
    int n_lo = -band;
    int n_hi = band;
    if (spacing_ > 0.0) {
      n_lo = std::max(n_lo, static_cast<int>(std::ceil((u - lobe_reach) / spacing_)));
      n_hi = std::min(n_hi, static_cast<int>(std::floor((u + lobe_reach) / spacing_)));
    }
    static const double norm = std::pow(2.0 * std::numbers::pi, -0.25);
    if (provenance_ == AmplitudeProvenance::modulated_per_comb) {
      std::complex<double> sum{0.0, 0.0};
      for (int n = n_lo; n <= n_hi; ++n) {
        const double x = u - n * spacing_;
        sum += row_(n) * std::exp(std::complex<double>(-0.25 * x * x, -0.25 * chirp_ * x * x));
      }
      return norm * sum;
    }
    double comb = 0.0;
    for (int n = n_lo; n <= n_hi; ++n) {
      const double x = u - n * spacing_;
      comb += row_(n) * std::exp(-0.25 * x * x);
    }
    return norm * comb * std::polar(1.0, -0.25 * chirp_ * u * u);
  }

  [[nodiscard]] AmplitudeProvenance provenance() const noexcept { return provenance_; }
  [[nodiscard]] double chirp() const noexcept { return chirp_; }
  [[nodiscard]] const MomentumGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<const std::complex<double>> values() const noexcept { return values_; }
  [[nodiscard]] double lobe_min() const noexcept { return -row_.order_max * spacing_; }
  [[nodiscard]] double lobe_max() const noexcept { return row_.order_max * spacing_; }

  /// Integral of |c(u)|^2 over the grid.
  [[nodiscard]] double norm() const {
    return grid_.rule().integrate([this](double u) { return std::norm((*this)(u)); });
  }

 private:
  AmplitudeProvenance provenance_;
  double chirp_;
  double spacing_;
  BesselRow row_;
  MomentumGrid grid_;
  std::vector<std::complex<double>> values_;
};

/// exp(-u^2 (1 + iC) / 4) up to normalization.
[[nodiscard]] inline MomentumAmplitude gaussian_amplitude(double chirp, MomentumGrid grid) {
  return MomentumAmplitude(AmplitudeProvenance::gaussian, chirp, 0.0, 0.0, std::move(grid));
}

/// Bessel-weighted comb of Gaussians at u = 2 n r under one common chirp.
[[nodiscard]] inline MomentumAmplitude modulated_amplitude(double g_mag, double r, double chirp, MomentumGrid grid) {
  return MomentumAmplitude(AmplitudeProvenance::modulated, chirp, g_mag, r, std::move(grid));
}

/// Comb variant where every tooth carries its own chirp about its centre.
[[nodiscard]] inline MomentumAmplitude modulated_amplitude_per_comb(double g_mag, double r, double chirp,
                                                                    MomentumGrid grid) {
  return MomentumAmplitude(AmplitudeProvenance::modulated_per_comb, chirp, g_mag, r, std::move(grid));
}

namespace detail {

struct Recoil {
  double rec_e;    // p_rec^(e) / p0
  double rec_a;    // p_rec^(a) / p0
  double shift_e;  // p_rec^(e) / sigma_p0
  double shift_a;
};

inline Recoil recoil_from(const SmallRatios& ratios) {
  ratios.validate();
  if (!(ratios.sig_over_p0 > 0.0))
    throw std::invalid_argument("oracle: sig_over_p0 must be > 0 to place the recoil shift");
  Recoil rc;
  rc.rec_e = ratios.rec_over_p0 * (1.0 + ratios.delta);
  rc.rec_a = ratios.rec_over_p0 * (1.0 - ratios.delta);
  rc.shift_e = rc.rec_e / ratios.sig_over_p0;
  rc.shift_a = rc.rec_a / ratios.sig_over_p0;
  return rc;
}

inline void require_coverage(const MomentumAmplitude& amp, double shift, const char* what) {
  const double lo = amp.lobe_min() - shift - kRequiredMargin;
  const double hi = amp.lobe_max() - shift + kRequiredMargin;
  if (!amp.grid().covers(lo, hi)) {
    std::ostringstream msg;
    msg << what << ": grid [" << amp.grid().u_min() << ", " << amp.grid().u_max()
        << "] does not cover shifted lobes [" << lo << ", " << hi << "]";
    throw std::invalid_argument(msg.str());
  }
}

template <class T, class F>
T checked_integral(const MomentumGrid& grid, F&& integrand, const char* what) {
  const T value = grid.rule().integrate(integrand);
  const bool finite = std::isfinite(std::real(value)) && std::isfinite(std::imag(value));
  if (!finite) {
    for (double u : grid.nodes()) {
      const T v = integrand(u);
      if (!std::isfinite(std::real(v)) || !std::isfinite(std::imag(v))) {
        std::ostringstream msg;
        msg << what << ": non-finite integrand at u = " << u;
        throw std::runtime_error(msg.str());
      }
    }
    throw std::runtime_error(std::string(what) + ": non-finite result");
  }
  return value;
}

}  // namespace detail

/// Recoil overlaps with their momentum prefactors:
/// emission   integral (1 + sig u + rec_e - qz/2) c*(u) c(u + s_e) du,
/// absorption integral (1 + sig u - rec_a + qz/2) c*(u) c(u - s_a) du.
struct RecoilOverlaps {
  std::complex<double> emission;
  std::complex<double> absorption;
};

[[nodiscard]] inline RecoilOverlaps recoil_overlaps(const MomentumAmplitude& amp, const SmallRatios& ratios) {
  const auto rc = detail::recoil_from(ratios);
  detail::require_coverage(amp, rc.shift_e, "first_order_quadrature (emission)");
  detail::require_coverage(amp, -rc.shift_a, "first_order_quadrature (absorption)");
  const double sig = ratios.sig_over_p0;
  const double qz = ratios.qz_over_p0;
  const auto& grid = amp.grid();
  RecoilOverlaps out;
  out.emission = detail::checked_integral<std::complex<double>>(
      grid,
      [&](double u) { return (1.0 + sig * u + rc.rec_e - 0.5 * qz) * std::conj(amp(u)) * amp(u + rc.shift_e); },
      "first_order_quadrature (emission)");
  out.absorption = detail::checked_integral<std::complex<double>>(
      grid,
      [&](double u) { return (1.0 + sig * u - rc.rec_a + 0.5 * qz) * std::conj(amp(u)) * amp(u - rc.shift_a); },
      "first_order_quadrature (absorption)");
  return out;
}

struct OracleAngles {
  double theta = 0.0;
  double eps = 0.0;
  double phi0 = 0.0;
};

/// First-order (interference) increment. Vacuum and Fock states have no
/// photon coherence and return exactly zero without integrating.
[[nodiscard]] inline double first_order_quadrature(const MomentumAmplitude& amp, const SmallRatios& ratios,
                                                   OracleAngles angles, double ups, const PhotonFieldState& state) {
  validate(state);
  if (!is_coherent(state)) return 0.0;
  const double nu0 = std::get<Coherent>(state).nu0;
  const auto ov = recoil_overlaps(amp, ratios);
  const double theta_e = angles.theta + 0.5 * angles.eps;
  const double theta_a = angles.theta - 0.5 * angles.eps;
  // Poisson sums: sum sqrt(nu+1) c_{nu+1} c_nu = sum sqrt(nu) c_{nu-1} c_nu = sqrt(nu0).
  const double emission =
      sinc(0.5 * theta_e) * (ov.emission * std::polar(1.0, 0.5 * theta_e + angles.phi0)).real();
  const double absorption =
      sinc(0.5 * theta_a) * (ov.absorption * std::polar(1.0, -(0.5 * theta_a + angles.phi0))).real();
  return 2.0 * ups * std::sqrt(nu0) * (emission + absorption);
}

/// Second-order increment; the Poisson weights (nu0 + 1, nu0) are exact for
/// coherent light and coincide with the Fock ones.
[[nodiscard]] inline double second_order_quadrature(const MomentumAmplitude& amp, const SmallRatios& ratios,
                                                    OracleAngles angles, double ups,
                                                    const PhotonFieldState& state) {
  validate(state);
  const double nu0 = mean_photon_number(state);
  const auto rc = detail::recoil_from(ratios);
  detail::require_coverage(amp, rc.shift_e, "second_order_quadrature (emission)");
  detail::require_coverage(amp, -rc.shift_a, "second_order_quadrature (absorption)");
  const double sig = ratios.sig_over_p0;
  const double qz = ratios.qz_over_p0;
  const auto& grid = amp.grid();
  const double weight_e = detail::checked_integral<double>(
      grid,
      [&](double u) {
        const double pre = 1.0 + sig * u + rc.rec_e - 0.5 * qz;
        return pre * pre * std::norm(amp(u + rc.shift_e));
      },
      "second_order_quadrature (emission)");
  double weight_a = 0.0;
  if (nu0 > 0.0) {
    weight_a = detail::checked_integral<double>(
        grid,
        [&](double u) {
          const double pre = 1.0 + sig * u - rc.rec_a + 0.5 * qz;
          return pre * pre * std::norm(amp(u - rc.shift_a));
        },
        "second_order_quadrature (absorption)");
  }
  const double theta_e = angles.theta + 0.5 * angles.eps;
  const double theta_a = angles.theta - 0.5 * angles.eps;
  const double se = sinc(0.5 * theta_e);
  const double sa = sinc(0.5 * theta_a);
  return ups * ups * ((nu0 + 1.0) * se * se * weight_e - nu0 * sa * sa * weight_a);
}

/// |sum_{n,m} J_n J_m exp(-(n-m)^2 r^2 / 2) - 1| by direct double sum.
[[nodiscard]] inline double sum_rule_residual(double g_mag, double r) {
  if (!(g_mag >= 0.0)) throw std::invalid_argument("sum_rule_residual: g_mag must be >= 0");
  const BesselRow row = bessel_row(2.0 * g_mag);
  const int band = row.order_max;
  double sum = 0.0;
  for (int n = -band; n <= band; ++n) {
    double inner = 0.0;
    for (int m = -band; m <= band; ++m) {
      const double weight = std::exp(-0.5 * (n - m) * (n - m) * r * r);
      if (weight < 1e-18) continue;
      inner += row(m) * weight;
    }
    sum += row(n) * inner;
  }
  return std::abs(sum - 1.0);
}

// ---------------------------------------------------------------------------
// Scenario-level helpers
// ---------------------------------------------------------------------------

/// u-range that any oracle integral for this amplitude and recoil shift needs.
[[nodiscard]] inline MomentumGrid oracle_grid(double lobe_min, double lobe_max, double shift, double chirp,
                                              double density = 1.0) {
  return MomentumGrid::covering(lobe_min - shift - kGridMargin, lobe_max + shift + kGridMargin, chirp, density);
}

/// Builds the amplitude the scenario describes on a grid wide enough for
/// both recoil shifts.
[[nodiscard]] inline MomentumAmplitude scenario_amplitude(const DimensionlessScenario& s, double density = 1.0,
                                                          AmplitudeProvenance comb = AmplitudeProvenance::modulated) {
  const auto rc = detail::recoil_from(s.small_ratios);
  const double shift = std::max(rc.shift_e, rc.shift_a);
  if (!s.modulation) {
    return gaussian_amplitude(s.chirp, oracle_grid(0.0, 0.0, shift, s.chirp, density));
  }
  const auto& mod = *s.modulation;
  const int band = bessel_row(2.0 * mod.g_mag).order_max;
  const double reach = 2.0 * mod.r * band;
  auto grid = oracle_grid(-reach, reach, shift, s.chirp, density);
  return MomentumAmplitude(comb, s.chirp, mod.g_mag, mod.r, std::move(grid));
}

[[nodiscard]] inline EmissionResult oracle_emission(const MomentumAmplitude& amp, const DimensionlessScenario& s,
                                                    const PhotonFieldState& state) {
  const OracleAngles angles{s.theta, s.eps, s.phi0};
  return {first_order_quadrature(amp, s.small_ratios, angles, s.ups, state),
          second_order_quadrature(amp, s.small_ratios, angles, s.ups, state)};
}

[[nodiscard]] inline EmissionResult oracle_emission(const DimensionlessScenario& s, const PhotonFieldState& state,
                                                    double density = 1.0) {
  return oracle_emission(scenario_amplitude(s, density), s, state);
}

}  // namespace fewave
