#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <tuple>

#include <catch_amalgamated.hpp>

#include "fewave/emission.hpp"
#include "fewave/oracle.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace fewave;

namespace {

constexpr double kPi = std::numbers::pi;

SmallRatios tiny_ratios(double Gamma0, double rho) {
  const double rec = 2.0 * Gamma0 * rho;
  return SmallRatios{rec, rec, rho, rec / (2.0 * 1.391 * 1.391)};
}

}  // namespace

TEST_CASE("momentum grid covers the lobes and resolves the chirp") {
  const auto g = MomentumGrid::covering(-20.0, 20.0, 3.0);
  CHECK(g.u_min() == -20.0);
  CHECK(g.u_max() == 20.0);
  const auto nodes = g.nodes();
  CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  CHECK(std::adjacent_find(nodes.begin(), nodes.end()) == nodes.end());
  // Local period of C u^2 / 4 at the edge is 4 pi / (C |u|).
  const double period = 4.0 * kPi / (3.0 * 20.0);
  const double per_period = period / g.rule().panel_width() * kGaussOrder;
  CHECK(per_period >= 32.0);
  CHECK_THROWS_AS(MomentumGrid::covering(-1.0, 1.0, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("Gaussian amplitude") {
  SECTION("normalized, modulus independent of chirp") {
    for (double c : {0.0, 1.0, 3.0}) {
      const auto amp = gaussian_amplitude(c, oracle_grid(0.0, 0.0, 0.0, c));
      CHECK_THAT(amp.norm(), WithinAbs(1.0, 1e-12));
      for (double u : {-3.0, 0.0, 0.5, 2.0})
        CHECK_THAT(std::abs(amp(u)), WithinRel(std::pow(2.0 * kPi, -0.25) * std::exp(-u * u / 4.0), 1e-14));
    }
  }
  SECTION("chirp phase") {
    const auto amp = gaussian_amplitude(3.0, oracle_grid(0.0, 0.0, 0.0, 3.0));
    CHECK_THAT(std::arg(amp(2.0)), WithinAbs(-3.0, 1e-14));
    CHECK(amp.provenance() == AmplitudeProvenance::gaussian);
  }
  SECTION("cached values agree with pointwise evaluation") {
    const auto amp = gaussian_amplitude(1.0, oracle_grid(0.0, 0.0, 0.0, 1.0));
    const auto nodes = amp.grid().nodes();
    const auto vals = amp.values();
    REQUIRE(vals.size() == nodes.size());
    for (std::size_t i = 0; i < nodes.size(); i += 97) CHECK(vals[i] == amp(nodes[i]));
  }
  SECTION("too narrow a grid is refused") {
    CHECK_THROWS_AS(gaussian_amplitude(0.0, MomentumGrid::covering(-5.0, 5.0, 0.0)), std::invalid_argument);
  }
}

TEST_CASE("modulated amplitude") {
  SECTION("g = 0 equals the Gaussian") {
    const auto grid = oracle_grid(-5.0, 5.0, 0.0, 2.0);
    const auto m = modulated_amplitude(0.0, 0.5, 2.0, grid);
    const auto g = gaussian_amplitude(2.0, grid);
    for (double u : {-4.0, -1.0, 0.0, 0.7, 3.3}) CHECK(std::abs(m(u) - g(u)) <= 1e-16);
  }
  SECTION("normalization is the sum rule") {
    const double g = 1.0, r = 0.5;
    const int band = bessel_row(2.0 * g).order_max;
    const auto amp = modulated_amplitude(g, r, 0.0, oracle_grid(-2 * r * band, 2 * r * band, 0.0, 0.0));
    CHECK_THAT(amp.norm(), WithinAbs(1.0, 1e-10));
  }
  SECTION("separated teeth carry weights J_n(2)^2") {
    const double g = 1.0, r = 2.0;
    const int band = bessel_row(2.0).order_max;
    const auto amp = modulated_amplitude(g, r, 1.5, oracle_grid(-2 * r * band, 2 * r * band, 0.0, 1.5));
    const double peak = 1.0 / std::sqrt(2.0 * kPi);
    for (int n = -4; n <= 4; ++n) {
      const double j = std::cyl_bessel_j(std::abs(n), 2.0);
      // Tooth m leaks |J_m| exp(-(2 (n - m) r)^2 / 4) into this one.
      double leak = 1e-12;
      for (int m = -12; m <= 12; ++m)
        if (m != n) leak += std::abs(std::cyl_bessel_j(std::abs(m), 2.0)) * std::exp(-std::pow(2.0 * (n - m) * r, 2) / 4.0);
      CHECK_THAT(std::norm(amp(2.0 * n * r)), WithinAbs(peak * j * j, peak * (2.0 * std::abs(j) * leak + leak * leak)));
    }
  }
}

TEST_CASE("oracle matches the coherent Gaussian worked example") {
  const double Gamma = 1.0;
  const auto s = gaussian_scenario(0.05, 1.0, 0.0, 0.0, 0.0, Gamma, 0.0, tiny_ratios(Gamma, 1e-8));
  const auto o = oracle_emission(s, Coherent{1.0});
  CHECK_THAT(o.dnu1, WithinRel(0.2 * std::exp(-0.5), 1e-6));
  CHECK_THAT(o.dnu1, WithinAbs(0.121306, 5e-7));
}

TEST_CASE("oracle short-circuits states without coherence") {
  const auto s = gaussian_scenario(0.05, 2.0, 0.3, 0.05, 0.2, 1.0, 0.5, tiny_ratios(1.0, 1e-8));
  const auto amp = scenario_amplitude(s);
  const OracleAngles ang{s.theta, s.eps, s.phi0};
  CHECK(first_order_quadrature(amp, s.small_ratios, ang, s.ups, Fock{2}) == 0.0);
  CHECK(first_order_quadrature(amp, s.small_ratios, ang, s.ups, Vacuum{}) == 0.0);
  CHECK(first_order_quadrature(amp, s.small_ratios, ang, s.ups, Coherent{2.0}) != 0.0);
}

TEST_CASE("oracle vacuum emission matches the spontaneous closed form") {
  for (double theta : {0.0, 1.0, -3.0}) {
    const auto s = gaussian_scenario(0.05, 0.0, theta, 0.03, 0.0, 0.8, 1.0, tiny_ratios(0.8, 1e-8));
    const auto o = oracle_emission(s, Vacuum{});
    CHECK(o.dnu1 == 0.0);
    CHECK_THAT(o.dnu2, WithinRel(spontaneous(0.05, s.theta_e()), 1e-6));
  }
}

TEST_CASE("oracle second order carries the (sigma_p0/p0)^2 correction") {
  // With q_z = 0 and no recoil the weight is 1 + (sigma_p0/p0)^2 exactly. Below
  // sigma ~ 1e-4 the deviation drowns in rounding of the unit weight.
  for (double sig : {1e-4, 3e-4, 1e-3, 1e-2, 0.05}) {
    const auto s = gaussian_scenario(0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, SmallRatios{0.0, 0.0, sig, 0.0});
    const double dev = oracle_emission(s, Vacuum{}).dnu2 / spontaneous(0.05, 0.0) - 1.0;
    CHECK_THAT(dev, WithinRel(sig * sig, 1e-6));
  }
}

TEST_CASE("oracle second order agrees for comb and Gaussian amplitudes") {
  for (double g : {0.5, 1.0, 2.0}) {
    const auto ms = modulated_scenario(0.05, 3.0, 0.5, 0.05, 0.0, 2.0, ModulationParams{g, 0.5, 2.0},
                                       tiny_ratios(1.0, 1e-10));
    const auto gs = gaussian_scenario(0.05, 3.0, 0.5, 0.05, 0.0, 1.0, 2.0, ms.small_ratios);
    const double a = oracle_emission(ms, Coherent{3.0}).dnu2;
    const double b = oracle_emission(gs, Coherent{3.0}).dnu2;
    CHECK_THAT(a, WithinRel(b, 1e-8));
  }
}

TEST_CASE("oracle against the modulated closed form") {
  for (auto [g, r, c, w] : {std::tuple{0.75, 0.5, 3.0, 2.0}, std::tuple{1.0, 0.5, 1.0, 1.0},
                            std::tuple{2.0, 1.0, 5.0, 3.0}, std::tuple{1.0, 0.7, 0.0, 2.0}}) {
    for (double phi : {0.0, 1.0, 2.5}) {
      const auto s = modulated_scenario(0.05, 1.0, 0.4, 0.02, phi, c, ModulationParams{g, r, w},
                                        tiny_ratios(w * r, 1e-10));
      const auto closed = emit(s, Coherent{1.0});
      const auto oracle = oracle_emission(s, Coherent{1.0});
      const double scale = 4.0 * 0.05 * std::max(std::abs(bunching_B_ea(g, r, c, w).emission), 1e-6);
      CHECK(std::abs(closed.dnu1 - oracle.dnu1) <= 1e-4 * scale);
    }
  }
}

TEST_CASE("oracle overlap is the conjugate bunching parameter") {
  const double g = 1.0, r = 0.5, c = 1.0, w = 1.0;
  const auto s = modulated_scenario(0.05, 1.0, 0.0, 0.0, 0.0, c, ModulationParams{g, r, w}, tiny_ratios(w * r, 1e-12));
  const auto ov = recoil_overlaps(scenario_amplitude(s), s.small_ratios);
  const auto b = bunching_B_ea(g, r, c, w);
  CHECK(std::abs(ov.emission - std::conj(b.emission)) <= 1e-9);
  CHECK(std::abs(b.emission.imag()) > 0.1);
}

TEST_CASE("odd harmonics vanish in the oracle") {
  const double chirp = 0.125;
  const double r = 8.0 / std::sqrt(1.0 + chirp * chirp);
  auto dnu1 = [&](double w) {
    const auto s = modulated_scenario(0.05, 1.0, 0.0, 0.0, 0.0, chirp, ModulationParams{1.0, r, w},
                                      tiny_ratios(w * r, 1e-14));
    return oracle_emission(s, Coherent{1.0}).dnu1;
  };
  const double spot = std::abs(dnu1(2.0));
  CHECK(spot > 1e-4);
  CHECK(std::abs(dnu1(3.0)) <= 1e-10 * spot);
}

TEST_CASE("sum rule residual") {
  CHECK(sum_rule_residual(0.0, 0.7) == 0.0);
  CHECK(sum_rule_residual(2.0, 0.7) <= 1e-12);
  CHECK(sum_rule_residual(5.0, 0.1) <= 1e-12);
  CHECK_THROWS_AS(sum_rule_residual(-1.0, 0.5), std::invalid_argument);
}

TEST_CASE("Richardson: doubling the density changes little") {
  const auto s = modulated_scenario(0.05, 1.0, 0.4, 0.02, 0.7, 2.5, ModulationParams{1.0, 0.5, 2.0},
                                    tiny_ratios(1.0, 1e-10));
  const auto a = oracle_emission(s, Coherent{1.0}, 1.0);
  const auto b = oracle_emission(s, Coherent{1.0}, 2.0);
  CHECK(std::abs(a.dnu1 - b.dnu1) <= 1e-10 * std::abs(b.dnu1));
  CHECK(std::abs(a.dnu2 - b.dnu2) <= 1e-10 * std::abs(b.dnu2));
}

TEST_CASE("oracle input validation") {
  const auto amp = gaussian_amplitude(0.0, oracle_grid(0.0, 0.0, 0.0, 0.0));
  const OracleAngles ang{};
  CHECK_THROWS_AS(first_order_quadrature(amp, SmallRatios{}, ang, 0.05, Coherent{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(first_order_quadrature(amp, SmallRatios{1e-6, 0, 1e-6, -1.0}, ang, 0.05, Coherent{1.0}),
                  std::invalid_argument);
  // A recoil shift of 30 leaves the grid.
  CHECK_THROWS_AS(second_order_quadrature(amp, SmallRatios{3e-7, 0, 1e-8, 0}, ang, 0.05, Vacuum{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(first_order_quadrature(amp, SmallRatios{3e-7, 0, 1e-8, 0}, ang, 0.05, Coherent{1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MomentumAmplitude(AmplitudeProvenance::modulated, 0.0, 1.0, 0.0, oracle_grid(-10, 10, 0, 0)),
                  std::invalid_argument);
}

TEST_CASE("non-finite integrands are reported with the node") {
  const auto grid = MomentumGrid::covering(-1.0, 1.0, 0.0);
  CHECK_THROWS_WITH(detail::checked_integral<double>(grid, [](double u) { return u > 0.5 ? std::nan("") : 1.0; }, "probe"),
                    Catch::Matchers::ContainsSubstring("non-finite integrand at u ="));
}
