#pragma once

// Special functions shared by the closed-form engine and the oracle:
// the unnormalized sinc lineshape and rows of integer-order Bessel
// functions J_n(x) with an explicit truncation bound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fewave {

/// sin(x)/x, with a Taylor branch near the removable singularity.
/// Evaluated on |x| so that sinc(x) and sinc(-x) are bit-identical.
[[nodiscard]] inline double sinc(double x) noexcept {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = ax * ax;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(ax) / ax;
}

/// J_n(x) for n in [-order_max, order_max].
///
/// `tail_bound` bounds |J_n(x)| for every |n| > order_max. It comes from
/// |J_n(x)| <= (x/2)^n / n!, which is decreasing in n once n + 1 > x/2.
struct BesselRow {
  double argument = 0.0;
  int order_max = 0;
  std::vector<double> values;  // values[n + order_max]
  double tail_bound = 0.0;

  [[nodiscard]] int order_min() const noexcept { return -order_max; }

  /// J_n(x); zero outside the band.
  [[nodiscard]] double operator()(int n) const noexcept {
    if (n < -order_max || n > order_max) return 0.0;
    return values[static_cast<std::size_t>(n + order_max)];
  }
};

namespace detail {

// log of (x/2)^n / n!, the power-series bound on |J_n(x)|.
inline double log_bessel_bound(double x, int n) {
  return n * std::log(x / 2.0) - std::lgamma(n + 1.0);
}

inline constexpr double kBesselTailTarget = 1e-16;

}  // namespace detail

/// Row of J_n(x) by Miller's downward recurrence, normalized with
/// J_0 + 2 * sum_k J_2k = 1. The band grows from `requested_band` until the
/// tail bound drops below 1e-16.
[[nodiscard]] inline BesselRow bessel_row(double x, int requested_band = 0) {
  if (!std::isfinite(x)) throw std::invalid_argument("bessel_row: argument must be finite");
  if (x < 0.0) throw std::invalid_argument("bessel_row: argument must be non-negative");
  if (requested_band < 0) throw std::invalid_argument("bessel_row: band must be non-negative");

  BesselRow row;
  row.argument = x;

  if (x == 0.0) {
    row.order_max = requested_band;
    row.values.assign(static_cast<std::size_t>(2 * requested_band + 1), 0.0);
    row.values[static_cast<std::size_t>(requested_band)] = 1.0;
    row.tail_bound = 0.0;
    return row;
  }

  int band = requested_band;
  const double log_target = std::log(detail::kBesselTailTarget);
  while (band + 1 < x / 2.0 || detail::log_bessel_bound(x, band + 1) >= log_target) ++band;
  row.order_max = band;
  row.tail_bound = std::exp(detail::log_bessel_bound(x, band + 1));

  // Start well above both the band and the usual Miller heuristic.
  const int heuristic = std::max(20, static_cast<int>(std::ceil(x + 10.0 * std::cbrt(x) + 12.0)));
  int start = std::max(heuristic, band + 20);
  if (start % 2 != 0) ++start;

  std::vector<double> f(static_cast<std::size_t>(start + 2), 0.0);
  f[static_cast<std::size_t>(start)] = 1e-30;
  for (int k = start; k >= 1; --k) {
    const auto ku = static_cast<std::size_t>(k);
    f[ku - 1] = (2.0 * k / x) * f[ku] - f[ku + 1];
    if (std::abs(f[ku - 1]) > 1e250) {
      for (std::size_t i = ku - 1; i <= static_cast<std::size_t>(start); ++i) f[i] *= 1e-250;
    }
  }
  double norm = f[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * f[static_cast<std::size_t>(k)];

  row.values.assign(static_cast<std::size_t>(2 * band + 1), 0.0);
  for (int n = 0; n <= band; ++n) {
    const double jn = f[static_cast<std::size_t>(n)] / norm;
    row.values[static_cast<std::size_t>(band + n)] = jn;
    row.values[static_cast<std::size_t>(band - n)] = (n % 2 == 0) ? jn : -jn;
  }
  return row;
}

}  // namespace fewave
