#pragma once

// Composite Gauss-Legendre quadrature with a fixed reduction order.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fewave {

inline constexpr int kGaussOrder = 16;

struct GaussRule {
  std::array<double, kGaussOrder> nodes{};    // on [-1, 1], ascending
  std::array<double, kGaussOrder> weights{};
};

/// Order-16 Gauss-Legendre rule via Newton iteration on P_16.
[[nodiscard]] inline const GaussRule& gauss_legendre_16() {
  static const GaussRule rule = [] {
    GaussRule r;
    constexpr int n = kGaussOrder;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      // Legendre recursion once more at the converged root for the weight.
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
      r.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

/// Pairwise (cascade) sum; the split points depend only on the length.
template <class T>
[[nodiscard]] T pairwise_sum(std::span<const T> values) {
  if (values.empty()) return T{};
  if (values.size() <= 8) {
    T acc = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) acc += values[i];
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Equal-width panels over [lo, hi], 16 Gauss nodes each.
class CompositeRule {
 public:
  CompositeRule() = default;
  CompositeRule(double lo, double hi, std::size_t panels) : lo_(lo), hi_(hi), panels_(panels) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("CompositeRule: need finite lo < hi");
    if (panels == 0) throw std::invalid_argument("CompositeRule: need at least one panel");
    const auto& rule = gauss_legendre_16();
    const double h = (hi - lo) / static_cast<double>(panels);
    nodes_.reserve(panels * kGaussOrder);
    weights_.reserve(panels * kGaussOrder);
    for (std::size_t p = 0; p < panels; ++p) {
      const double a = lo + h * static_cast<double>(p);
      const double mid = a + 0.5 * h;
      for (int k = 0; k < kGaussOrder; ++k) {
        nodes_.push_back(mid + 0.5 * h * rule.nodes[static_cast<std::size_t>(k)]);
        weights_.push_back(0.5 * h * rule.weights[static_cast<std::size_t>(k)]);
      }
    }
  }

  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }
  [[nodiscard]] std::size_t panels() const noexcept { return panels_; }
  [[nodiscard]] double panel_width() const noexcept { return (hi_ - lo_) / static_cast<double>(panels_); }
  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

  /// Sum of w_i f(x_i): sequential inside a panel, pairwise across panels.
  template <class F>
  [[nodiscard]] auto integrate(F&& f) const {
    using T = decltype(f(0.0) * 1.0);
    std::vector<T> partial(panels_, T{});
    for (std::size_t p = 0; p < panels_; ++p) {
      T acc{};
      for (std::size_t k = p * kGaussOrder; k < (p + 1) * kGaussOrder; ++k) acc += f(nodes_[k]) * weights_[k];
      partial[p] = acc;
    }
    return pairwise_sum(std::span<const T>(partial));
  }

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::size_t panels_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace fewave
