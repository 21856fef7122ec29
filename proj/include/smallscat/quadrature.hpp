#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace smallscat {

/// Gauss–Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(static_cast<size_t>(n)), weights(static_cast<size_t>(n)) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: need at least one node");
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
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
      // Recompute the derivative at the converged node.
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes[static_cast<size_t>(i)] = -x;
      nodes[static_cast<size_t>(n - 1 - i)] = x;
      weights[static_cast<size_t>(i)] = w;
      weights[static_cast<size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) nodes[static_cast<size_t>(n / 2)] = 0.0;
  }

  int size() const { return static_cast<int>(nodes.size()); }

  /// Integrates f over [a, b].
  template <class F>
  auto integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    using R = decltype(f(mid));
    R acc{};
    for (size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mid + half * nodes[i]);
    return acc * half;
  }
};

/// Process-wide cache of Gauss–Legendre rules, safe for concurrent use.
inline const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(n);
  return *slot;
}

/// Composite Gauss–Legendre rule: equal panels of `panel_order` nodes on [a, b].
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int panel_order = 0;
  int panels = 0;
  double a = 0.0;
  double b = 0.0;

  double panel_lower(int p) const { return a + (b - a) * p / panels; }
  double panel_upper(int p) const { return a + (b - a) * (p + 1) / panels; }
};

inline CompositeRule composite_gauss_legendre(double a, double b, int panels, int panel_order) {
  if (panels < 1 || panel_order < 1) throw std::invalid_argument("composite rule: empty");
  const auto& gl = gauss_legendre(panel_order);
  CompositeRule rule;
  rule.panel_order = panel_order;
  rule.panels = panels;
  rule.a = a;
  rule.b = b;
  rule.nodes.reserve(static_cast<size_t>(panels * panel_order));
  rule.weights.reserve(rule.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const double lo = rule.panel_lower(p);
    const double hi = rule.panel_upper(p);
    const double half = 0.5 * (hi - lo);
    for (int k = 0; k < panel_order; ++k) {
      rule.nodes.push_back(0.5 * (lo + hi) + half * gl.nodes[static_cast<size_t>(k)]);
      rule.weights.push_back(half * gl.weights[static_cast<size_t>(k)]);
    }
  }
  return rule;
}

/// (e^z - 1) / z, accurate near z = 0.
inline std::complex<double> phi1(std::complex<double> z) {
  if (std::abs(z) < 1e-2) {
    // Six-term Taylor expansion; truncation error below 1e-16 for |z| < 1e-2.
    std::complex<double> term = 1.0;
    std::complex<double> sum = 1.0;
    for (int k = 2; k <= 7; ++k) {
      term *= z / static_cast<double>(k);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

/// sinh(z) / z, accurate near z = 0.
inline std::complex<double> sinhc(std::complex<double> z) {
  if (std::abs(z) < 1e-2) {
    const auto z2 = z * z;
    return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0));
  }
  return std::sinh(z) / z;
}

}  // namespace smallscat
