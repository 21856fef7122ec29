#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "smallscat/errors.hpp"
#include "smallscat/geometry.hpp"
#include "smallscat/quadrature.hpp"

namespace smallscat {

using cd = std::complex<double>;

/// Radial initial data u0 = 0, v0(x) = psi(|x - center|) supported in the shell [r0, R0].
///
/// psi(rho) = A ((rho - r0)(R0 - rho))^(k_reg + 1) on [r0, R0] and zero outside, so psi is
/// C^k_reg on the real line. All polynomials are stored in the centred variable
/// x = rho - (r0 + R0)/2 to keep the expansion well conditioned.
class ShellPulse {
 public:
  ShellPulse() : ShellPulse(1.5, 3.5, 7, 1.0) {}

  /// `peak` is max psi; the prefactor A follows from it.
  ShellPulse(double r0, double R0, int k_reg, double peak, const Vec3& center = Vec3::Zero())
      : r0_(r0), R0_(R0), k_reg_(k_reg), peak_(peak), center_(center) {
    if (!(R0 > r0 && r0 > 1.0)) throw ConfigError("pulse shell needs R0 > r0 > 1");
    if (k_reg < 0) throw ConfigError("pulse regularity exponent must be >= 0");
    mid_ = 0.5 * (r0 + R0);
    half_ = 0.5 * (R0 - r0);
    const int n = k_reg + 1;
    prefactor_ = peak / std::pow(half_ * half_, n);
    // psi(x) = A (half^2 - x^2)^n
    psi_.assign(static_cast<size_t>(2 * n + 1), 0.0);
    double binom = 1.0;
    for (int j = 0; j <= n; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      psi_[static_cast<size_t>(2 * j)] = prefactor_ * binom * sign * std::pow(half_, 2.0 * (n - j));
      binom = binom * (n - j) / (j + 1);
    }
    // rho psi = (x + mid) psi
    h_.assign(psi_.size() + 1, 0.0);
    for (size_t k = 0; k < psi_.size(); ++k) {
      h_[k] += mid_ * psi_[k];
      h_[k + 1] += psi_[k];
    }
    // H(x) = int_{-half}^{x} h
    anti_.assign(h_.size() + 1, 0.0);
    for (size_t k = 0; k < h_.size(); ++k) anti_[k + 1] = h_[k] / static_cast<double>(k + 1);
    anti_[0] = -horner(anti_, -half_);
    total_ = horner(anti_, half_);
  }

  double r0() const { return r0_; }
  double R0() const { return R0_; }
  int k_reg() const { return k_reg_; }
  double peak() const { return peak_; }
  double prefactor() const { return prefactor_; }
  const Vec3& center() const { return center_; }

  ShellPulse scaled(double factor) const { return ShellPulse(r0_, R0_, k_reg_, peak_ * factor, center_); }
  ShellPulse recentred(const Vec3& c) const { return ShellPulse(r0_, R0_, k_reg_, peak_, c); }

  /// psi(rho)
  double profile(double rho) const {
    if (!(rho > r0_ && rho < R0_)) return 0.0;
    return horner(psi_, rho - mid_);
  }

  /// d^order psi / d rho^order (one-sided limits agree for order <= k_reg).
  double profile_derivative(double rho, int order) const {
    if (!(rho > r0_ && rho < R0_)) return 0.0;
    std::vector<double> c = psi_;
    for (int d = 0; d < order; ++d) {
      if (c.size() <= 1) return 0.0;
      for (size_t k = 1; k < c.size(); ++k) c[k - 1] = c[k] * static_cast<double>(k);
      c.pop_back();
    }
    return horner(c, rho - mid_);
  }

  /// h(rho) = rho psi(|rho|), the odd extension of rho psi.
  double h(double rho) const {
    const double a = std::abs(rho);
    if (!(a > r0_ && a < R0_)) return 0.0;
    const double v = horner(h_, a - mid_);
    return rho < 0.0 ? -v : v;
  }

  /// dh/drho (even in rho).
  double h_derivative(double rho) const {
    const double a = std::abs(rho);
    if (!(a > r0_ && a < R0_)) return 0.0;
    double acc = 0.0;
    const double x = a - mid_;
    for (size_t k = h_.size(); k-- > 1;) acc = acc * x + h_[k] * static_cast<double>(k);
    return acc;
  }

  /// H(y) = int_0^|y| rho psi(rho) d rho.
  double antiderivative(double y) const {
    const double a = std::abs(y);
    if (a <= r0_) return 0.0;
    if (a >= R0_) return total_;
    return horner(anti_, a - mid_);
  }

  /// int_{r0}^{R0} rho psi(rho) d rho
  double first_moment() const { return total_; }

 private:
  static double horner(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
    return acc;
  }

  double r0_;
  double R0_;
  int k_reg_;
  double peak_;
  Vec3 center_;
  double mid_ = 0.0;
  double half_ = 0.0;
  double prefactor_ = 0.0;
  double total_ = 0.0;
  std::vector<double> psi_;
  std::vector<double> h_;
  std::vector<double> anti_;
};

/// Incident field u^inc(t, r) at distance r from the pulse centre (Kirchhoff formula).
inline double incident_time(const ShellPulse& pulse, double t, double r) {
  if (t <= 0.0) return 0.0;
  if (r < 1e-8) return pulse.h(t);
  return (pulse.antiderivative(r + t) - pulse.antiderivative(r - t)) / (2.0 * r);
}

inline double incident_time_at(const ShellPulse& pulse, double t, const Vec3& x) {
  return incident_time(pulse, t, (x - pulse.center()).norm());
}

/// v^inc = d/dt u^inc at distance r.
inline double incident_velocity(const ShellPulse& pulse, double t, double r) {
  if (t <= 0.0) return 0.0;
  if (r < 1e-8) return pulse.h_derivative(t);
  return (pulse.h(r + t) + pulse.h(r - t)) / (2.0 * r);
}

/// d/dr u^inc at distance r.
inline double incident_radial_derivative(const ShellPulse& pulse, double t, double r) {
  if (t <= 0.0 || r < 1e-8) return 0.0;
  return (pulse.h(r + t) - pulse.h(r - t)) / (2.0 * r) - incident_time(pulse, t, r) / r;
}

/// Laplace-domain incident field u^inc(s, r) = (R_0(s) v0)(x) with |x - centre| = r.
///
/// Uses (e^{-s|r-rho|} - e^{-s(r+rho)}) / (2 s r) = e^{-s|r-rho|} (m/r) phi1(-2 s m), m = min(r, rho),
/// which is uniform in s (including s = 0) and in r (including r = 0).
inline cd incident_laplace(const ShellPulse& pulse, cd s, double r) {
  const double a = pulse.r0();
  const double b = pulse.R0();
  auto integrand = [&](double rho) -> cd {
    const double m = std::min(r, rho);
    const double ratio = (r <= rho) ? 1.0 : rho / r;
    return rho * pulse.profile(rho) * std::exp(-s * std::abs(r - rho)) * ratio * phi1(-2.0 * s * m);
  };
  auto panel_rule = [&](double lo, double hi) -> const GaussLegendre& {
    const double phase = std::abs(s) * 0.5 * (hi - lo);
    const int n = 32 + 8 * static_cast<int>(std::ceil(phase / 4.0));
    return gauss_legendre(std::min(n, 512));
  };
  if (r > a && r < b) {
    return panel_rule(a, r).integrate(integrand, a, r) + panel_rule(r, b).integrate(integrand, r, b);
  }
  return panel_rule(a, b).integrate(integrand, a, b);
}

inline cd incident_laplace_at(const ShellPulse& pulse, cd s, const Vec3& x) {
  return incident_laplace(pulse, s, (x - pulse.center()).norm());
}

/// Complex values attached to the nodes of a SurfaceGrid.
struct BoundaryDensity {
  Eigen::VectorXcd values;

  size_t size() const { return static_cast<size_t>(values.size()); }
};

/// Trace of u^inc(s, .) on the grid nodes.
inline BoundaryDensity incident_trace(const ShellPulse& pulse, cd s, const SurfaceGrid& grid) {
  BoundaryDensity out;
  out.values.resize(static_cast<Eigen::Index>(grid.size()));
  for (size_t j = 0; j < grid.size(); ++j) {
    const double r = (grid.nodes[j] - pulse.center()).norm();
    if (r >= pulse.r0()) throw ConfigError("obstacle intersects the support of the initial data");
    out.values[static_cast<Eigen::Index>(j)] = incident_laplace(pulse, s, r);
  }
  return out;
}

struct IncidentBound {
  double sup_value = 0.0;
  double sup_gradient = 0.0;
};

/// Suprema of |u^inc(s)| and |grad u^inc(s)| over the ball B_eps(0), by dense radial sampling.
///
/// Inside the hole of the shell, u^inc(s, r) = u^inc(s, 0) sinh(s r) / (s r), which gives the
/// radial derivative in closed form.
inline IncidentBound incident_gradient_bound(const ShellPulse& pulse, cd s, double eps, int samples = 257) {
  const double c = pulse.center().norm();
  const double lo = std::max(0.0, c - eps);
  const double hi = c + eps;
  if (hi >= pulse.r0()) throw ConfigError("ball B_eps reaches the support of the initial data");
  const cd at_centre = incident_laplace(pulse, s, 0.0);
  IncidentBound out;
  for (int k = 0; k < samples; ++k) {
    const double r = lo + (hi - lo) * k / (samples - 1);
    const cd z = s * r;
    out.sup_value = std::max(out.sup_value, std::abs(incident_laplace(pulse, s, r)));
    // d/dr sinh(sr)/(sr) = s (z cosh z - sinh z) / z^2
    cd dz;
    if (std::abs(z) < 1e-3) {
      dz = z / 3.0 + z * z * z / 30.0;
    } else {
      dz = (z * std::cosh(z) - std::sinh(z)) / (z * z);
    }
    out.sup_gradient = std::max(out.sup_gradient, std::abs(at_centre * s * dz));
  }
  return out;
}

struct EnergySeminorm {
  int k_reg = 0;
  double value = 0.0;
};

/// E0^k = (1/2) ||v0||^2_{H^k}, with the radial surrogate sum_{j<=k} int |psi^(j)|^2 4 pi rho^2 d rho.
inline EnergySeminorm energy_seminorm(const ShellPulse& pulse) {
  EnergySeminorm e;
  e.k_reg = pulse.k_reg();
  const auto& gl = gauss_legendre(64);
  double acc = 0.0;
  for (int j = 0; j <= pulse.k_reg(); ++j) {
    acc += gl.integrate(
        [&](double rho) {
          const double d = pulse.profile_derivative(rho, j);
          return d * d * 4.0 * std::numbers::pi * rho * rho;
        },
        pulse.r0(), pulse.R0());
  }
  e.value = 0.5 * acc;
  return e;
}

}  // namespace smallscat
