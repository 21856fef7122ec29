#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smallscat/errors.hpp"
#include "smallscat/quadrature.hpp"
#include "smallscat/spherical_harmonics.hpp"

namespace smallscat {

using Vec3 = Eigen::Vector3d;

/// One term c * Y_lm of a radial function expansion.
struct HarmonicTerm {
  int l = 0;
  int m = 0;
  double c = 0.0;
};

/// Radius and its tangential gradient on S^2 at one direction.
struct RadialSample {
  double r = 0.0;
  Vec3 grad = Vec3::Zero();
};

/// Orthonormal frame (e1, e2, d) completing a unit vector d.
inline void complete_frame(const Vec3& d, Vec3& e1, Vec3& e2) {
  const Vec3 helper = std::abs(d.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = (helper - helper.dot(d) * d).normalized();
  e2 = d.cross(e1);
}

/// Star-shaped obstacle at unit scale: x = center + r(s) s for s on the unit sphere.
///
/// The radial function is either a constant (sphere) or base + sum_k c_k Y_{l_k m_k}(s)
/// using the real orthonormal harmonics of RealSphericalHarmonics.
class StarShape {
 public:
  static StarShape sphere(double radius = 1.0, const Vec3& center = Vec3::Zero()) {
    StarShape shape;
    shape.base_ = radius;
    shape.center_ = center;
    shape.validate();
    return shape;
  }

  static StarShape harmonics(double base, std::vector<HarmonicTerm> terms, const Vec3& center = Vec3::Zero()) {
    StarShape shape;
    shape.base_ = base;
    shape.terms_ = std::move(terms);
    shape.center_ = center;
    for (const auto& t : shape.terms_) {
      if (t.l < 0 || std::abs(t.m) > t.l) throw ShapeError("harmonic term with invalid (l, m)");
      shape.degree_ = std::max(shape.degree_, t.l);
    }
    if (!shape.terms_.empty()) shape.basis_ = std::make_shared<RealSphericalHarmonics>(shape.degree_);
    shape.validate();
    return shape;
  }

  /// Non-symmetric test obstacle shipped with the library (min r >= 0.5).
  static StarShape bumpy_sphere() {
    return harmonics(0.72, {{2, 0, 0.10}, {2, 1, 0.05}, {3, -2, 0.06}, {4, 3, 0.03}});
  }

  bool is_sphere() const { return terms_.empty(); }
  const Vec3& center() const { return center_; }
  double base_radius() const { return base_; }
  const std::vector<HarmonicTerm>& terms() const { return terms_; }

  /// r(s) and its surface gradient for a unit direction s.
  RadialSample radius(const Vec3& dir) const {
    RadialSample out;
    out.r = base_;
    if (terms_.empty()) return out;
    double x = dir.x();
    double y = dir.y();
    const double z = dir.z();
    double sin_t = std::hypot(x, y);
    if (sin_t < 1e-10) {
      // Pole of the coordinate chart: the gradient is continuous, sample just off it.
      x = 1e-10;
      sin_t = 1e-10;
    }
    const double theta = std::atan2(sin_t, z);
    const double phi = std::atan2(y, x);
    const int n = basis_->count();
    std::vector<double> value(static_cast<size_t>(n));
    std::vector<double> dth(static_cast<size_t>(n));
    std::vector<double> dph(static_cast<size_t>(n));
    basis_->evaluate_with_gradient(theta, phi, value, dth, dph);
    double r_t = 0.0;
    double r_p = 0.0;
    for (const auto& t : terms_) {
      const auto k = static_cast<size_t>(RealSphericalHarmonics::index(t.l, t.m));
      out.r += t.c * value[k];
      r_t += t.c * dth[k];
      r_p += t.c * dph[k];
    }
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const Vec3 e_theta(ct * cp, ct * sp, -st);
    const Vec3 e_phi(-sp, cp, 0.0);
    out.grad = r_t * e_theta + r_p * e_phi;
    return out;
  }

  /// Checks r > 0 and containment in the closed unit ball on a dense direction grid.
  void validate() const {
    if (!(base_ > 0.0) && terms_.empty()) throw ShapeError("sphere radius must be positive");
    const int nt = 48;
    const int np = 96;
    const auto& gl = gauss_legendre(nt);
    double r_min = std::numeric_limits<double>::infinity();
    double reach = 0.0;
    for (int i = 0; i < nt; ++i) {
      const double ct = gl.nodes[static_cast<size_t>(i)];
      const double st = std::sqrt(1.0 - ct * ct);
      for (int j = 0; j < np; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / np;
        const Vec3 dir(st * std::cos(phi), st * std::sin(phi), ct);
        const double r = radius(dir).r;
        r_min = std::min(r_min, r);
        reach = std::max(reach, (center_ + r * dir).norm());
      }
    }
    if (!(r_min > 0.0)) throw ShapeError("radial function is not strictly positive");
    if (reach > 1.0 + 1e-12) throw ShapeError("obstacle is not contained in the unit ball");
  }

 private:
  double base_ = 1.0;
  std::vector<HarmonicTerm> terms_;
  Vec3 center_ = Vec3::Zero();
  int degree_ = 0;
  std::shared_ptr<const RealSphericalHarmonics> basis_;
};

struct GridResolution {
  int n_theta = 20;
  int n_phi = 40;
};

/// Nyström nodes on Gamma^eps: Gauss–Legendre in cos(theta) times trapezoid in phi.
struct SurfaceGrid {
  StarShape shape;
  double epsilon = 1.0;
  GridResolution resolution;
  std::vector<Vec3> nodes;
  std::vector<double> weights;          // surface area weights on Gamma^eps
  std::vector<Vec3> normals;            // outward unit normals
  std::vector<Vec3> directions;         // parameter direction s of each node
  std::vector<double> sphere_weights;   // weights of the product rule on S^2
  double mesh_width = 0.0;

  size_t size() const { return nodes.size(); }
  double area() const {
    double a = 0.0;
    for (double w : weights) a += w;
    return a;
  }
};

/// Surface point, outward normal and area density (dGamma / dS^2) at unit scale.
struct SurfacePoint {
  Vec3 x;
  Vec3 normal;
  double jacobian;
};

inline SurfacePoint surface_point(const StarShape& shape, const Vec3& dir) {
  const auto rs = shape.radius(dir);
  const Vec3 n = rs.r * dir - rs.grad;
  const double len = n.norm();
  return {shape.center() + rs.r * dir, n / len, rs.r * len};
}

inline SurfaceGrid build_surface_grid(const StarShape& shape, double epsilon, int n_theta, int n_phi) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw GridError("epsilon must lie in (0, 1]");
  if (n_theta < 4 || n_phi < 4) throw GridError("surface grid needs at least 4 x 4 nodes");
  SurfaceGrid grid;
  grid.shape = shape;
  grid.epsilon = epsilon;
  grid.resolution = {n_theta, n_phi};
  const auto& gl = gauss_legendre(n_theta);
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  const double eps2 = epsilon * epsilon;
  double r_max = 0.0;
  const size_t n = static_cast<size_t>(n_theta) * static_cast<size_t>(n_phi);
  grid.nodes.reserve(n);
  grid.weights.reserve(n);
  grid.normals.reserve(n);
  grid.directions.reserve(n);
  grid.sphere_weights.reserve(n);
  for (int i = 0; i < n_theta; ++i) {
    const double ct = gl.nodes[static_cast<size_t>(i)];
    const double st = std::sqrt(1.0 - ct * ct);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = dphi * j;
      const Vec3 dir(st * std::cos(phi), st * std::sin(phi), ct);
      const auto sp = surface_point(shape, dir);
      const double w_sphere = gl.weights[static_cast<size_t>(i)] * dphi;
      if (!(sp.jacobian > 0.0)) throw ShapeError("non-positive radial function sample");
      grid.nodes.push_back(epsilon * sp.x);
      grid.weights.push_back(eps2 * (w_sphere * sp.jacobian));
      grid.normals.push_back(sp.normal);
      grid.directions.push_back(dir);
      grid.sphere_weights.push_back(w_sphere);
      r_max = std::max(r_max, (sp.x - shape.center()).norm());
    }
  }
  grid.mesh_width = epsilon * r_max * std::max(std::numbers::pi / n_theta, 2.0 * std::numbers::pi / n_phi);
  return grid;
}

/// Smooth cutoff chi_a(x) = chi(x / a): 1 on |x| < a, 0 on |x| >= 2a.
struct CutoffFunction {
  double a = 1.0;

  /// The fixed profile chi as a function of rho = |x|.
  static double profile(double rho) {
    if (rho <= 1.0) return 1.0;
    if (rho >= 2.0) return 0.0;
    const double t = 2.0 - rho;
    const double f = std::exp(-1.0 / t);
    const double g = std::exp(-1.0 / (1.0 - t));
    return f / (f + g);
  }

  double operator()(const Vec3& x) const { return profile(x.norm() / a); }
};

inline double evaluate_cutoff(const CutoffFunction& cut, const Vec3& x) { return cut(x); }

/// Spherical shell {inner < |x| < outer} centred at the origin.
struct ShellRegion {
  double inner = 2.0;
  double outer = 3.0;

  void validate() const {
    if (!(inner > 1.0) || !(outer >= inner)) throw ConfigError("shell region needs outer >= inner > 1");
  }
  double volume() const { return 4.0 * std::numbers::pi / 3.0 * (outer * outer * outer - inner * inner * inner); }
};

struct ShellRule {
  std::vector<Vec3> points;
  std::vector<double> weights;

  size_t size() const { return points.size(); }
  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Radial Gauss–Legendre times the angular product rule (n_ang x 2 n_ang).
inline ShellRule shell_quadrature(const ShellRegion& region, int n_r, int n_ang) {
  region.validate();
  ShellRule rule;
  if (region.outer == region.inner) return rule;
  if (n_r < 1 || n_ang < 1) throw ConfigError("shell quadrature needs positive counts");
  const auto& gr = gauss_legendre(n_r);
  const auto& ga = gauss_legendre(n_ang);
  const int n_phi = 2 * n_ang;
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  const double half = 0.5 * (region.outer - region.inner);
  const double mid = 0.5 * (region.outer + region.inner);
  for (int k = 0; k < n_r; ++k) {
    const double rho = mid + half * gr.nodes[static_cast<size_t>(k)];
    const double wr = half * gr.weights[static_cast<size_t>(k)] * rho * rho;
    for (int i = 0; i < n_ang; ++i) {
      const double ct = ga.nodes[static_cast<size_t>(i)];
      const double st = std::sqrt(1.0 - ct * ct);
      for (int j = 0; j < n_phi; ++j) {
        const double phi = dphi * j;
        rule.points.emplace_back(rho * st * std::cos(phi), rho * st * std::sin(phi), rho * ct);
        rule.weights.push_back(wr * ga.weights[static_cast<size_t>(i)] * dphi);
      }
    }
  }
  return rule;
}

}  // namespace smallscat
