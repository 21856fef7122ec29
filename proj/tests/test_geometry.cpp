#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "smallscat/geometry.hpp"

using namespace smallscat;

namespace {
constexpr double kPi = std::numbers::pi;

// r(theta) = 0.8 + 0.1 Y20; area of the surface of revolution 2 pi int r sin(theta) sqrt(r^2 + r'^2).
double y20_area() {
  const double c = 0.1 * std::sqrt(5 / (16 * kPi));
  auto f = [&](double th) {
    const double ct = std::cos(th), st = std::sin(th);
    const double r = 0.8 + c * (3 * ct * ct - 1);
    const double dr = -6 * c * ct * st;
    return 2 * kPi * r * st * std::sqrt(r * r + dr * dr);
  };
  return oracle::integrate(f, 0.0, kPi, {}, 16, 20);
}
}  // namespace

TEST(SurfaceGrid, UnitSphereArea) {
  const auto g = build_surface_grid(StarShape::sphere(), 1.0, 16, 32);
  EXPECT_NEAR(g.area(), 4 * kPi, 1e-6);
  for (double w : g.weights) EXPECT_GT(w, 0.0);
  for (size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(g.normals[i].norm(), 1.0, 1e-12);
    EXPECT_NEAR((g.normals[i] - g.directions[i]).norm(), 0.0, 1e-12);
  }
}

TEST(SurfaceGrid, AreaScalesQuadratically) {
  const auto g = build_surface_grid(StarShape::sphere(), 0.1, 16, 32);
  EXPECT_NEAR(g.area(), 4 * kPi * 0.01, 1e-6);
}

TEST(SurfaceGrid, HarmonicPerturbationAreaConverges) {
  const auto shape = StarShape::harmonics(0.8, {{2, 0, 0.1}});
  const double coarse = build_surface_grid(shape, 1.0, 16, 32).area();
  const double fine = build_surface_grid(shape, 1.0, 32, 64).area();
  EXPECT_NEAR(coarse, fine, 1e-6);
  EXPECT_NEAR(fine, y20_area(), 1e-10);
}

TEST(SurfaceGrid, SelfConvergenceShrinks) {
  const auto shape = StarShape::bumpy_sphere();
  const double ref = build_surface_grid(shape, 1.0, 48, 96).area();
  double prev = 1.0;
  for (int n : {6, 10, 16, 24}) {
    const double err = std::abs(build_surface_grid(shape, 1.0, n, 2 * n).area() - ref);
    EXPECT_LT(err, prev);
    prev = std::max(err, 1e-15);
  }
  EXPECT_LT(prev, 1e-9);
}

TEST(SurfaceGrid, DilationIsExactScaling) {
  const auto shape = StarShape::bumpy_sphere();
  const double eps = 0.37;
  const auto a = build_surface_grid(shape, 1.0, 10, 20);
  const auto b = build_surface_grid(shape, eps, 10, 20);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(b.nodes[i], Vec3(eps * a.nodes[i]));
    EXPECT_NEAR(b.weights[i] / a.weights[i], eps * eps, 1e-15);
    EXPECT_EQ(b.normals[i], a.normals[i]);
  }
}

TEST(SurfaceGrid, NormalsMatchParameterTangents) {
  const auto shape = StarShape::bumpy_sphere();
  const auto g = build_surface_grid(shape, 1.0, 8, 16);
  const double h = 1e-6;
  for (size_t i = 0; i < g.size(); i += 7) {
    const Vec3 d = g.directions[i];
    const double th = std::acos(d.z()), ph = std::atan2(d.y(), d.x());
    auto X = [&](double t, double p) {
      const Vec3 s(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t));
      return Vec3(surface_point(shape, s).x);
    };
    const Vec3 xt = (X(th + h, ph) - X(th - h, ph)) / (2 * h);
    const Vec3 xp = (X(th, ph + h) - X(th, ph - h)) / (2 * h);
    const Vec3 n = xt.cross(xp).normalized();
    EXPECT_NEAR((n - g.normals[i]).norm(), 0.0, 1e-7);
    // area element: |x_theta x x_phi| = J sin(theta)
    EXPECT_NEAR(xt.cross(xp).norm(), surface_point(shape, d).jacobian * std::sin(th), 1e-7);
  }
}

TEST(StarShapeValidation, RejectsBadShapes) {
  EXPECT_THROW(StarShape::sphere(-1.0), ShapeError);
  EXPECT_THROW(StarShape::sphere(1.2), ShapeError);
  EXPECT_THROW(StarShape::sphere(0.8, Vec3(0.3, 0, 0)), ShapeError);
  EXPECT_THROW(StarShape::harmonics(0.2, {{1, 0, 1.0}}), ShapeError);
  EXPECT_THROW(StarShape::harmonics(0.5, {{1, 2, 0.1}}), ShapeError);
  EXPECT_NO_THROW(StarShape::bumpy_sphere());
}

TEST(StarShapeValidation, BumpyShapeStaysAboveHalf) {
  const auto g = build_surface_grid(StarShape::bumpy_sphere(), 1.0, 40, 80);
  double rmin = 1.0;
  for (const auto& x : g.nodes) rmin = std::min(rmin, x.norm());
  EXPECT_GE(rmin, 0.5);
}

TEST(SurfaceGrid, RejectsBadArguments) {
  EXPECT_THROW(build_surface_grid(StarShape::sphere(), 0.0, 8, 16), GridError);
  EXPECT_THROW(build_surface_grid(StarShape::sphere(), 1.5, 8, 16), GridError);
  EXPECT_THROW(build_surface_grid(StarShape::sphere(), 0.5, 3, 16), GridError);
}

TEST(Cutoff, PlateauSupportAndScaling) {
  CutoffFunction one{1.0};
  EXPECT_EQ(evaluate_cutoff(one, Vec3(0.5, 0, 0)), 1.0);
  EXPECT_EQ(evaluate_cutoff(one, Vec3(0, 2.5, 0)), 0.0);
  EXPECT_EQ(evaluate_cutoff(one, Vec3(0, 0, 2.0)), 0.0);
  CutoffFunction two{2.0};
  const double v = evaluate_cutoff(two, Vec3(0, 0, 3.0));
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
  EXPECT_EQ(v, CutoffFunction::profile(1.5));
}

TEST(Cutoff, MonotoneAndBounded) {
  double prev = 1.0;
  for (int k = 0; k <= 400; ++k) {
    const double v = CutoffFunction::profile(0.5 + 2.0 * k / 400);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(ShellQuadrature, VolumeAndDegenerateShell) {
  const auto rule = shell_quadrature({2.0, 3.0}, 8, 8);
  EXPECT_NEAR(rule.total_weight(), 4 * kPi / 3 * 19, 1e-8);
  EXPECT_NEAR(ShellRegion({2.0, 3.0}).volume(), 4 * kPi / 3 * 19, 1e-12);
  const auto empty = shell_quadrature({2.0, 2.0}, 8, 8);
  EXPECT_EQ(empty.size(), 0u);
  EXPECT_EQ(empty.total_weight(), 0.0);
  EXPECT_THROW(shell_quadrature({0.5, 3.0}, 8, 8), ConfigError);
  EXPECT_THROW(shell_quadrature({3.0, 2.0}, 8, 8), ConfigError);
}
