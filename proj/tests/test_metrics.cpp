#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "smallscat/metrics.hpp"

using namespace smallscat;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(ShellNorm, ConstantField) {
  const ShellRegion region{2.0, 4.0};
  const double n = shell_l2_norm([](const Vec3&) { return 3.0; }, region);
  EXPECT_NEAR(n, 3.0 * std::sqrt(region.volume()), 1e-12 * n);
}

TEST(ShellNorm, PolynomialField) {
  // int_{2<|x|<3} z^2 dx = (4 pi / 15)(3^5 - 2^5)
  const ShellRegion region{2.0, 3.0};
  const double want = std::sqrt(4.0 * kPi / 15.0 * (243.0 - 32.0));
  EXPECT_NEAR(shell_l2_norm([](const Vec3& x) { return x.z(); }, region), want, 1e-12 * want);
}

TEST(ShellNorm, SampledOverloadsAgree) {
  const auto rule = shell_quadrature({2.0, 4.0}, 10, 6);
  Eigen::VectorXd v(rule.size());
  std::vector<cd> c(rule.size());
  for (size_t i = 0; i < rule.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = std::sin(rule.points[i].x());
    c[i] = cd(0.0, v[static_cast<Eigen::Index>(i)]);
  }
  EXPECT_DOUBLE_EQ(shell_l2_norm(rule, v), shell_l2_norm(rule, c));
  EXPECT_THROW(shell_l2_norm(rule, Eigen::VectorXd(Eigen::VectorXd::Zero(3))), ConfigError);
}

TEST(LocalEnergy, LinearFieldInUnitShell) {
  // u = z, v = 0
  const ShellRegion region{1.5, 2.0};
  const double e = local_energy([](const Vec3&) { return Vec3(0, 0, 1); }, [](const Vec3&) { return 0.0; }, region);
  EXPECT_NEAR(e, 0.5 * region.volume(), 1e-12);
}

TEST(LocalEnergy, IncidentFieldHasLeftTheRegion) {
  const ShellPulse pulse;
  const ShellRegion region{2.0, 4.0};
  // at t = 8 the incoming shell has passed through the origin and sits beyond |x| = 4.5
  const double t = 8.0;
  const double e = local_energy(
      [&](const Vec3& x) {
        const double r = x.norm();
        return Vec3(incident_radial_derivative(pulse, t, r) * x / r);
      },
      [&](const Vec3& x) { return incident_velocity(pulse, t, x.norm()); }, region);
  EXPECT_EQ(e, 0.0);
}

TEST(PowerLaw, ExactData) {
  const auto fit = fit_power_law({0.1, 0.2, 0.4, 0.8}, {3e-2, 1.2e-1, 4.8e-1, 1.92});
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
  EXPECT_LT(fit.max_residual, 1e-12);
  EXPECT_TRUE((FitCriterion{2.0, 0.1, 0.05}.accepts(fit)));
  EXPECT_FALSE((FitCriterion{1.0, 0.1, 0.05}.accepts(fit)));
}

TEST(PowerLaw, RejectsBadInput) {
  EXPECT_THROW(fit_power_law({1.0, 2.0}, {1.0, 2.0}), ConfigError);
  EXPECT_THROW(fit_power_law({1.0, 2.0, 3.0}, {1.0, 0.0, 2.0}), ConfigError);
  EXPECT_THROW(fit_power_law({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), ConfigError);
  EXPECT_THROW(fit_power_law({1.0, 2.0, 3.0}, {1.0, 2.0}), ConfigError);
}

TEST(PowerLaw, ResidualGuardCatchesKink) {
  const auto fit = fit_power_law({0.01, 0.02, 0.04, 0.08}, {1e-4, 4e-4, 1.6e-3, 1e-1});
  EXPECT_FALSE((FitCriterion{fit.slope, 1.0, 0.05}.accepts(fit)));
}

TEST(ProjectionScaling, OffCentreDataRates) {
  const ShellPulse pulse = ShellPulse().recentred(Vec3(0.3, 0.2, -0.4));
  const auto r = check_projection_scaling(StarShape::bumpy_sphere(), pulse, cd(0.0, 1.0), {0.02, 0.04, 0.08, 0.16},
                                          {12, 24});
  EXPECT_NEAR(r.mean.slope, 1.0, 0.05);
  EXPECT_NEAR(r.fluctuation.slope, 2.0, 0.05);
}

TEST(ProjectionScaling, ConstantDataHasNoFluctuation) {
  // inside the hole a centred pulse gives a trace that is constant on a centred sphere
  const auto grid = build_surface_grid(StarShape::sphere(), 0.1, 8, 16);
  const auto split = boundary_projections(grid, incident_trace(ShellPulse(), cd(0.0, 2.0), grid));
  EXPECT_LT(surface_l2_norm(grid, split.fluctuation), 1e-14 * std::abs(split.mean));
}

TEST(DensityExpansion, FirstOrder) {
  const ShellPulse pulse = ShellPulse().recentred(Vec3(0.3, 0.2, -0.4));
  const auto fit = check_density_expansion(StarShape::bumpy_sphere(), pulse, cd(0.0, 1.0), {0.02, 0.04, 0.08, 0.16},
                                           {12, 24});
  EXPECT_NEAR(fit.slope, 1.0, 0.1);
}

TEST(Dilation, SphereAndBumpy) {
  const ShellPulse pulse;
  auto data = [&](const Vec3& y) { return incident_laplace_at(pulse, cd(0.0, 1.0), y); };
  const std::vector<Vec3> pts = {Vec3(0, 0, 2.5), Vec3(1.5, -1.0, 2.0)};
  EXPECT_LT(check_dilation_identity(StarShape::sphere(), 0.1, cd(0.0, 1.0), data, pts, {8, 16}), 1e-10);
  EXPECT_LT(check_dilation_identity(StarShape::bumpy_sphere(), 0.25, cd(0.0, 2.0), data, pts, {8, 16}), 1e-10);
}

TEST(KernelDifference, OffsetSphereStaticClosedForm) {
  // sigma^eps of a sphere of radius a centred at c generates eps a / |x - eps c| exactly at s = 0
  const double a = 0.6;
  const Vec3 c(0.2, -0.1, 0.15);
  const SingleLayerKernel unit(build_surface_grid(StarShape::sphere(a, c), 1.0, 12, 24));
  const auto cap = capacitance(unit);
  const auto rule = shell_quadrature({2.0, 4.0}, 6, 6);
  for (double eps : {0.05, 0.2}) {
    const auto k = unit.rescaled(eps);
    const auto got = kernel_difference_norm(k, scaled_equilibrium_density(cap, k.grid()), 0.0, rule);
    std::vector<cd> diff(rule.size());
    for (size_t i = 0; i < rule.size(); ++i) {
      const Vec3& x = rule.points[i];
      diff[i] = eps * a / (x - eps * c).norm() - eps * a / x.norm();
    }
    const double want = shell_l2_norm(rule, diff);
    EXPECT_NEAR(got, want, 1e-10 * want);
  }
}

TEST(KernelDifference, OffsetObstacleGivesSecondOrder) {
  const auto b = StarShape::bumpy_sphere();
  const auto shape = StarShape::harmonics(b.base_radius(), b.terms(), Vec3(0.12, 0.06, -0.09));
  const auto fit = check_kernel_difference(shape, {0.02, 0.04, 0.08, 0.16}, 0.0, {2.0, 4.0}, {12, 24});
  EXPECT_NEAR(fit.slope, 2.0, 0.02);
}

TEST(FitCsv, Layout) {
  const auto path = (std::filesystem::temp_directory_path() / "smallscat_fit_test.csv").string();
  FitRow row{"x", fit_power_law({1.0, 2.0, 4.0}, {1.0, 2.0, 4.0}), true};
  write_fit_csv(path, {row}, "note");
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "# note");
  std::getline(is, line);
  EXPECT_EQ(line, "check_name,slope,intercept,max_residual,pass");
  std::getline(is, line);
  EXPECT_EQ(line.rfind("x,1,", 0), 0u);
  EXPECT_EQ(line.back(), '1');
  std::filesystem::remove(path);
}
