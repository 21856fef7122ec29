#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "smallscat/metrics.hpp"
#include "smallscat/sphere_oracle.hpp"

using namespace smallscat;

namespace {
const ShellPulse kPulse;
}

TEST(SphereOracle, BoundaryConditionHolds) {
  const SphereScenario scn(0.1, kPulse);
  for (double t = 0.0; t < 6.0; t += 0.13) EXPECT_EQ(sphere_scattered_time(scn, t, 0.1), -incident_time(kPulse, t, 0.1));
}

TEST(SphereOracle, CausalityAndExtinction) {
  const double eps = 0.16;
  const SphereScenario scn(eps, kPulse);
  for (double r : {0.5, 2.0, 3.7}) {
    for (double t = 0.0; t < (r - eps) + (1.5 - eps) - 1e-9; t += 0.05) EXPECT_EQ(sphere_scattered_time(scn, t, r), 0.0);
    for (double t = (r - eps) + (3.5 + eps) + 1e-9; t < 20.0; t += 0.11) EXPECT_EQ(sphere_scattered_time(scn, t, r), 0.0);
  }
}

TEST(SphereOracle, SolvesRadialWaveEquation) {
  const SphereScenario scn(0.1, kPulse);
  auto u = [&](double t, double r) { return sphere_scattered_time(scn, t, r); };
  for (auto [t, r] : {std::pair{4.0, 2.5}, std::pair{5.1, 3.0}, std::pair{3.3, 1.0}}) {
    double prev = 0.0;
    for (double h : {4e-3, 2e-3}) {
      const double utt = (u(t + h, r) - 2 * u(t, r) + u(t - h, r)) / (h * h);
      const double rurr = ((r + h) * u(t, r + h) - 2 * r * u(t, r) + (r - h) * u(t, r - h)) / (h * h);
      const double res = std::abs(utt - rurr / r);
      EXPECT_LT(res, 1e-4);
      if (prev > 1e-9) {
        EXPECT_GT(prev / std::max(res, 1e-300), 3.0);
      }
      prev = res;
    }
  }
}

TEST(SphereOracle, LaplaceTransformMatchesFrequencyForm) {
  const SphereScenario scn(0.1, kPulse);
  const double r = 2.5;
  auto f = [&](double t) { return sphere_scattered_time(scn, t, r); };
  const double lag = r - 0.1;
  for (cd s : {cd(1.0), cd(0.5, 3.0)}) {
    const cd ref = oracle::laplace_transform(f, s, lag + 3.6, {lag + 1.4, lag + 1.6, lag + 3.4});
    const cd got = sphere_scattered_frequency(scn, s, r);
    EXPECT_LT(std::abs(got - ref), 1e-8 * std::abs(ref));
  }
}

TEST(SphereOracle, StaticFormula) {
  const SphereScenario scn(0.1, kPulse);
  EXPECT_EQ(sphere_scattered_frequency(scn, 0.0, 2.0), -(0.1 / 2.0) * incident_laplace(kPulse, 0.0, 0.1));
}

TEST(SphereOracle, RejectsInvalidScenarios) {
  EXPECT_THROW(SphereScenario(1.6, kPulse), ConfigError);
  EXPECT_THROW(SphereScenario(0.1, kPulse.recentred(Vec3(0.1, 0, 0))), ConfigError);
  const SphereScenario scn(0.1, kPulse);
  EXPECT_THROW(sphere_scattered_time(scn, 1.0, 0.05), EvaluationError);
}

TEST(SphereOracle, ModelErrorScalesQuadratically) {
  // closed-form u_app with c = 4 pi eps against the exact sphere field, L^2 over the far-field shell
  const ShellRule rule = shell_quadrature({2.0, 4.0}, 24, 2);
  std::vector<double> eps = {0.02, 0.04, 0.08, 0.16}, err;
  const double t0 = 5.5;
  for (double e : eps) {
    const SphereScenario scn(e, kPulse);
    Eigen::VectorXd d(rule.size());
    for (size_t i = 0; i < rule.size(); ++i) {
      const double r = rule.points[i].norm();
      const double app = -(e / r) * incident_time(kPulse, t0 - r, 0.0);
      d[i] = app - sphere_scattered_time(scn, t0, r);
    }
    err.push_back(shell_l2_norm(rule, d));
  }
  const auto fit = fit_power_law(eps, err);
  EXPECT_NEAR(fit.slope, 2.0, 0.15);
  EXPECT_LT(fit.max_residual, 0.05);
}
