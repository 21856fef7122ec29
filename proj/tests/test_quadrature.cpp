#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "smallscat/quadrature.hpp"
#include "smallscat/spherical_harmonics.hpp"

using namespace smallscat;

TEST(GaussLegendre, ExactForDegreeTwoNMinusOne) {
  for (int n : {1, 2, 5, 12, 33}) {
    const auto& g = gauss_legendre(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      const double got = g.integrate([&](double x) { return std::pow(x, d); }, -1.0, 1.0);
      const double want = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(got, want, 1e-13) << "n=" << n << " d=" << d;
    }
  }
}

TEST(GaussLegendre, MatchesIndependentRule) {
  const auto ref = oracle::legendre(17);
  const auto& g = gauss_legendre(17);
  std::vector<double> a = ref.x;
  std::sort(a.begin(), a.end());
  for (int i = 0; i < 17; ++i) EXPECT_NEAR(g.nodes[i], a[i], 1e-15);
}

TEST(CompositeRule, IntegratesExponential) {
  const auto r = composite_gauss_legendre(0.0, 3.0, 5, 8);
  double acc = 0.0;
  for (size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * std::exp(r.nodes[i]);
  EXPECT_NEAR(acc, std::exp(3.0) - 1.0, 1e-12);
  EXPECT_EQ(r.nodes.size(), 40u);
  EXPECT_DOUBLE_EQ(r.panel_upper(4), 3.0);
}

TEST(Phi1, SmoothAcrossTaylorSwitch) {
  for (double m : {0.0, 1e-12, 1e-6, 0.0099, 0.0101, 0.5}) {
    for (std::complex<double> dir : {std::complex<double>(1, 0), std::complex<double>(0, 1), std::complex<double>(-0.6, 0.8)}) {
      const auto z = m * dir;
      // series to 30 terms as the reference
      std::complex<double> term = 1.0, sum = 1.0;
      for (int k = 2; k <= 30; ++k) {
        term *= z / static_cast<double>(k);
        sum += term;
      }
      EXPECT_LT(std::abs(phi1(z) - sum), 1e-14 * std::abs(sum));
    }
  }
}

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(SphericalHarmonics, ExplicitLowDegreeValues) {
  RealSphericalHarmonics Y(2);
  std::vector<double> v(9), scratch;
  const double th = 0.7, ph = 2.1;
  const double x = std::sin(th) * std::cos(ph), y = std::sin(th) * std::sin(ph), z = std::cos(th);
  Y.evaluate(x, y, z, v, scratch);
  EXPECT_NEAR(v[RealSphericalHarmonics::index(0, 0)], 0.5 / std::sqrt(kPi), 1e-15);
  EXPECT_NEAR(v[RealSphericalHarmonics::index(1, 0)], std::sqrt(3 / (4 * kPi)) * z, 1e-15);
  EXPECT_NEAR(v[RealSphericalHarmonics::index(1, 1)], std::sqrt(3 / (4 * kPi)) * x, 1e-15);
  EXPECT_NEAR(v[RealSphericalHarmonics::index(1, -1)], std::sqrt(3 / (4 * kPi)) * y, 1e-15);
  EXPECT_NEAR(v[RealSphericalHarmonics::index(2, 0)], std::sqrt(5 / (16 * kPi)) * (3 * z * z - 1), 1e-15);
  EXPECT_NEAR(v[RealSphericalHarmonics::index(2, 2)], std::sqrt(15 / (16 * kPi)) * (x * x - y * y), 1e-15);
  EXPECT_NEAR(v[RealSphericalHarmonics::index(2, -2)], std::sqrt(15 / (4 * kPi)) * x * y, 1e-15);
  EXPECT_NEAR(v[RealSphericalHarmonics::index(2, 1)], std::sqrt(15 / (4 * kPi)) * x * z, 1e-15);
}

TEST(SphericalHarmonics, DiscreteOrthonormality) {
  const int L = 9;
  RealSphericalHarmonics Y(L);
  const int n = Y.count();
  const auto g = oracle::legendre(L + 1);
  const int nphi = 2 * L + 2;
  std::vector<double> gram(n * n, 0.0), v(n), scratch;
  for (int i = 0; i <= L; ++i)
    for (int j = 0; j < nphi; ++j) {
      const double ct = g.x[i], st = std::sqrt(1 - ct * ct), ph = 2 * kPi * j / nphi;
      Y.evaluate(st * std::cos(ph), st * std::sin(ph), ct, v, scratch);
      const double w = g.w[i] * 2 * kPi / nphi;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) gram[a * n + b] += w * v[a] * v[b];
    }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) EXPECT_NEAR(gram[a * n + b], a == b ? 1.0 : 0.0, 1e-13);
}

TEST(SphericalHarmonics, AccumulateAddsWeightedValues) {
  RealSphericalHarmonics Y(5);
  std::vector<double> v(Y.count()), acc(Y.count(), 1.0), scratch;
  const double x = 0.36, y = -0.48, z = 0.8;
  Y.evaluate(x, y, z, v, scratch);
  Y.accumulate(x, y, z, 2.5, acc, scratch);
  for (int k = 0; k < Y.count(); ++k) EXPECT_NEAR(acc[k], 1.0 + 2.5 * v[k], 1e-14);
}

TEST(SphericalHarmonics, GradientMatchesFiniteDifferences) {
  RealSphericalHarmonics Y(6);
  const int n = Y.count();
  std::vector<double> v(n), dt(n), dp(n), vp(n), vm(n), d1(n), d2(n);
  const double th = 1.1, ph = -0.4, h = 1e-6;
  Y.evaluate_with_gradient(th, ph, v, dt, dp);
  Y.evaluate_with_gradient(th + h, ph, vp, d1, d2);
  Y.evaluate_with_gradient(th - h, ph, vm, d1, d2);
  for (int k = 0; k < n; ++k) EXPECT_NEAR(dt[k], (vp[k] - vm[k]) / (2 * h), 1e-7);
  Y.evaluate_with_gradient(th, ph + h, vp, d1, d2);
  Y.evaluate_with_gradient(th, ph - h, vm, d1, d2);
  for (int k = 0; k < n; ++k) EXPECT_NEAR(dp[k], (vp[k] - vm[k]) / (2 * h) / std::sin(th), 1e-7);
}
