#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace smallscat {

/// Real orthonormal spherical harmonics Y_lm on S^2 (no Condon–Shortley phase).
///
/// Index layout: Y_lm lives at l*l + l + m, for 0 <= l <= degree, -l <= m <= l.
/// m > 0 carries sqrt(2) P_l^m cos(m phi), m < 0 carries sqrt(2) P_l^|m| sin(|m| phi).
class RealSphericalHarmonics {
 public:
  explicit RealSphericalHarmonics(int degree) : degree_(degree) {
    const int n = degree + 1;
    a_.assign(static_cast<size_t>(n * n), 0.0);
    b_.assign(static_cast<size_t>(n * n), 0.0);
    diag_.assign(static_cast<size_t>(n), 0.0);
    for (int m = 1; m <= degree; ++m) diag_[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    for (int m = 0; m <= degree; ++m) {
      for (int l = m + 2; l <= degree; ++l) {
        const double l2 = static_cast<double>(l) * l;
        const double m2 = static_cast<double>(m) * m;
        a_[idx(l, m)] = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
        b_[idx(l, m)] = std::sqrt(((l - 1.0) * (l - 1.0) - m2) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      }
    }
  }

  int degree() const { return degree_; }
  int count() const { return (degree_ + 1) * (degree_ + 1); }
  static int index(int l, int m) { return l * l + l + m; }

  /// Normalized associated Legendre values Pbar_l^m(cos theta), layout idx(l, m).
  void legendre(double cos_t, double sin_t, std::span<double> out) const {
    const int L = degree_;
    double pmm = 0.5 / std::sqrt(std::numbers::pi);
    for (int m = 0; m <= L; ++m) {
      if (m > 0) pmm *= diag_[m] * sin_t;
      out[idx(m, m)] = pmm;
      if (m + 1 <= L) {
        out[idx(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * cos_t * pmm;
      }
      for (int l = m + 2; l <= L; ++l) {
        out[idx(l, m)] = a_[idx(l, m)] * (cos_t * out[idx(l - 1, m)] - b_[idx(l, m)] * out[idx(l - 2, m)]);
      }
    }
  }

  /// All Y_lm at the unit direction (x, y, z).
  void evaluate(double x, double y, double z, std::span<double> out, std::vector<double>& scratch) const {
    const double sin_t = std::hypot(x, y);
    const double cos_t = z;
    double cphi = 1.0;
    double sphi = 0.0;
    if (sin_t > 0.0) {
      cphi = x / sin_t;
      sphi = y / sin_t;
    }
    scratch.resize(static_cast<size_t>((degree_ + 1) * (degree_ + 1)));
    legendre(cos_t, sin_t, scratch);
    accumulate(scratch, cphi, sphi, 1.0, out, false);
  }

  /// out += weight * Y_lm(x, y, z); `scratch` avoids reallocation in hot loops.
  void accumulate(double x, double y, double z, double weight, std::span<double> out,
                  std::vector<double>& scratch) const {
    const double sin_t = std::hypot(x, y);
    double cphi = 1.0;
    double sphi = 0.0;
    if (sin_t > 0.0) {
      cphi = x / sin_t;
      sphi = y / sin_t;
    }
    scratch.resize(static_cast<size_t>((degree_ + 1) * (degree_ + 1)));
    legendre(z, sin_t, scratch);
    accumulate(scratch, cphi, sphi, weight, out, true);
  }

  /// Values with angular derivatives: dY/dtheta and (1/sin theta) dY/dphi.
  /// Requires sin theta > 0.
  void evaluate_with_gradient(double theta, double phi, std::span<double> value, std::span<double> d_theta,
                              std::span<double> d_phi_over_sin) const {
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    std::vector<double> p(static_cast<size_t>((degree_ + 1) * (degree_ + 1)));
    legendre(cos_t, sin_t, p);
    for (int l = 0; l <= degree_; ++l) {
      for (int m = 0; m <= l; ++m) {
        const double plm = p[idx(l, m)];
        const double plm1 = (l - 1 >= m) ? p[idx(l - 1, m)] : 0.0;
        const double dp =
            (l * cos_t * plm - std::sqrt((2.0 * l + 1.0) * (l * l - m * m) / (2.0 * l - 1.0)) * plm1) / sin_t;
        if (m == 0) {
          value[index(l, 0)] = plm;
          d_theta[index(l, 0)] = dp;
          d_phi_over_sin[index(l, 0)] = 0.0;
        } else {
          const double c = std::cos(m * phi);
          const double s = std::sin(m * phi);
          const double r2 = std::numbers::sqrt2;
          value[index(l, m)] = r2 * plm * c;
          value[index(l, -m)] = r2 * plm * s;
          d_theta[index(l, m)] = r2 * dp * c;
          d_theta[index(l, -m)] = r2 * dp * s;
          d_phi_over_sin[index(l, m)] = -r2 * m * plm / sin_t * s;
          d_phi_over_sin[index(l, -m)] = r2 * m * plm / sin_t * c;
        }
      }
    }
  }

 private:
  size_t idx(int l, int m) const { return static_cast<size_t>(l * (degree_ + 1) + m); }

  void accumulate(const std::vector<double>& p, double cphi, double sphi, double weight, std::span<double> out,
                  bool add) const {
    // cos(m phi), sin(m phi) by the angle-addition recurrence.
    double cm = 1.0;
    double sm = 0.0;
    const double r2w = std::numbers::sqrt2 * weight;
    for (int m = 0; m <= degree_; ++m) {
      if (m == 0) {
        for (int l = 0; l <= degree_; ++l) {
          const double v = weight * p[idx(l, 0)];
          if (add) out[index(l, 0)] += v; else out[index(l, 0)] = v;
        }
      } else {
        const double cw = r2w * cm;
        const double sw = r2w * sm;
        for (int l = m; l <= degree_; ++l) {
          const double plm = p[idx(l, m)];
          if (add) {
            out[index(l, m)] += cw * plm;
            out[index(l, -m)] += sw * plm;
          } else {
            out[index(l, m)] = cw * plm;
            out[index(l, -m)] = sw * plm;
          }
        }
      }
      const double cn = cm * cphi - sm * sphi;
      sm = sm * cphi + cm * sphi;
      cm = cn;
    }
  }

  int degree_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> diag_;
};

}  // namespace smallscat
