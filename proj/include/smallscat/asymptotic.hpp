#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "smallscat/bem.hpp"
#include "smallscat/errors.hpp"
#include "smallscat/incident.hpp"

namespace smallscat {

/// Monopole replacement of the obstacle: u_app = -c_eps u^inc(t - |x|, 0) / (4 pi |x|).
struct PointScattererModel {
  double c_eps = 0.0;
  ShellPulse pulse;

  PointScattererModel() = default;
  PointScattererModel(double c, ShellPulse p) : c_eps(c), pulse(std::move(p)) {
    if (!(c_eps > 0.0)) throw ConfigError("capacitance must be positive");
  }

  /// c^eps = eps c^1.
  static PointScattererModel from_capacitance(const CapacitanceResult& cap, double eps, const ShellPulse& p) {
    return PointScattererModel(eps * cap.c1, p);
  }
};

inline double point_scatterer_time(const PointScattererModel& model, double t, const Vec3& x) {
  const double r = x.norm();
  if (!(r > 0.0)) throw EvaluationError("point-scatterer model is singular at the origin");
  const double at_centre = incident_time(model.pulse, t - r, (model.pulse.center()).norm());
  return -model.c_eps * at_centre / (4.0 * std::numbers::pi * r);
}

inline cd point_scatterer_frequency(const PointScattererModel& model, cd s, const Vec3& x) {
  const double r = x.norm();
  if (!(r > 0.0)) throw EvaluationError("point-scatterer model is singular at the origin");
  return -model.c_eps * std::exp(-s * r) * incident_laplace(model.pulse, s, model.pulse.center().norm()) /
         (4.0 * std::numbers::pi * r);
}

/// (e^{-s|x|} / (4 pi |x|)) times the total charge of the density.
inline cd apply_S_app(const SurfaceGrid& grid, const BoundaryDensity& density, cd s, const Vec3& x) {
  if (density.size() != grid.size()) throw GridError("density length does not match the grid");
  const double r = x.norm();
  if (!(r > 0.0)) throw EvaluationError("approximate single layer is singular at the origin");
  cd total = 0.0;
  for (size_t j = 0; j < grid.size(); ++j) total += grid.weights[j] * density.values[static_cast<Eigen::Index>(j)];
  return std::exp(-s * r) / (4.0 * std::numbers::pi * r) * total;
}

/// sigma^eps(x) = sigma^1(x / eps) / eps on a grid built at scale eps with the unit grid's layout.
inline BoundaryDensity scaled_equilibrium_density(const CapacitanceResult& cap, const SurfaceGrid& grid) {
  if (cap.sigma1.size() != grid.size()) throw GridError("equilibrium density and grid differ in size");
  BoundaryDensity out;
  out.values = cap.sigma1.values / grid.epsilon;
  return out;
}

/// lambda_app = -sigma^eps u^inc(s, 0).
inline BoundaryDensity density_app(const SurfaceGrid& grid, const CapacitanceResult& cap, const ShellPulse& pulse,
                                   cd s) {
  auto out = scaled_equilibrium_density(cap, grid);
  out.values *= -incident_laplace(pulse, s, pulse.center().norm());
  return out;
}

}  // namespace smallscat
