#pragma once

#include <cmath>
#include <complex>

#include "smallscat/errors.hpp"
#include "smallscat/incident.hpp"

namespace smallscat {

/// Sound-soft sphere of radius eps at the origin, hit by origin-centred radial data.
struct SphereScenario {
  double epsilon = 0.1;
  ShellPulse pulse;

  SphereScenario() = default;
  SphereScenario(double eps, ShellPulse p) : epsilon(eps), pulse(std::move(p)) { validate(); }

  void validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("sphere radius must be positive");
    if (!(epsilon < pulse.r0())) throw ConfigError("sphere must lie inside the hole of the data shell");
    if (pulse.center().norm() != 0.0) throw ConfigError("sphere oracle needs origin-centred data");
  }
};

/// Outgoing monopole f(t - r) / r matching -u^inc on |x| = eps.
inline double sphere_scattered_time(const SphereScenario& scn, double t, double r) {
  if (r < scn.epsilon) throw EvaluationError("sphere oracle evaluated inside the obstacle");
  return -(scn.epsilon / r) * incident_time(scn.pulse, t - (r - scn.epsilon), scn.epsilon);
}

inline cd sphere_scattered_frequency(const SphereScenario& scn, cd s, double r) {
  if (r < scn.epsilon) throw EvaluationError("sphere oracle evaluated inside the obstacle");
  return -(scn.epsilon / r) * std::exp(-s * (r - scn.epsilon)) * incident_laplace(scn.pulse, s, scn.epsilon);
}

}  // namespace smallscat
