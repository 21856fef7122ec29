#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "smallscat/errors.hpp"
#include "smallscat/geometry.hpp"
#include "smallscat/hash.hpp"
#include "smallscat/incident.hpp"

namespace smallscat {

/// Settings of one experiment run. Text form: one `key = value` per line, `#` starts a comment.
struct ExperimentConfig {
  std::string shape_kind = "sphere";  // sphere | harmonics | bumpy
  double shape_radius = 1.0;          // sphere radius, or base radius for harmonics
  std::vector<HarmonicTerm> shape_terms;
  Vec3 shape_center = Vec3::Zero();

  double pulse_r0 = 1.5;
  double pulse_R0 = 3.5;
  int pulse_kreg = 7;
  double pulse_amplitude = 1.0;

  std::vector<double> eps = {0.02, 0.04, 0.08, 0.16};
  double ff_r = 2.0;
  double ff_R = 4.0;

  double omega_max = 40.0;
  int n_omega = 400;
  double t_max = 10.0;
  int n_t = 201;
  double t0 = 5.5;

  int n_theta = 20;
  int n_phi = 40;

  double oracle_eps = 0.1;
  double oracle_r = 2.5;

  // Scaling checks: data origin for the trace checks, obstacle offset for the kernel check.
  Vec3 checks_data_center = Vec3(0.3, 0.2, -0.4);
  Vec3 checks_shape_center = Vec3(0.12, 0.06, -0.09);

  std::string out = "out";
  int workers = 0;

  double t_star() const { return pulse_R0 + ff_R; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty() && std::isfinite(x)) return x;
  } catch (...) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

inline int to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (...) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

inline std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(to_double(key, item));
  }
  return out;
}

inline Vec3 to_vec3(const std::string& key, const std::string& v) {
  const auto xs = to_list(key, v);
  if (xs.size() != 3) throw ConfigError(key + ": expected three comma-separated numbers");
  return {xs[0], xs[1], xs[2]};
}

/// "(l, m, c), (l, m, c)"
inline std::vector<HarmonicTerm> to_terms(const std::string& key, const std::string& v) {
  std::vector<HarmonicTerm> out;
  size_t pos = 0;
  while (true) {
    const auto open = v.find('(', pos);
    if (open == std::string::npos) break;
    const auto close = v.find(')', open);
    if (close == std::string::npos) throw ConfigError(key + ": unbalanced parenthesis");
    const auto xs = to_list(key, v.substr(open + 1, close - open - 1));
    if (xs.size() != 3) throw ConfigError(key + ": each term needs (l, m, c)");
    if (xs[0] != std::floor(xs[0]) || xs[1] != std::floor(xs[1])) throw ConfigError(key + ": l and m must be integers");
    out.push_back({static_cast<int>(xs[0]), static_cast<int>(xs[1]), xs[2]});
    pos = close + 1;
  }
  if (trim(v).size() > 0 && out.empty()) throw ConfigError(key + ": no (l, m, c) terms found");
  return out;
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline std::string fmt(const Vec3& x) { return fmt(x.x()) + ", " + fmt(x.y()) + ", " + fmt(x.z()); }

}  // namespace detail

inline void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "shape") {
    if (value != "sphere" && value != "harmonics" && value != "bumpy")
      throw ConfigError("shape: expected sphere, harmonics or bumpy, got '" + value + "'");
    c.shape_kind = value;
  } else if (key == "shape.radius") {
    c.shape_radius = to_double(key, value);
  } else if (key == "shape.coefficients") {
    c.shape_terms = to_terms(key, value);
  } else if (key == "shape.center") {
    c.shape_center = to_vec3(key, value);
  } else if (key == "pulse.r0") {
    c.pulse_r0 = to_double(key, value);
  } else if (key == "pulse.R0") {
    c.pulse_R0 = to_double(key, value);
  } else if (key == "pulse.kreg") {
    c.pulse_kreg = to_int(key, value);
  } else if (key == "pulse.amplitude") {
    c.pulse_amplitude = to_double(key, value);
  } else if (key == "eps") {
    c.eps = to_list(key, value);
  } else if (key == "ff.r") {
    c.ff_r = to_double(key, value);
  } else if (key == "ff.R") {
    c.ff_R = to_double(key, value);
  } else if (key == "freq.omega_max") {
    c.omega_max = to_double(key, value);
  } else if (key == "freq.n") {
    c.n_omega = to_int(key, value);
  } else if (key == "time.t_max") {
    c.t_max = to_double(key, value);
  } else if (key == "time.n") {
    c.n_t = to_int(key, value);
  } else if (key == "time.t0") {
    c.t0 = to_double(key, value);
  } else if (key == "bem.ntheta") {
    c.n_theta = to_int(key, value);
  } else if (key == "bem.nphi") {
    c.n_phi = to_int(key, value);
  } else if (key == "oracle.eps") {
    c.oracle_eps = to_double(key, value);
  } else if (key == "oracle.r") {
    c.oracle_r = to_double(key, value);
  } else if (key == "checks.data_center") {
    c.checks_data_center = to_vec3(key, value);
  } else if (key == "checks.shape_center") {
    c.checks_shape_center = to_vec3(key, value);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "workers") {
    c.workers = to_int(key, value);
  } else {
    throw ConfigError(key + ": unknown key");
  }
}

/// Throws ConfigError naming the first offending key.
inline void validate(const ExperimentConfig& c) {
  if (c.eps.empty()) throw ConfigError("eps: list is empty");
  for (double e : c.eps)
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("eps: values must lie in (0, 1]");
  if (!(c.pulse_r0 > 1.0)) throw ConfigError("pulse.r0: must exceed 1");
  if (!(c.pulse_R0 > c.pulse_r0)) throw ConfigError("pulse.R0: must exceed pulse.r0");
  if (c.pulse_kreg < 0) throw ConfigError("pulse.kreg: must be >= 0");
  if (!(c.ff_r > 1.0)) throw ConfigError("ff.r: must exceed 1");
  if (!(c.ff_R > c.ff_r)) throw ConfigError("ff.R: must exceed ff.r");
  const double max_eps = *std::max_element(c.eps.begin(), c.eps.end());
  if (!(max_eps < std::min(c.pulse_r0, c.ff_r) / 4.0)) throw ConfigError("eps: max eps must be below min(pulse.r0, ff.r) / 4");
  if (!(c.omega_max > 0.0)) throw ConfigError("freq.omega_max: must be positive");
  if (c.n_omega < 8 || c.n_omega % 8 != 0) throw ConfigError("freq.n: must be a positive multiple of 8");
  if (!(c.t_max > 0.0)) throw ConfigError("time.t_max: must be positive");
  if (c.n_t < 2) throw ConfigError("time.n: must be at least 2");
  if (!(c.t0 > 0.0 && c.t0 <= c.t_max)) throw ConfigError("time.t0: must lie in (0, time.t_max]");
  if (c.n_theta < 4) throw ConfigError("bem.ntheta: must be at least 4");
  if (c.n_phi < 4) throw ConfigError("bem.nphi: must be at least 4");
  if (!(c.oracle_eps > 0.0 && c.oracle_eps < c.pulse_r0)) throw ConfigError("oracle.eps: must lie in (0, pulse.r0)");
  if (!(c.oracle_r > c.oracle_eps)) throw ConfigError("oracle.r: must exceed oracle.eps");
  if (c.workers < 0) throw ConfigError("workers: must be >= 0");
  if (c.shape_kind == "harmonics" && c.shape_terms.empty()) throw ConfigError("shape.coefficients: required for harmonics");
  if (!(c.shape_radius > 0.0)) throw ConfigError("shape.radius: must be positive");
}

inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

/// Canonical text form; parse_config(serialize(c)) reproduces c.
inline std::string serialize(const ExperimentConfig& c) {
  using detail::fmt;
  std::ostringstream os;
  os << "shape = " << c.shape_kind << '\n';
  os << "shape.radius = " << fmt(c.shape_radius) << '\n';
  if (!c.shape_terms.empty()) {
    os << "shape.coefficients = ";
    for (size_t i = 0; i < c.shape_terms.size(); ++i) {
      const auto& t = c.shape_terms[i];
      os << (i ? ", " : "") << '(' << t.l << ", " << t.m << ", " << fmt(t.c) << ')';
    }
    os << '\n';
  }
  os << "shape.center = " << fmt(c.shape_center) << '\n';
  os << "pulse.r0 = " << fmt(c.pulse_r0) << '\n';
  os << "pulse.R0 = " << fmt(c.pulse_R0) << '\n';
  os << "pulse.kreg = " << c.pulse_kreg << '\n';
  os << "pulse.amplitude = " << fmt(c.pulse_amplitude) << '\n';
  os << "eps = ";
  for (size_t i = 0; i < c.eps.size(); ++i) os << (i ? ", " : "") << fmt(c.eps[i]);
  os << '\n';
  os << "ff.r = " << fmt(c.ff_r) << '\n';
  os << "ff.R = " << fmt(c.ff_R) << '\n';
  os << "freq.omega_max = " << fmt(c.omega_max) << '\n';
  os << "freq.n = " << c.n_omega << '\n';
  os << "time.t_max = " << fmt(c.t_max) << '\n';
  os << "time.n = " << c.n_t << '\n';
  os << "time.t0 = " << fmt(c.t0) << '\n';
  os << "bem.ntheta = " << c.n_theta << '\n';
  os << "bem.nphi = " << c.n_phi << '\n';
  os << "oracle.eps = " << fmt(c.oracle_eps) << '\n';
  os << "oracle.r = " << fmt(c.oracle_r) << '\n';
  os << "checks.data_center = " << fmt(c.checks_data_center) << '\n';
  os << "checks.shape_center = " << fmt(c.checks_shape_center) << '\n';
  return os.str();
}

/// Hash of the physics settings (output directory and worker count excluded).
inline uint64_t config_hash(const ExperimentConfig& c) { return fnv1a(serialize(c)); }

inline StarShape make_shape(const ExperimentConfig& c) {
  if (c.shape_kind == "sphere") return StarShape::sphere(c.shape_radius, c.shape_center);
  if (c.shape_kind == "bumpy") {
    const auto b = StarShape::bumpy_sphere();
    return StarShape::harmonics(b.base_radius(), b.terms(), c.shape_center);
  }
  return StarShape::harmonics(c.shape_radius, c.shape_terms, c.shape_center);
}

inline ShellPulse make_pulse(const ExperimentConfig& c) {
  return ShellPulse(c.pulse_r0, c.pulse_R0, c.pulse_kreg, c.pulse_amplitude);
}

}  // namespace smallscat
