#pragma once

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smallscat/asymptotic.hpp"
#include "smallscat/bem.hpp"
#include "smallscat/errors.hpp"
#include "smallscat/hash.hpp"
#include "smallscat/incident.hpp"
#include "smallscat/parallel.hpp"
#include "smallscat/quadrature.hpp"

namespace smallscat {

/// Obstacle, scale, data and discretization of one scattering run.
struct Scenario {
  StarShape shape = StarShape::sphere();
  double epsilon = 0.1;
  ShellPulse pulse;
  GridResolution resolution;
};

inline std::string describe(const StarShape& shape) {
  std::ostringstream os;
  os.precision(17);
  os << "shape base=" << shape.base_radius() << " center=" << shape.center().transpose();
  for (const auto& t : shape.terms()) os << " (" << t.l << ',' << t.m << ',' << t.c << ')';
  return os.str();
}

inline std::string describe(const ShellPulse& p) {
  std::ostringstream os;
  os.precision(17);
  os << "pulse r0=" << p.r0() << " R0=" << p.R0() << " k=" << p.k_reg() << " peak=" << p.peak()
     << " center=" << p.center().transpose();
  return os.str();
}

inline uint64_t scenario_hash(const Scenario& scn, const CompositeRule& omega) {
  std::ostringstream os;
  os.precision(17);
  os << describe(scn.shape) << ';' << describe(scn.pulse) << ";eps=" << scn.epsilon << ";grid=" << scn.resolution.n_theta
     << 'x' << scn.resolution.n_phi << ";omega=" << omega.a << ',' << omega.b << ',' << omega.panels << ','
     << omega.panel_order;
  return fnv1a(os.str());
}

/// Composite Gauss–Legendre grid on [0, omega_max]; n_omega must be a multiple of panel_order.
inline CompositeRule frequency_grid(double omega_max, int n_omega, int panel_order = 8) {
  if (!(omega_max > 0.0)) throw ConfigError("omega_max must be positive");
  if (n_omega < panel_order || n_omega % panel_order != 0)
    throw ConfigError("number of frequencies must be a positive multiple of the panel order");
  return composite_gauss_legendre(0.0, omega_max, n_omega / panel_order, panel_order);
}

struct NudgeRecord {
  double omega = 0.0;
  double condition = 0.0;
};

struct SweepDiagnostics {
  double max_condition = 0.0;
  double omega_at_max_condition = 0.0;
  std::vector<NudgeRecord> nudged;
  double tail_ratio = 0.0;  // max |u| on the last panel over max |u| on the grid
};

/// Scattered-field samples u_sc(i omega_j, x_k) on the positive imaginary axis.
struct FrequencyTable {
  CompositeRule rule;
  std::vector<Vec3> points;
  Eigen::MatrixXcd values;  // rows: frequencies, columns: points
  uint64_t hash = 0;
  GridResolution resolution;
  SweepDiagnostics diagnostics;

  size_t frequency_count() const { return rule.nodes.size(); }
  size_t point_count() const { return points.size(); }
};

/// Nodes whose condition estimate exceeds this are replaced by the mean of two shifted solves.
inline constexpr double kNudgeCondition = 1e6;

/// One Laplace-domain solve per frequency node; results land in frequency order.
inline FrequencyTable frequency_sweep(const SingleLayerKernel& kernel, const ShellPulse& pulse,
                                      const std::vector<Vec3>& points, const CompositeRule& rule, int workers = 1,
                                      uint64_t hash = 0) {
  FrequencyTable table;
  table.rule = rule;
  table.points = points;
  table.hash = hash;
  table.resolution = kernel.grid().resolution;
  const size_t nw = rule.nodes.size();
  table.values.resize(static_cast<Eigen::Index>(nw), static_cast<Eigen::Index>(points.size()));
  std::vector<double> condition(nw, 0.0);
  std::vector<char> nudged(nw, 0);
  const double step = (rule.b - rule.a) / rule.panels / rule.panel_order;

  parallel_for(nw, resolve_workers(workers), [&](size_t j) {
    const double omega = rule.nodes[j];
    std::vector<cd> vals;
    double cond = 0.0;
    bool retry = false;
    try {
      auto solved = scattered_frequency_solve(kernel, pulse, cd(0.0, omega), points);
      cond = solved.condition_estimate;
      vals = std::move(solved.values);
      retry = !(cond <= kNudgeCondition);
    } catch (const SolverError& e) {
      cond = e.condition_estimate();
      retry = true;
    }
    if (retry) {
      const double delta = 0.25 * step;
      try {
        auto lo = scattered_frequency_solve(kernel, pulse, cd(0.0, omega - delta), points);
        auto hi = scattered_frequency_solve(kernel, pulse, cd(0.0, omega + delta), points);
        vals.assign(points.size(), 0.0);
        for (size_t k = 0; k < points.size(); ++k) vals[k] = 0.5 * (lo.values[k] + hi.values[k]);
      } catch (const SolverError& e) {
        throw SolverError(cd(0.0, omega), e.condition_estimate(), "frequency sweep failed near a resonance");
      }
      nudged[j] = 1;
    }
    condition[j] = cond;
    for (size_t k = 0; k < points.size(); ++k)
      table.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = vals[k];
  });

  auto& diag = table.diagnostics;
  for (size_t j = 0; j < nw; ++j) {
    if (condition[j] > diag.max_condition) {
      diag.max_condition = condition[j];
      diag.omega_at_max_condition = rule.nodes[j];
    }
    if (nudged[j]) diag.nudged.push_back({rule.nodes[j], condition[j]});
  }
  double overall = 0.0;
  double tail = 0.0;
  const auto last_panel_start = static_cast<Eigen::Index>(nw) - rule.panel_order;
  for (Eigen::Index j = 0; j < table.values.rows(); ++j) {
    const double m = table.values.row(j).cwiseAbs().maxCoeff();
    overall = std::max(overall, m);
    if (j >= last_panel_start) tail = std::max(tail, m);
  }
  diag.tail_ratio = overall > 0.0 ? tail / overall : 0.0;
  return table;
}

inline FrequencyTable frequency_sweep(const Scenario& scn, const std::vector<Vec3>& points, double omega_max,
                                      int n_omega, int workers = 1) {
  const auto rule = frequency_grid(omega_max, n_omega);
  SingularQuadratureOptions opts;
  opts.workers = resolve_workers(workers);
  const SingleLayerKernel unit(build_surface_grid(scn.shape, 1.0, scn.resolution.n_theta, scn.resolution.n_phi), opts);
  return frequency_sweep(unit.rescaled(scn.epsilon), scn.pulse, points, rule, workers, scenario_hash(scn, rule));
}

/// Real time signals at a set of points; values are (time index, point index).
struct TimeSeries {
  std::vector<double> times;
  std::vector<Vec3> points;
  Eigen::MatrixXd values;
  double max_imag_residue = 0.0;  // relative to the peak magnitude
  uint64_t hash = 0;
  std::vector<std::string> warnings;
};

/// Products omega * t above this use exact oscillatory panel weights.
inline constexpr double kFilonThreshold = 20.0;

/// u(t, x_k) = (1/pi) Re int_0^Omega e^{i omega t} u(i omega, x_k) d omega.
///
/// The negative half-axis enters through u(-i omega) = conj(u(i omega)); both halves are summed
/// explicitly and the imaginary part of their sum is reported as a consistency residue.
/// Panels whose upper edge times t_max exceeds the threshold use weights
/// int l_k(omega) e^{i omega t} d omega of the panel's Lagrange basis, integrated by a fine rule.
inline TimeSeries inverse_transform(const FrequencyTable& table, const std::vector<double>& times, int workers = 1,
                                    double tail_tolerance = 1e-6) {
  const auto& rule = table.rule;
  const int order = rule.panel_order;
  const size_t nt = times.size();
  const auto np = static_cast<Eigen::Index>(table.point_count());
  double t_max = 0.0;
  for (double t : times) t_max = std::max(t_max, std::abs(t));

  // Lagrange basis of the reference panel at a fine Gauss–Legendre rule.
  const auto& coarse = gauss_legendre(order);
  const double panel_width = (rule.b - rule.a) / rule.panels;
  const int fine_n = std::max(32, order + 8 + static_cast<int>(std::ceil(panel_width * t_max)));
  const auto& fine = gauss_legendre(fine_n);
  Eigen::MatrixXd lagrange(fine_n, order);
  for (int q = 0; q < fine_n; ++q) {
    for (int k = 0; k < order; ++k) {
      double v = 1.0;
      for (int m = 0; m < order; ++m)
        if (m != k)
          v *= (fine.nodes[static_cast<size_t>(q)] - coarse.nodes[static_cast<size_t>(m)]) /
               (coarse.nodes[static_cast<size_t>(k)] - coarse.nodes[static_cast<size_t>(m)]);
      lagrange(q, k) = v;
    }
  }

  TimeSeries out;
  out.times = times;
  out.points = table.points;
  out.hash = table.hash;
  out.values.resize(static_cast<Eigen::Index>(nt), np);
  std::vector<double> residue(nt, 0.0);
  double peak = 0.0;

  parallel_for(nt, resolve_workers(workers), [&](size_t it) {
    const double t = times[it];
    Eigen::VectorXcd weights_pos(static_cast<Eigen::Index>(rule.nodes.size()));
    for (int p = 0; p < rule.panels; ++p) {
      const double lo = rule.panel_lower(p);
      const double hi = rule.panel_upper(p);
      const size_t base = static_cast<size_t>(p * order);
      if (hi * t_max > kFilonThreshold) {
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        for (int k = 0; k < order; ++k) {
          cd w = 0.0;
          for (int q = 0; q < fine_n; ++q) {
            const double om = mid + half * fine.nodes[static_cast<size_t>(q)];
            w += fine.weights[static_cast<size_t>(q)] * lagrange(q, k) * std::exp(cd(0.0, om * t));
          }
          weights_pos[static_cast<Eigen::Index>(base + static_cast<size_t>(k))] = w * half;
        }
      } else {
        for (int k = 0; k < order; ++k) {
          const size_t j = base + static_cast<size_t>(k);
          weights_pos[static_cast<Eigen::Index>(j)] = rule.weights[j] * std::exp(cd(0.0, rule.nodes[j] * t));
        }
      }
    }
    double res = 0.0;
    for (Eigen::Index k = 0; k < np; ++k) {
      cd pos = 0.0;
      cd neg = 0.0;
      for (Eigen::Index j = 0; j < weights_pos.size(); ++j) {
        const cd u = table.values(j, k);
        pos += weights_pos[j] * u;
        neg += std::conj(weights_pos[j]) * std::conj(u);
      }
      const cd total = (pos + neg) / (2.0 * std::numbers::pi);
      out.values(static_cast<Eigen::Index>(it), k) = total.real();
      res = std::max(res, std::abs(total.imag()));
    }
    residue[it] = res;
  });

  for (size_t it = 0; it < nt; ++it) out.max_imag_residue = std::max(out.max_imag_residue, residue[it]);
  if (out.values.size() > 0) peak = out.values.cwiseAbs().maxCoeff();
  out.max_imag_residue = peak > 0.0 ? out.max_imag_residue / peak : out.max_imag_residue;
  if (table.diagnostics.tail_ratio > tail_tolerance) {
    std::ostringstream os;
    os << "integrand on the last frequency panel is " << table.diagnostics.tail_ratio
       << " of its peak; omega_max may be too small";
    out.warnings.push_back(os.str());
  }
  return out;
}

/// e(t) = u_app(t) - u_sc(t), with u_app evaluated exactly in the time domain.
inline TimeSeries synthesize_error(const FrequencyTable& table, const PointScattererModel& model,
                                   const std::vector<double>& times, int workers = 1) {
  auto out = inverse_transform(table, times, workers);
  for (Eigen::Index it = 0; it < out.values.rows(); ++it)
    for (Eigen::Index k = 0; k < out.values.cols(); ++k)
      out.values(it, k) = point_scatterer_time(model, times[static_cast<size_t>(it)], table.points[static_cast<size_t>(k)]) -
                          out.values(it, k);
  return out;
}

inline std::vector<double> uniform_times(double t_max, int n) {
  if (n < 2) throw ConfigError("time grid needs at least two samples");
  std::vector<double> t(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) t[static_cast<size_t>(k)] = t_max * k / (n - 1);
  return t;
}

inline std::string hash_hex(uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

inline void write_frequency_table_csv(const std::string& path, const FrequencyTable& table) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << "# scenario_hash=" << hash_hex(table.hash) << " omega_max=" << table.rule.b << " panels=" << table.rule.panels
     << " panel_order=" << table.rule.panel_order << '\n';
  os << "omega,point_index,re,im\n";
  char buf[128];
  for (Eigen::Index j = 0; j < table.values.rows(); ++j)
    for (Eigen::Index k = 0; k < table.values.cols(); ++k) {
      const cd v = table.values(j, k);
      std::snprintf(buf, sizeof buf, "%.17g,%td,%.17g,%.17g\n", table.rule.nodes[static_cast<size_t>(j)], k, v.real(),
                    v.imag());
      os << buf;
    }
}

inline void write_time_series_csv(const std::string& path, const TimeSeries& series) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << "# scenario_hash=" << hash_hex(series.hash) << '\n';
  os << "t,point_index,value\n";
  char buf[96];
  for (Eigen::Index it = 0; it < series.values.rows(); ++it)
    for (Eigen::Index k = 0; k < series.values.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g,%td,%.17g\n", series.times[static_cast<size_t>(it)], k, series.values(it, k));
      os << buf;
    }
}

}  // namespace smallscat
