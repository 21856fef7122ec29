#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "smallscat/asymptotic.hpp"
#include "smallscat/bem.hpp"
#include "smallscat/config.hpp"
#include "smallscat/metrics.hpp"
#include "smallscat/sphere_oracle.hpp"
#include "smallscat/synthesis.hpp"

namespace smallscat {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct StageReport {
  std::string name;
  std::vector<std::string> lines;
  std::vector<CheckResult> checks;
  std::vector<std::string> files;
  double seconds = 0.0;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Pass thresholds of the command-level checks.
namespace thresholds {
inline constexpr double kCapacitanceRelative = 1e-4;
inline constexpr double kRoundingFloor = 1e-12;
inline constexpr double kFrequencyOracleRelative = 1e-4;
inline constexpr double kTimeOracleRelative = 1e-2;
inline constexpr FitCriterion kTheorem1{1.0, 0.1, 0.05};
inline constexpr FitCriterion kTheorem2{2.0, 0.15, 0.05};
inline constexpr double kTailRatio = 1e-3;
inline constexpr double kTailDelay = 0.5;
inline constexpr double kDilation = 1e-10;
inline constexpr FitCriterion kProjectionMean{1.0, 0.15, 0.05};
inline constexpr FitCriterion kProjectionFluctuation{2.0, 0.2, 0.05};
inline constexpr FitCriterion kDensityExpansion{1.0, 0.2, 0.05};
inline constexpr FitCriterion kKernelDifference{2.0, 0.2, 0.05};
inline constexpr double kConditionCeiling = 1e6;
}  // namespace thresholds

/// Far-field shell quadrature used for every L^2(K_ff) norm of the runner.
inline ShellRule far_field_rule(const ExperimentConfig& c) { return shell_quadrature({c.ff_r, c.ff_R}, 12, 6); }

/// Per-scale data of the theorem runs.
struct ScaleRun {
  double epsilon = 0.0;
  FrequencyTable table;
  TimeSeries series;     // u_sc on the time grid at the far-field points
  TimeSeries error;      // u_app - u_sc on the time grid
  double norm_t0 = 0.0;  // ||u_sc(t0)||
  double error_t0 = 0.0; // ||u_app(t0) - u_sc(t0)||
  std::vector<double> norms;
  std::vector<double> error_norms;
};

inline std::string fixed(double x, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

/// Config-driven runner; caches the unit-scale kernel and the frequency sweeps between stages.
class ExperimentRunner {
 public:
  ExperimentRunner(ExperimentConfig cfg, std::ostream& log) : cfg_(std::move(cfg)), log_(log) {
    validate(cfg_);
    hash_ = config_hash(cfg_);
    std::filesystem::create_directories(cfg_.out);
  }

  const ExperimentConfig& config() const { return cfg_; }
  uint64_t hash() const { return hash_; }

  StageReport capacitance_stage() {
    StageReport rep{"capacitance", {}, {}, {}, 0.0};
    const auto start = now();
    const auto shape = make_shape(cfg_);
    const bool sphere = shape.is_sphere();
    const double exact = 4.0 * std::numbers::pi * shape.base_radius();
    const std::vector<int> levels = {4, 6, 8, 12, 16, 20, 24};
    const std::string path = file("capacitance.csv");
    std::ofstream os(path);
    os << "# config_hash=" << hash_hex(hash_) << '\n' << "n_theta,n_phi,c1,sigma_min,sigma_max,rel_error,seconds\n";
    rep.lines.push_back("n_theta n_phi c1 sigma1[min,max] " + std::string(sphere ? "rel_error" : "change") + " seconds");
    double previous = 0.0;
    std::vector<double> errors;
    double last_seconds = 0.0;
    for (int n : levels) {
      const auto t = now();
      const auto cap = capacitance(shape, {n, 2 * n}, quad_options());
      last_seconds = seconds_since(t);
      const double lo = cap.sigma1.values.real().minCoeff();
      const double hi = cap.sigma1.values.real().maxCoeff();
      const double err = sphere ? std::abs(cap.c1 / exact - 1.0) : (previous > 0.0 ? std::abs(cap.c1 / previous - 1.0) : NAN);
      previous = cap.c1;
      errors.push_back(err);
      char buf[256];
      std::snprintf(buf, sizeof buf, "%d,%d,%.15g,%.15g,%.15g,%.3e,%.3f\n", n, 2 * n, cap.c1, lo, hi, err, last_seconds);
      os << buf;
      rep.lines.push_back(fixed(n, 3) + " " + fixed(2 * n, 3) + " " + fixed(cap.c1, 14) + " [" + fixed(lo, 8) + ", " +
                          fixed(hi, 8) + "] " + fixed(err, 3) + " " + fixed(last_seconds, 3));
    }
    rep.files.push_back(path);
    if (sphere) {
      bool monotone = true;
      for (size_t i = 1; i < errors.size(); ++i)
        if (std::max(errors[i], thresholds::kRoundingFloor) > std::max(errors[i - 1], thresholds::kRoundingFloor))
          monotone = false;
      rep.checks.push_back({"capacitance_sphere_4pi", errors.back() < thresholds::kCapacitanceRelative,
                            "rel error " + fixed(errors.back(), 3) + " at 24x48"});
      rep.checks.push_back({"capacitance_refinement_monotone", monotone, "errors non-increasing above 1e-12"});
      rep.checks.push_back({"capacitance_runtime", last_seconds < 5.0, fixed(last_seconds, 3) + " s at 24x48"});
    }
    rep.seconds = seconds_since(start);
    return rep;
  }

  StageReport oracle_compare_stage() {
    StageReport rep{"oracle-compare", {}, {}, {}, 0.0};
    const auto start = now();
    const auto pulse = make_pulse(cfg_);
    const SphereScenario scn(cfg_.oracle_eps, pulse);
    const Vec3 x(0.0, 0.0, cfg_.oracle_r);
    const std::vector<cd> freqs = {0.0, cd(0.0, 1.0), cd(0.0, 4.0)};
    const std::string path = file("oracle_frequency.csv");
    std::ofstream os(path);
    os << "# config_hash=" << hash_hex(hash_) << '\n' << "n_theta,n_phi,s_im,bem_re,bem_im,oracle_re,oracle_im,rel_error\n";
    rep.lines.push_back("unit sphere, eps=" + fixed(cfg_.oracle_eps) + ", r=" + fixed(cfg_.oracle_r));
    double err_at_config = 0.0;
    std::vector<std::pair<int, int>> grids = {{8, 16}, {12, 24}, {16, 32}, {cfg_.n_theta, cfg_.n_phi}};
    for (auto [nt, np] : grids) {
      const SingleLayerKernel unit(build_surface_grid(StarShape::sphere(), 1.0, nt, np), quad_options());
      const auto k = unit.rescaled(cfg_.oracle_eps);
      double worst = 0.0;
      for (cd s : freqs) {
        const cd bem = scattered_frequency(k, pulse, s, {x})[0];
        const cd ref = sphere_scattered_frequency(scn, s, cfg_.oracle_r);
        const double rel = std::abs(bem - ref) / std::abs(ref);
        worst = std::max(worst, rel);
        char buf[256];
        std::snprintf(buf, sizeof buf, "%d,%d,%g,%.15g,%.15g,%.15g,%.15g,%.3e\n", nt, np, s.imag(), bem.real(), bem.imag(),
                      ref.real(), ref.imag(), rel);
        os << buf;
      }
      rep.lines.push_back("  grid " + std::to_string(nt) + "x" + std::to_string(np) + ": max rel error over s in {0, i, 4i} = " +
                          fixed(worst, 3));
      if (nt == cfg_.n_theta && np == cfg_.n_phi) err_at_config = worst;
    }
    rep.files.push_back(path);
    rep.checks.push_back({"oracle_frequency", err_at_config < thresholds::kFrequencyOracleRelative,
                          "max rel error " + fixed(err_at_config, 3)});

    // Time domain at the configured resolution.
    Scenario sc;
    sc.shape = StarShape::sphere();
    sc.epsilon = cfg_.oracle_eps;
    sc.pulse = pulse;
    sc.resolution = {cfg_.n_theta, cfg_.n_phi};
    const std::vector<Vec3> probes = {x, Vec3(cfg_.oracle_r, 0.0, 0.0), Vec3(0.0, -cfg_.oracle_r, 0.0)};
    const auto table = frequency_sweep(sc, probes, cfg_.omega_max, cfg_.n_omega, cfg_.workers);
    log_sweep(table, cfg_.oracle_eps);
    const auto times = uniform_times(cfg_.t_max, 4 * (cfg_.n_t - 1) + 1);
    const auto series = inverse_transform(table, times, cfg_.workers);
    const std::string tpath = file("oracle_time.csv");
    std::ofstream ts(tpath);
    ts << "# scenario_hash=" << hash_hex(table.hash) << '\n' << "t,point_index,synthesized,oracle\n";
    double err = 0.0;
    double peak = 0.0;
    for (size_t i = 0; i < times.size(); ++i)
      for (size_t k = 0; k < probes.size(); ++k) {
        const double ref = sphere_scattered_time(scn, times[i], probes[k].norm());
        const double got = series.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        err = std::max(err, std::abs(got - ref));
        peak = std::max(peak, std::abs(ref));
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.10g,%zu,%.15g,%.15g\n", times[i], k, got, ref);
        ts << buf;
      }
    rep.files.push_back(tpath);
    rep.lines.push_back("time domain: max |u_syn - u_oracle| / peak = " + fixed(err / peak, 3) + " over t in [0, " +
                        fixed(cfg_.t_max) + "]");
    rep.checks.push_back({"oracle_time", err < thresholds::kTimeOracleRelative * peak, "relative " + fixed(err / peak, 3)});
    rep.seconds = seconds_since(start);
    return rep;
  }

  StageReport sweep_stage() {
    StageReport rep{"sweep", {}, {}, {}, 0.0};
    const auto start = now();
    ensure_runs(false);
    for (const auto& run : runs_) {
      const std::string path = file("frequency_eps" + fixed(run.epsilon) + ".csv");
      write_frequency_table_csv(path, probe_table(run.table));
      rep.files.push_back(path);
      rep.lines.push_back("eps=" + fixed(run.epsilon) + ": max condition " + fixed(run.table.diagnostics.max_condition, 3) +
                          " at omega=" + fixed(run.table.diagnostics.omega_at_max_condition, 4) + ", nudged " +
                          std::to_string(run.table.diagnostics.nudged.size()) + ", tail ratio " +
                          fixed(run.table.diagnostics.tail_ratio, 3));
      rep.checks.push_back({"condition_eps" + fixed(run.epsilon),
                            run.table.diagnostics.max_condition < thresholds::kConditionCeiling,
                            "max condition " + fixed(run.table.diagnostics.max_condition, 3)});
    }
    rep.seconds = seconds_since(start);
    return rep;
  }

  StageReport synthesize_stage() {
    StageReport rep{"synthesize", {}, {}, {}, 0.0};
    const auto start = now();
    ensure_runs(true);
    const std::string npath = file("norms.csv");
    std::ofstream ns(npath);
    ns << "# config_hash=" << hash_hex(hash_) << '\n' << "eps,t,norm_sc,norm_error\n";
    for (const auto& run : runs_) {
      const std::string path = file("time_eps" + fixed(run.epsilon) + ".csv");
      write_time_series_csv(path, probe_series(run.series));
      rep.files.push_back(path);
      for (size_t i = 0; i < run.series.times.size(); ++i) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%g,%.10g,%.15g,%.15g\n", run.epsilon, run.series.times[i], run.norms[i],
                      run.error_norms[i]);
        ns << buf;
      }
      for (const auto& w : run.series.warnings) log_ << "warning eps=" << run.epsilon << ": " << w << '\n';
      rep.lines.push_back("eps=" + fixed(run.epsilon) + ": imaginary residue " + fixed(run.series.max_imag_residue, 3));
    }
    rep.files.push_back(npath);
    rep.seconds = seconds_since(start);
    return rep;
  }

  StageReport theorem1_stage() {
    StageReport rep{"theorem1", {}, {}, {}, 0.0};
    const auto start = now();
    ensure_runs(true);
    std::vector<double> eps;
    std::vector<double> norms;
    for (const auto& run : runs_) {
      eps.push_back(run.epsilon);
      norms.push_back(run.norm_t0);
    }
    const auto fit = fit_power_law(eps, norms);
    const bool ok = thresholds::kTheorem1.accepts(fit);
    rep.lines.push_back("||u_sc(t0)||_{L2(K_ff)} at t0=" + fixed(cfg_.t0) + ":");
    for (size_t i = 0; i < eps.size(); ++i) rep.lines.push_back("  eps=" + fixed(eps[i]) + "  " + fixed(norms[i], 8));
    rep.lines.push_back("slope " + fixed(fit.slope, 5) + ", max log residual " + fixed(fit.max_residual, 3));
    rep.checks.push_back({"theorem1_slope", ok, "slope " + fixed(fit.slope, 5) + " residual " + fixed(fit.max_residual, 3)});
    add_tail_checks(rep, false);
    const std::string path = file("theorem1_fit.csv");
    write_fit_csv(path, {{"theorem1_slope", fit, ok}}, "config_hash=" + hash_hex(hash_));
    rep.files.push_back(path);
    rep.seconds = seconds_since(start);
    return rep;
  }

  StageReport theorem2_stage() {
    StageReport rep{"theorem2", {}, {}, {}, 0.0};
    const auto start = now();
    ensure_runs(true);
    std::vector<double> eps;
    std::vector<double> norms;
    for (const auto& run : runs_) {
      eps.push_back(run.epsilon);
      norms.push_back(run.error_t0);
    }
    const auto fit = fit_power_law(eps, norms);
    const bool ok = thresholds::kTheorem2.accepts(fit);
    rep.lines.push_back("||u_app(t0) - u_sc(t0)||_{L2(K_ff)} at t0=" + fixed(cfg_.t0) + ", c1=" + fixed(cap().c1, 12) + ":");
    for (size_t i = 0; i < eps.size(); ++i) rep.lines.push_back("  eps=" + fixed(eps[i]) + "  " + fixed(norms[i], 8));
    rep.lines.push_back("slope " + fixed(fit.slope, 5) + ", max log residual " + fixed(fit.max_residual, 3));
    rep.checks.push_back({"theorem2_slope", ok, "slope " + fixed(fit.slope, 5) + " residual " + fixed(fit.max_residual, 3)});
    add_tail_checks(rep, true);
    const std::string path = file("theorem2_fit.csv");
    write_fit_csv(path, {{"theorem2_slope", fit, ok}}, "config_hash=" + hash_hex(hash_));
    rep.files.push_back(path);
    rep.seconds = seconds_since(start);
    return rep;
  }

  StageReport checks_stage() {
    StageReport rep{"checks", {}, {}, {}, 0.0};
    const auto start = now();
    const GridResolution res{cfg_.n_theta, cfg_.n_phi};
    const auto pulse = make_pulse(cfg_);
    const auto bumpy = StarShape::bumpy_sphere();
    const cd s(0.0, 1.0);

    auto data = [](const Vec3& x) { return cd(std::exp(0.7 * x.x() - 0.2 * x.z()), x.y()); };
    const std::vector<Vec3> points = {{0.6, 0.0, 0.0}, {0.0, 0.8, 0.3}, {-0.5, 0.5, -0.5}, {0.0, 0.0, 1.5}};
    double worst = 0.0;
    for (const auto& [label, shape] : {std::pair{"sphere", StarShape::sphere()}, std::pair{"bumpy", bumpy}})
      for (double e : {0.1, 0.25})
        for (cd sv : {cd(1.0, 0.0), cd(0.0, 2.0)}) {
          const double m = check_dilation_identity(shape, e, sv, data, points, res);
          worst = std::max(worst, m);
          rep.lines.push_back(std::string("dilation ") + label + " eps=" + fixed(e) + " s=" + fixed(sv.real()) + "+" +
                              fixed(sv.imag()) + "i: " + fixed(m, 3));
        }
    rep.checks.push_back({"dilation_identity", worst < thresholds::kDilation, "max mismatch " + fixed(worst, 3)});

    std::vector<FitRow> rows;
    const auto shifted = pulse.recentred(cfg_.checks_data_center);
    const auto proj = check_projection_scaling(bumpy, shifted, s, cfg_.eps, res);
    rows.push_back({"projection_mean", proj.mean, thresholds::kProjectionMean.accepts(proj.mean)});
    rows.push_back({"projection_fluctuation", proj.fluctuation, thresholds::kProjectionFluctuation.accepts(proj.fluctuation)});
    const auto dens = check_density_expansion(bumpy, shifted, s, cfg_.eps, res);
    rows.push_back({"density_expansion", dens, thresholds::kDensityExpansion.accepts(dens)});
    const auto offset = StarShape::harmonics(bumpy.base_radius(), bumpy.terms(), cfg_.checks_shape_center);
    const auto kern = check_kernel_difference(offset, cfg_.eps, s, {cfg_.ff_r, cfg_.ff_R}, res);
    rows.push_back({"kernel_difference", kern, thresholds::kKernelDifference.accepts(kern)});
    const auto kern_centred = check_kernel_difference(bumpy, cfg_.eps, s, {cfg_.ff_r, cfg_.ff_R}, res);
    rep.lines.push_back("kernel difference, bumpy shape centred at the origin (informational): slope " +
                        fixed(kern_centred.slope, 5));
    for (const auto& r : rows) {
      rep.lines.push_back(r.name + ": slope " + fixed(r.fit.slope, 5) + " residual " + fixed(r.fit.max_residual, 3));
      rep.checks.push_back({r.name, r.pass, "slope " + fixed(r.fit.slope, 5) + " residual " + fixed(r.fit.max_residual, 3)});
    }
    const std::string path = file("fits.csv");
    write_fit_csv(path, rows, "config_hash=" + hash_hex(hash_));
    rep.files.push_back(path);
    rep.seconds = seconds_since(start);
    return rep;
  }

  /// Plain-text MANIFEST plus a plotting script stub.
  void write_manifest(const std::vector<StageReport>& stages) {
    const std::string plot = file("plot.py");
    {
      std::ofstream ps(plot);
      ps << "# Plots the norm histories and the eps scaling written by the run.\n"
            "import pandas as pd\n"
            "import matplotlib.pyplot as plt\n\n"
            "norms = pd.read_csv('norms.csv', comment='#')\n"
            "fig, ax = plt.subplots(1, 2, figsize=(10, 4))\n"
            "for eps, g in norms.groupby('eps'):\n"
            "    ax[0].semilogy(g['t'], g['norm_sc'].abs() + 1e-16, label=f'eps={eps}')\n"
            "    ax[1].semilogy(g['t'], g['norm_error'].abs() + 1e-16, label=f'eps={eps}')\n"
            "ax[0].set_title('||u_sc(t)|| on K_ff')\n"
            "ax[1].set_title('||u_app(t) - u_sc(t)|| on K_ff')\n"
            "for a in ax:\n"
            "    a.set_xlabel('t')\n"
            "    a.legend()\n"
            "fig.tight_layout()\n"
            "fig.savefig('norms.png', dpi=150)\n";
    }
    std::ofstream os(file("MANIFEST"));
    os << "config_hash " << hash_hex(hash_) << '\n';
    os << "files\n";
    for (const auto& st : stages)
      for (const auto& f : st.files) os << "  " << std::filesystem::path(f).filename().string() << '\n';
    os << "  plot.py\n";
    os << "stages\n";
    for (const auto& st : stages) os << "  " << st.name << ' ' << fixed(st.seconds, 4) << " s\n";
    os << "checks\n";
    for (const auto& st : stages)
      for (const auto& c : st.checks) os << "  " << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
  }

  const std::vector<ScaleRun>& runs() {
    ensure_runs(true);
    return runs_;
  }

 private:
  using Clock = std::chrono::steady_clock;
  static Clock::time_point now() { return Clock::now(); }
  static double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(now() - t).count(); }

  std::string file(const std::string& name) const { return (std::filesystem::path(cfg_.out) / name).string(); }

  SingularQuadratureOptions quad_options() const {
    SingularQuadratureOptions o;
    o.workers = resolve_workers(cfg_.workers);
    return o;
  }

  const SingleLayerKernel& unit_kernel() {
    if (!unit_) {
      unit_ = std::make_unique<SingleLayerKernel>(
          build_surface_grid(make_shape(cfg_), 1.0, cfg_.n_theta, cfg_.n_phi), quad_options());
    }
    return *unit_;
  }

  const CapacitanceResult& cap() {
    if (!cap_) cap_ = std::make_unique<CapacitanceResult>(capacitance(unit_kernel()));
    return *cap_;
  }

  void log_sweep(const FrequencyTable& t, double eps) {
    log_ << "sweep eps=" << eps << " hash=" << hash_hex(t.hash) << " max_condition=" << t.diagnostics.max_condition
         << " omega=" << t.diagnostics.omega_at_max_condition << " nudged=" << t.diagnostics.nudged.size() << '\n';
    for (const auto& n : t.diagnostics.nudged)
      log_ << "  nudged omega=" << n.omega << " condition=" << n.condition << '\n';
  }

  void ensure_runs(bool with_series) {
    if (runs_.empty()) {
      const auto rule = far_field_rule(cfg_);
      const auto grid = frequency_grid(cfg_.omega_max, cfg_.n_omega);
      const auto pulse = make_pulse(cfg_);
      for (double eps : cfg_.eps) {
        ScaleRun run;
        run.epsilon = eps;
        Scenario scn{make_shape(cfg_), eps, pulse, {cfg_.n_theta, cfg_.n_phi}};
        run.table = frequency_sweep(unit_kernel().rescaled(eps), pulse, with_probes(rule.points), grid, cfg_.workers,
                                    scenario_hash(scn, grid));
        log_sweep(run.table, eps);
        runs_.push_back(std::move(run));
      }
    }
    if (with_series && !series_done_) {
      const auto rule = far_field_rule(cfg_);
      const auto n = static_cast<Eigen::Index>(rule.size());
      auto times = uniform_times(cfg_.t_max, cfg_.n_t);
      for (auto& run : runs_) {
        const auto model = PointScattererModel::from_capacitance(cap(), run.epsilon, make_pulse(cfg_));
        run.series = inverse_transform(run.table, times, cfg_.workers);
        run.error = run.series;
        for (Eigen::Index it = 0; it < run.error.values.rows(); ++it)
          for (Eigen::Index k = 0; k < run.error.values.cols(); ++k)
            run.error.values(it, k) =
                point_scatterer_time(model, times[static_cast<size_t>(it)], run.table.points[static_cast<size_t>(k)]) -
                run.series.values(it, k);
        run.norms.clear();
        run.error_norms.clear();
        for (Eigen::Index it = 0; it < run.series.values.rows(); ++it) {
          run.norms.push_back(shell_l2_norm(rule, run.series.values.row(it).head(n).transpose()));
          run.error_norms.push_back(shell_l2_norm(rule, run.error.values.row(it).head(n).transpose()));
        }
        const auto at_t0 = inverse_transform(run.table, {cfg_.t0}, cfg_.workers);
        Eigen::VectorXd sc = at_t0.values.row(0).head(n).transpose();
        Eigen::VectorXd err(n);
        for (Eigen::Index k = 0; k < n; ++k)
          err[k] = point_scatterer_time(model, cfg_.t0, rule.points[static_cast<size_t>(k)]) - sc[k];
        run.norm_t0 = shell_l2_norm(rule, sc);
        run.error_t0 = shell_l2_norm(rule, err);
      }
      series_done_ = true;
    }
  }

  /// Far-field points followed by three probes on the z axis.
  std::vector<Vec3> with_probes(std::vector<Vec3> pts) const {
    for (double r : probe_radii()) pts.emplace_back(0.0, 0.0, r);
    return pts;
  }

  std::vector<double> probe_radii() const { return {cfg_.ff_r, 0.5 * (cfg_.ff_r + cfg_.ff_R), cfg_.ff_R}; }

  FrequencyTable probe_table(const FrequencyTable& t) const {
    FrequencyTable out = t;
    const auto np = static_cast<Eigen::Index>(probe_radii().size());
    out.values = t.values.rightCols(np);
    out.points.assign(t.points.end() - np, t.points.end());
    return out;
  }

  TimeSeries probe_series(const TimeSeries& s) const {
    TimeSeries out = s;
    const auto np = static_cast<Eigen::Index>(probe_radii().size());
    out.values = s.values.rightCols(np);
    out.points.assign(s.points.end() - np, s.points.end());
    return out;
  }

  void add_tail_checks(StageReport& rep, bool error_field) {
    const double t_star = cfg_.t_star();
    const double tail_start = t_star + thresholds::kTailDelay;
    rep.lines.push_back("tail: max over t in [" + fixed(tail_start) + ", " + fixed(cfg_.t_max) + "] relative to the peak over t <= " +
                        fixed(t_star));
    for (const auto& run : runs_) {
      const auto& n = error_field ? run.error_norms : run.norms;
      double peak = 0.0;
      double tail = 0.0;
      for (size_t i = 0; i < run.series.times.size(); ++i) {
        const double t = run.series.times[i];
        if (t <= t_star) peak = std::max(peak, n[i]);
        if (t >= tail_start - 1e-12) tail = std::max(tail, n[i]);
      }
      const double ratio = peak > 0.0 ? tail / peak : 0.0;
      rep.lines.push_back("  eps=" + fixed(run.epsilon) + ": peak " + fixed(peak, 4) + ", tail " + fixed(tail, 3) +
                          ", ratio " + fixed(ratio, 3));
      if (!error_field)
        rep.checks.push_back({"tail_eps" + fixed(run.epsilon), ratio < thresholds::kTailRatio, "ratio " + fixed(ratio, 3)});
    }
  }

  ExperimentConfig cfg_;
  std::ostream& log_;
  uint64_t hash_ = 0;
  std::unique_ptr<SingleLayerKernel> unit_;
  std::unique_ptr<CapacitanceResult> cap_;
  std::vector<ScaleRun> runs_;
  bool series_done_ = false;
};

}  // namespace smallscat
