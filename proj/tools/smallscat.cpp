#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smallscat.hpp"

using namespace smallscat;

namespace {

void print(const StageReport& rep) {
  std::cout << "== " << rep.name << " (" << fixed(rep.seconds, 4) << " s)\n";
  for (const auto& l : rep.lines) std::cout << l << '\n';
  for (const auto& c : rep.checks) std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  std::cout.flush();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Small sound-soft obstacle scattering: BEM, point-scatterer model and eps-scaling checks"};
  std::string config_path;
  std::string out_dir;
  int workers = -1;
  app.add_option("--config", config_path, "experiment config file (key = value lines)");
  app.add_option("--out", out_dir, "output directory (overrides `out`)");
  app.add_option("--workers", workers, "worker threads (overrides `workers`; SMALLSCAT_WORKERS wins over both)");
  app.require_subcommand(1);
  const std::vector<std::string> names = {"capacitance", "oracle-compare", "sweep", "synthesize",
                                          "theorem1",    "theorem2",       "checks", "all"};
  for (const auto& n : names) app.add_subcommand(n, "run the " + n + " stage");
  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (workers >= 0) cfg.workers = workers;
    validate(cfg);
    ExperimentRunner runner(cfg, std::clog);
    std::cout << "config_hash " << hash_hex(runner.hash()) << '\n';

    const std::string cmd = app.get_subcommands().front()->get_name();
    std::vector<std::string> stages;
    if (cmd == "all")
      stages = {"capacitance", "oracle-compare", "sweep", "synthesize", "theorem1", "theorem2", "checks"};
    else
      stages = {cmd};

    std::vector<StageReport> reports;
    for (const auto& st : stages) {
      StageReport rep;
      if (st == "capacitance") rep = runner.capacitance_stage();
      else if (st == "oracle-compare") rep = runner.oracle_compare_stage();
      else if (st == "sweep") rep = runner.sweep_stage();
      else if (st == "synthesize") rep = runner.synthesize_stage();
      else if (st == "theorem1") rep = runner.theorem1_stage();
      else if (st == "theorem2") rep = runner.theorem2_stage();
      else rep = runner.checks_stage();
      print(rep);
      reports.push_back(std::move(rep));
    }
    runner.write_manifest(reports);
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.passed();
    std::cout << (ok ? "all checks passed" : "some checks FAILED") << '\n';
    return ok ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
