// flks: batch front end for the flux-limited chemotaxis toolkit.
// One subcommand per experiment; see README for the config schema.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flks/config.hpp"
#include "flks/runner.hpp"

namespace {

int run_one(const std::string& experiment, const std::string& config_path,
            const std::string& out, int jobs, bool check_only) {
  std::filesystem::path out_dir = out.empty() ? "flks_out" : out;
  std::ofstream log;
  try {
    if (check_only) {
      flks::CheckResult cr = flks::run_invariant_suite();
      for (auto& [name, ok] : cr.checks)
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name.c_str());
      return cr.all_ok() ? 0 : 1;
    }
    flks::RunConfig cfg = flks::parse_config(config_path);
    if (!experiment.empty() && cfg.experiment != experiment) {
      std::fprintf(stderr,
                   "config experiment \"%s\" does not match subcommand "
                   "\"%s\"\n",
                   cfg.experiment.c_str(), experiment.c_str());
      return 1;
    }
    std::filesystem::create_directories(out_dir);
    log.open(out_dir / "run.log");
    log << "experiment: " << cfg.experiment << "\n";
    log << "config_hash: " << flks::config_hash(cfg) << "\n";
    flks::RunResult res = flks::run_experiment(cfg, out_dir, jobs);
    log << "exit_code: " << res.exit_code << "\n";
    return res.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "flks: %s\n", e.what());
    if (log.is_open()) log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flux-limited chemotaxis toolkit"};
  app.require_subcommand(0, 1);

  std::string config_path, out_dir;
  int jobs = 1;
  bool check = false;
  app.add_flag("--check", check, "run the invariant suite only");

  const char* names[] = {"evolve-1d",     "evolve-radial", "kinetic-converge",
                         "steady-shoot",  "critical-mass", "entropy-track",
                         "decay-fit"};
  std::string chosen;
  for (const char* n : names) {
    auto* sub = app.add_subcommand(n, std::string("run the ") + n + " experiment");
    sub->add_option("--config", config_path, "config file path")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--jobs", jobs, "concurrent sweep members");
    sub->callback([n, &chosen] { chosen = n; });
  }

  CLI11_PARSE(app, argc, argv);

  if (check) return run_one("", "", out_dir, jobs, true);
  if (chosen.empty()) {
    std::cout << app.help();
    return 1;
  }
  return run_one(chosen, config_path, out_dir, jobs, false);
}
