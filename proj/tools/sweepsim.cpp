// sweepsim CLI: experiment orchestration around the header-only library.
//
// Exit codes: 0 success, 2 config error, 3 regime validation failure,
// 4 attempt/event cap exceeded (partial results flushed, summary marked
// truncated).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sweepsim/sweepsim.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sweepsim::ConfigError("cannot read config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int resolve_threads(std::optional<int> cli_threads) {
  if (cli_threads) return std::max(1, *cli_threads);
  if (const char* env = std::getenv("SWEEPSIM_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (...) {
      throw sweepsim::ConfigError("SWEEPSIM_THREADS is not an integer: " + std::string(env));
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sweepsim;

  CLI::App app{"Selective-sweep simulator and sampling-formula cross-validation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<int> threads_arg;
  std::optional<std::uint64_t> seed_override;
  std::uint64_t attempt_cap = 0;
  std::uint64_t event_cap = 0;
  std::vector<std::int64_t> levels;
  std::string trajectory_path;

  const std::vector<std::pair<std::string, RunMode>> modes = {
      {"simulate", RunMode::Simulate},
      {"analytic", RunMode::Analytic},
      {"compare", RunMode::Compare},
      {"diagnostics", RunMode::Diagnostics},
  };
  for (const auto& [name, mode] : modes) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--threads", threads_arg, "worker threads (env SWEEPSIM_THREADS as fallback)");
    sub->add_option("--seed", seed_override, "override master_seed from the config");
    sub->add_option("--attempt-cap", attempt_cap, "override the rejection-sampling attempt cap");
    sub->add_option("--event-cap", event_cap, "override the per-run event cap");
    if (mode == RunMode::Diagnostics) {
      sub->add_option("--levels", levels, "upcrossing levels k (default 5 10 20)");
      sub->add_option("--trajectory", trajectory_path,
                      "dump one conditioned run's (t,n_A,n_a) trajectory CSV here");
    }
  }

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();
  RunMode mode = RunMode::Simulate;
  for (const auto& [name, m] : modes)
    if (sub->get_name() == name) mode = m;

  ExperimentConfig cfg;
  try {
    cfg = parse_config(read_file(config_path));
    if (cfg.mode && *cfg.mode != mode)
      throw ConfigError(std::string("config says mode = ") + to_string(*cfg.mode) +
                        " but the CLI subcommand is " + to_string(mode));
    if (seed_override) cfg.master_seed = *seed_override;
    finalize_config(cfg, mode);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const ValidationReport report = validate_sweep_regime(cfg.params);
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (!report.ok) {
    std::cerr << "sweep-regime validation failed:\n" << report.to_string() << "\n";
    return 3;
  }

  ExperimentOptions opts;
  try {
    opts.threads = resolve_threads(threads_arg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  opts.attempt_cap = attempt_cap;
  opts.event_cap = event_cap;
  opts.diag_levels = levels;

  try {
    if (mode == RunMode::Diagnostics && !trajectory_path.empty()) {
      // one conditioned run with a recorded trajectory, then the diagnostic
      RunOptions run;
      run.record_trajectory = true;
      run.eps_diag = cfg.eps_diag;
      if (event_cap) run.event_cap = event_cap;
      SweepOutcome outcome = run_sweep(cfg.params, derive_seed(cfg.master_seed, 0), run);
      for (std::uint64_t attempt = 1; !outcome.fixed; ++attempt)
        outcome = run_sweep(cfg.params, derive_seed(cfg.master_seed, attempt), run);
      std::ofstream traj(trajectory_path, std::ios::binary | std::ios::trunc);
      if (!traj) throw std::runtime_error("cannot open trajectory path: " + trajectory_path);
      write_trajectory_csv(traj, outcome.trajectory);
    }

    const ComparisonSummary sum = run_experiment(cfg, mode, opts);
    if (cfg.out_json.empty()) std::cout << summary_json(cfg, sum).dump(2) << "\n";
    if (sum.truncated) {
      std::cerr << "cap exceeded: results truncated at " << sum.n_fixed << "/" << cfg.n_fixed
                << " replicates (" << sum.attempts << " attempts)\n";
      return 4;
    }
  } catch (const AttemptCapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 4;
  } catch (const EventCapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
