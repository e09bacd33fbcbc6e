// iam: experiment runner for the stochastic-rate DICE engine.
//
//   iam <subcommand> --config <path> [--out <dir>] [--seed <u64>] [--paths <n>]
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "iam/config.hpp"
#include "iam/error.hpp"
#include "iam/experiments.hpp"

namespace fs = std::filesystem;
using namespace iam;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
};

config::Config load(const Options& opt) {
  config::Config cfg = opt.config.empty() ? config::Config{} : config::load(opt.config);
  if (opt.seed) cfg.model.rates.seed = *opt.seed;
  if (opt.paths) {
    if (*opt.paths < 1) throw ConfigError("--paths must be >= 1");
    cfg.model.rates.paths = *opt.paths;
    cfg.experiment.calibration_paths = *opt.paths;
  }
  cfg.validate();
  return cfg;
}

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory '" + dir + "'");
  }

  void write(const std::string& name, const csv::Table& table) const {
    const fs::path path = dir_ / name;
    csv::write(path.string(), table);
    std::cout << "wrote " << path.string() << " (" << table.rows.size() << " rows)\n";
  }

 private:
  fs::path dir_;
};

void run_simulate(const config::Config& cfg, const Output& out) {
  const auto scenarios = engine::scenarios_for(cfg.model);
  const auto traj = engine::simulate(cfg.model, cfg.model.policy, scenarios);
  out.write("trajectory.csv", experiments::trajectory_table(traj));
  std::cout << "objective " << csv::format(engine::objective(traj, cfg.model.objective, scenarios)) << "\n";
}

void run_calibrate(const config::Config& cfg, const Output& out) {
  const auto run = experiments::calibrate(cfg);
  out.write("trajectory.csv", experiments::trajectory_table(run.trajectory));
  out.write("calibration.csv", experiments::calibration_table(run.result));
  out.write("trace.csv", experiments::trace_table(run.result));
  std::cout << "family " << policy::to_string(cfg.experiment.family) << " objective "
            << csv::format(run.result.objective) << " t_full_abatement " << run.result.t_full_abatement << "\n";
}

void run_cost_dist(const config::Config& cfg, const Output& out) {
  const auto run = experiments::calibrate(cfg);
  const auto scenarios = engine::scenarios_for(cfg.model);
  const auto report = analysis::cost_distribution(run.trajectory, scenarios, cfg.experiment.generation_span);
  out.write("cost_distribution.csv", experiments::cost_distribution_table(report));
  out.write("trajectory.csv", experiments::trajectory_table(run.trajectory));
}

void run_sensitivity(const config::Config& cfg, const Output& out) {
  const auto run = experiments::sensitivity(cfg);
  out.write("damage_per_abatement.csv", run.damage_per_abatement);
  out.write("cost_sensitivity.csv", run.cost_sensitivity);
  std::cout << "integral " << csv::format(run.time_sensitivity.integral) << " l1_mass "
            << csv::format(run.time_sensitivity.l1_mass) << "\n";
}

void run_abatement_dist(const config::Config& cfg, const Output& out) {
  const auto d = experiments::abatement_distribution(cfg);
  out.write("abatement_histogram.csv", d.histogram);
  out.write("abatement_summary.csv", d.summary);
  csv::Table per_path;
  per_path.header = {"path", "t_full_abatement_expectation", "t_full_abatement_shortfall"};
  for (std::size_t p = 0; p < d.t_full_expectation.size(); ++p) {
    per_path.add({static_cast<double>(p), d.t_full_expectation[p], d.t_full_shortfall[p]});
  }
  out.write("abatement_paths.csv", per_path);
  out.write("cost_distribution_reduced.csv", experiments::cost_distribution_table(d.cost_reduced));
  out.write("cost_distribution_stochastic.csv", experiments::cost_distribution_table(d.cost_stochastic));
}

void run_convergence(const config::Config& cfg, const Output& out) {
  const auto c = experiments::convergence(cfg);
  for (std::size_t k = 0; k < c.horizons.size(); ++k) {
    out.write("states_" + std::to_string(static_cast<long long>(c.horizons[k])) + ".csv", c.states[k]);
  }
  out.write("convergence.csv", c.summary);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-rate DICE simulation and calibration"};
  app.require_subcommand(1);
  Options opt;

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const config::Config&, const Output&);
  };
  const Command commands[] = {
      {"simulate", "simulate the configured policy", run_simulate},
      {"calibrate", "calibrate the configured policy family", run_calibrate},
      {"cost-dist", "cost distribution over time at the calibrated policy", run_cost_dist},
      {"sensitivity", "damage-per-abatement and abatement-time sensitivities", run_sensitivity},
      {"sweep-rate", "calibrated full-abatement time vs. constant rate",
       [](const config::Config& c, const Output& o) { o.write("sweep_rate.csv", experiments::sweep_rate(c)); }},
      {"sweep-vol", "calibrated full-abatement time vs. rate volatility (left/right ES)",
       [](const config::Config& c, const Output& o) { o.write("sweep_vol.csv", experiments::sweep_vol(c)); }},
      {"sweep-quantile", "calibrated full-abatement time vs. ES level",
       [](const config::Config& c, const Output& o) {
         o.write("sweep_quantile.csv", experiments::sweep_quantile(c));
       }},
      {"sweep-funding", "calibrated full-abatement time vs. funding period",
       [](const config::Config& c, const Output& o) {
         o.write("sweep_funding.csv", experiments::sweep_funding(c));
       }},
      {"abatement-dist", "distribution of the full-abatement time under stochastic policies", run_abatement_dist},
      {"convergence", "horizon comparison", run_convergence},
  };

  const Command* selected = nullptr;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", opt.config, "JSON configuration file");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "override rates.seed");
    sub->add_option("--paths", opt.paths, "override the Monte-Carlo path count");
    sub->callback([&selected, &cmd] { selected = &cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const config::Config cfg = load(opt);
    const Output out(opt.out);
    selected->run(cfg, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
