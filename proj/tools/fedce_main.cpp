// fedce — experiment driver for the contribution-weighted federated
// learning simulator. Subcommands: run, shapley, loo, freerider, theory,
// report.

#include <string>

#include <CLI11.hpp>

#include "fedce/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"FedCE federated-learning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string algorithm;
  uint64_t seed = 0;
  bool seed_set = false;
  fedce::CliOptions opts;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config file (JSON)")->required();
    cmd->add_option("--seed", seed, "override the config's first seed")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--out", out_dir, "override the output directory");
    cmd->add_option("--algorithm", algorithm,
                    "override the algorithm (fedavg|fedce_multi|fedce_sum|standalone)");
    return cmd;
  };

  auto* run = add_common(app.add_subcommand("run", "run the configured experiment per seed"));
  run->add_option("--export-federation", opts.federation_export,
                  "write the generated federation to a record file");
  run->add_option("--federation", opts.federation_import,
                  "load the federation from a record file instead of generating");
  add_common(app.add_subcommand("shapley", "exact Shapley valuation (N <= 8)"));
  add_common(app.add_subcommand("loo", "leave-one-out valuation"));
  add_common(app.add_subcommand("freerider", "free-rider study, one run per position"));
  add_common(app.add_subcommand("theory", "shift robustness, convergence and rho trace"));
  add_common(app.add_subcommand("report", "fairness report across algorithms"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? fedce::kExitOk : fedce::kExitConfigError;
  }

  return fedce::run_guarded([&]() -> int {
    fedce::ExperimentConfig config = fedce::parse_config(config_path);
    if (seed_set) {
      if (config.seeds.empty()) config.seeds.push_back(seed);
      config.seeds[0] = seed;
    }
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (!algorithm.empty()) {
      try {
        config.algorithm = fedce::algorithm_from_string(algorithm);
      } catch (const std::exception& e) {
        throw fedce::ConfigError(e.what());
      }
    }
    fedce::validate(config);

    if (app.got_subcommand("run")) return fedce::cmd_run(config, opts);
    if (app.got_subcommand("shapley")) return fedce::cmd_shapley(config);
    if (app.got_subcommand("loo")) return fedce::cmd_loo(config);
    if (app.got_subcommand("freerider")) return fedce::cmd_freerider(config);
    if (app.got_subcommand("theory")) return fedce::cmd_theory(config);
    if (app.got_subcommand("report")) return fedce::cmd_report(config);
    throw fedce::ConfigError("no subcommand selected");
  });
}
