#pragma once

#include <string>

#include "fedce/config.hpp"

namespace fedce {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

struct CliOptions {
  std::string federation_import;  // load a federation record file instead of generating
  std::string federation_export;  // export the generated federation (run only)
};

int cmd_run(const ExperimentConfig& config, const CliOptions& opts = {});
int cmd_shapley(const ExperimentConfig& config);
int cmd_loo(const ExperimentConfig& config);
int cmd_freerider(const ExperimentConfig& config);
int cmd_theory(const ExperimentConfig& config);
int cmd_report(const ExperimentConfig& config);

// Wraps a subcommand body: prints a machine-readable error line on failure
// and maps exceptions to the exit-code contract.
int run_guarded(const std::function<int()>& body);

}  // namespace fedce
