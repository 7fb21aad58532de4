#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fedce/engine.hpp"

namespace fedce {

// Config-file violations; the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Namespaced subcommand sections.
struct FreeRiderStudyConfig {
  int repeat = 50;

  bool operator==(const FreeRiderStudyConfig&) const = default;
};

struct TheoryStudyConfig {
  // seeds for convergence_compare / shift checks; empty -> the main seeds
  std::vector<uint64_t> seeds;

  bool operator==(const TheoryStudyConfig&) const = default;
};

struct ExperimentConfig {
  FederationSpec federation;
  ModelSpec model;
  Algorithm algorithm = Algorithm::fedce_multi;
  int rounds = 30;        // K
  int local_steps = 1;    // kappa
  double client_lr = 1.0; // eta
  double server_lr = 1.0;
  std::vector<uint64_t> seeds{1};
  std::string output_dir = "out";
  FreeRiderStudyConfig freerider;
  TheoryStudyConfig theory;

  bool operator==(const ExperimentConfig&) const = default;
};

// Strict-schema JSON parsing: unknown keys anywhere fail with the key path
// in the message. Throws ConfigError.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Canonical serialized form; serialize(parse(x)) is idempotent.
std::string serialize_config(const ExperimentConfig& config);

void validate(const ExperimentConfig& config);

// Effective per-run seeds: the run seed drives both the federation data and
// the model initialization.
uint64_t federation_seed(const ExperimentConfig& config, uint64_t run_seed);
uint64_t model_seed(uint64_t run_seed);

// Engine slice of the config for one run seed.
RunConfig run_config(const ExperimentConfig& config, uint64_t run_seed);
FederationSpec federation_spec(const ExperimentConfig& config, uint64_t run_seed);

}  // namespace fedce
