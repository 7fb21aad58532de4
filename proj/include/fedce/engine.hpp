#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fedce/contribution.hpp"
#include "fedce/synthdata.hpp"

namespace fedce {

enum class Algorithm { fedavg, fedce_multi, fedce_sum, standalone };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

// Engine-level run parameters (the slice of the experiment config the round
// loop needs).
struct RunConfig {
  Algorithm algorithm = Algorithm::fedce_multi;
  int rounds = 30;       // K
  int local_steps = 1;   // kappa
  double client_lr = 1.0;
  double server_lr = 1.0;
  uint64_t seed = 0;     // model init seed
};

// One rounds.csv row plus engine-internal extras.
struct RoundClientLog {
  int round = 0;
  int client_id = 0;
  double gamma_cos = 0.0;
  double gamma_err = 0.0;
  double gamma_m = 0.0;
  double gamma_s = 0.0;
  double rho = 0.0;
  double local_val_error = 0.0;   // local model on the client's val set
  double global_val_error = 0.0;  // aggregated round-k model on the val set
  // not part of rounds.csv:
  double incoming_global_val_error = 0.0;  // broadcast w_k on the val set
  double free_rider_score = 0.0;
  double delta_norm = 0.0;
  double global_grad_norm = 0.0;
  int local_steps = 1;
};

struct RunResult {
  ParamVector final_model;                 // w_K (standalone: unused, empty)
  Vec final_rho;                           // rho_K
  std::vector<ParamVector> client_models;  // last local model per client
  std::vector<RoundClientLog> round_logs;  // K*N rows, round-major
  ContributionLedger ledger;
  // mean validation score (1 - mean val error across clients) of the model
  // produced by each round; the convergence curve
  Vec mean_val_score;
};

// Test hook: replaces the computed weights for round k (the FedAvg
// equivalence check stubs the contribution module to return p).
using WeightOverride = std::function<Vec(int round, const Vec& computed_rho)>;

// Algorithm 1: K rounds of broadcast, local updates, contribution
// estimation and weighted aggregation. Round 0 bootstraps with plain
// FedAvg weights (rho_{-1} = p) and uniform recorded contribution terms;
// those bootstrap terms do not enter the cumulative ledger.
RunResult run_experiment(const ModelSpec& model, const RunConfig& run,
                         const std::vector<ClientDataset>& clients,
                         const WeightOverride& weight_override = {});

// Per-client test scores (1 - evaluate_error on each client's test set) of a
// single global model.
Vec global_test_scores(const ModelSpec& model, const ParamVector& w,
                       const std::vector<ClientDataset>& clients);

// Per-client test scores of per-client models (standalone evaluation).
Vec standalone_test_scores(const ModelSpec& model, const std::vector<ParamVector>& models,
                           const std::vector<ClientDataset>& clients);

}  // namespace fedce
