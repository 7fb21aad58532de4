#include "fedce/engine.hpp"

#include <cmath>
#include <stdexcept>

#include "fedce/parallel.hpp"

namespace fedce {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::fedavg: return "fedavg";
    case Algorithm::fedce_multi: return "fedce_multi";
    case Algorithm::fedce_sum: return "fedce_sum";
    case Algorithm::standalone: return "standalone";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "fedavg") return Algorithm::fedavg;
  if (s == "fedce_multi") return Algorithm::fedce_multi;
  if (s == "fedce_sum") return Algorithm::fedce_sum;
  if (s == "standalone") return Algorithm::standalone;
  throw std::invalid_argument("unknown algorithm: " + s);
}

namespace {

Vec proportions(const std::vector<ClientDataset>& clients) {
  Vec p(clients.size());
  for (size_t i = 0; i < clients.size(); ++i) p[i] = clients[i].p;
  return p;
}

void check_run(const RunConfig& run, const std::vector<ClientDataset>& clients) {
  if (run.rounds < 1) throw std::invalid_argument("run_experiment: rounds must be >= 1");
  if (run.local_steps < 1) throw std::invalid_argument("run_experiment: local_steps must be >= 1");
  if (run.client_lr < 0.0) throw std::invalid_argument("run_experiment: negative client_lr");
  if (clients.empty()) throw std::invalid_argument("run_experiment: no clients");
}

RunResult run_standalone(const ModelSpec& model, const RunConfig& run,
                         const std::vector<ClientDataset>& clients) {
  const size_t n = clients.size();
  RunResult result{.final_model = {},
                   .final_rho = proportions(clients),
                   .client_models = {},
                   .round_logs = {},
                   .ledger = ContributionLedger(static_cast<int>(n)),
                   .mean_val_score = {}};

  const ParamVector w0 = init_params(model, run.seed);
  result.client_models.assign(n, w0);
  result.round_logs.resize(static_cast<size_t>(run.rounds) * n);
  result.mean_val_score.resize(run.rounds);

  for (int k = 0; k < run.rounds; ++k) {
    parallel_for(n, [&](size_t i) {
      auto upd = local_update(model, result.client_models[i], clients[i].train, run.local_steps,
                              run.client_lr);
      const double err = evaluate_error(model, upd.w_local, clients[i].val);
      result.client_models[i] = std::move(upd.w_local);

      RoundClientLog& log = result.round_logs[static_cast<size_t>(k) * n + i];
      log.round = k;
      log.client_id = clients[i].client_id;
      log.rho = clients[i].p;
      log.local_val_error = err;
      log.global_val_error = err;
      log.incoming_global_val_error = err;
      log.local_steps = run.local_steps;
    });
    double total_err = 0.0;
    for (size_t i = 0; i < n; ++i)
      total_err += result.round_logs[static_cast<size_t>(k) * n + i].global_val_error;
    result.mean_val_score[k] = 1.0 - total_err / static_cast<double>(n);
  }
  return result;
}

}  // namespace

RunResult run_experiment(const ModelSpec& model, const RunConfig& run,
                         const std::vector<ClientDataset>& clients,
                         const WeightOverride& weight_override) {
  check_run(run, clients);
  if (run.algorithm == Algorithm::standalone) return run_standalone(model, run, clients);

  const size_t n = clients.size();
  const Vec p = proportions(clients);
  const CombineMode mode =
      run.algorithm == Algorithm::fedce_sum ? CombineMode::sum : CombineMode::multi;

  RunResult result{.final_model = init_params(model, run.seed),
                   .final_rho = p,
                   .client_models = std::vector<ParamVector>(n),
                   .round_logs = {},
                   .ledger = ContributionLedger(static_cast<int>(n), mode),
                   .mean_val_score = {}};
  result.round_logs.resize(static_cast<size_t>(run.rounds) * n);
  result.mean_val_score.resize(run.rounds);

  ParamVector w_k = result.final_model;
  ParamVector w_prev;        // empty until one aggregation happened
  Vec current_rho = p;       // rho_{k-1}; bootstrap rho_{-1} = p

  std::vector<PseudoGradient> deltas(n);
  Vec incoming_err(n), local_err(n);

  for (int k = 0; k < run.rounds; ++k) {
    auto* logs = &result.round_logs[static_cast<size_t>(k) * n];

    parallel_for(n, [&](size_t i) {
      incoming_err[i] = evaluate_error(model, w_k, clients[i].val);
      auto upd = local_update(model, w_k, clients[i].train, run.local_steps, run.client_lr);
      local_err[i] = evaluate_error(model, upd.w_local, clients[i].val);
      result.client_models[i] = std::move(upd.w_local);
      deltas[i] = std::move(upd.delta);
    });

    const bool bootstrap = (k == 0) || n == 1;
    PseudoGradient gF =
        bootstrap ? PseudoGradient(w_k.size(), 0.0) : global_pseudo_gradient(w_k, w_prev);

    Vec rho_k;
    if (bootstrap) {
      // plain FedAvg round; contribution terms recorded as uniform but kept
      // out of the cumulative ledger
      rho_k = p;
      const double u = 1.0 / static_cast<double>(n);
      for (size_t i = 0; i < n; ++i) {
        logs[i].gamma_cos = u;
        logs[i].gamma_err = u;
        logs[i].gamma_m = u * u;
        logs[i].gamma_s = 2.0 * u;
      }
    } else {
      const RoundContribution rc = compute_round_contributions(
          model, w_k, result.client_models, deltas, gF, current_rho, clients, result.ledger);
      rho_k = run.algorithm == Algorithm::fedavg ? p : rc.rho;
      for (size_t i = 0; i < n; ++i) {
        logs[i].gamma_cos = rc.gamma_cos[i];
        logs[i].gamma_err = rc.gamma_err[i];
        logs[i].gamma_m = rc.gamma_m[i];
        logs[i].gamma_s = rc.gamma_s[i];
      }
    }
    if (weight_override) rho_k = weight_override(k, rho_k);

    const double gF_norm = norm(gF);
    for (size_t i = 0; i < n; ++i) {
      logs[i].round = k;
      logs[i].client_id = clients[i].client_id;
      logs[i].rho = rho_k[i];
      logs[i].local_val_error = local_err[i];
      logs[i].incoming_global_val_error = incoming_err[i];
      logs[i].free_rider_score =
          free_rider_score(deltas[i], gF, local_err[i], incoming_err[i]);
      logs[i].delta_norm = norm(deltas[i]);
      logs[i].global_grad_norm = gF_norm;
      logs[i].local_steps = run.local_steps;
    }

    w_prev = w_k;
    w_k = aggregate(w_k, deltas, rho_k, run.server_lr);
    current_rho = rho_k;

    parallel_for(n, [&](size_t i) {
      logs[i].global_val_error = evaluate_error(model, w_k, clients[i].val);
    });
    double total_err = 0.0;
    for (size_t i = 0; i < n; ++i) total_err += logs[i].global_val_error;
    result.mean_val_score[k] = 1.0 - total_err / static_cast<double>(n);
  }

  result.final_model = w_k;
  result.final_rho = current_rho;
  return result;
}

Vec global_test_scores(const ModelSpec& model, const ParamVector& w,
                       const std::vector<ClientDataset>& clients) {
  Vec scores(clients.size());
  parallel_for(clients.size(), [&](size_t i) {
    scores[i] = 1.0 - evaluate_error(model, w, clients[i].test);
  });
  return scores;
}

Vec standalone_test_scores(const ModelSpec& model, const std::vector<ParamVector>& models,
                           const std::vector<ClientDataset>& clients) {
  if (models.size() != clients.size())
    throw std::invalid_argument("standalone_test_scores: model count mismatch");
  Vec scores(clients.size());
  parallel_for(clients.size(), [&](size_t i) {
    scores[i] = 1.0 - evaluate_error(model, models[i], clients[i].test);
  });
  return scores;
}

}  // namespace fedce
