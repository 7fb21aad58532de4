#pragma once

#include <vector>

#include "fedce/fl_engine.hpp"

namespace fedce {

enum class CombineMode { multi, sum };

// Norm threshold below which a pseudo-gradient counts as degenerate.
inline constexpr double kDegenerateNorm = 1e-12;

// Gradient-space contribution: 1 - cos(gFi, gF_excl_i), in [0,2]. Either
// vector with norm < 1e-12 falls back to 1 (orthogonality-equivalent) and
// sets *degenerate when provided.
double gamma_cos(const PseudoGradient& gFi, const PseudoGradient& gF_excl_i,
                 bool* degenerate = nullptr);

// Data-space contribution: error of the leave-i-out model on client i's
// validation samples, in [0,1].
double gamma_err(const ModelSpec& model, const ParamVector& w_excl_i,
                 const ClientDataset& client);

// Divide by the sum. An all-zero input (sum < 1e-12) returns the uniform
// vector and sets *degenerate. Throws on negative entries.
Vec normalize(const Vec& values, bool* degenerate = nullptr);

// Elementwise combination of the two normalized terms; un-normalized
// (normalization happens in update_rho).
Vec combine(const Vec& gcos, const Vec& gerr, CombineMode mode);

struct RoundContribution {
  Vec gamma_cos;  // normalized
  Vec gamma_err;  // normalized
  Vec gamma_m;
  Vec gamma_s;
  Vec rho;  // weights produced for this round
  bool degenerate = false;
};

// Per-round and cumulative contribution bookkeeping for one run.
struct ContributionLedger {
  int n_clients = 0;
  CombineMode mode = CombineMode::multi;
  std::vector<RoundContribution> rounds;  // accumulated rounds, in order
  Vec cumulative;                         // running sum of combined gammas
  Vec rho;                                // latest weights
  int degenerate_rounds = 0;

  ContributionLedger() = default;
  explicit ContributionLedger(int n, CombineMode m = CombineMode::multi)
      : n_clients(n), mode(m), cumulative(n, 0.0), rho(n, 1.0 / n) {}
};

// rho_{k,i} = cumulative_i / sum_j cumulative_j after folding in this round's
// combined gammas; all-zero cumulative sum falls back to uniform with a
// degenerate flag. Throws on negative entries.
Vec update_rho(ContributionLedger& ledger, const Vec& combined);

// (1 - cos(gFi, gF)) * |local_err - global_err|, clamped at 0. Higher means
// more suspicious. Zero-norm vectors use the same fallback as gamma_cos.
double free_rider_score(const PseudoGradient& gFi, const PseudoGradient& gF,
                        double local_err_on_i, double global_err_on_i);

// Glue for one round k >= 1: exclusion ops -> gamma_cos / gamma_err ->
// normalize -> combine -> update_rho; the ledger is appended.
RoundContribution compute_round_contributions(
    const ModelSpec& model, const ParamVector& w_k,
    const std::vector<ParamVector>& w_locals, const std::vector<PseudoGradient>& deltas,
    const PseudoGradient& gF, const Vec& prev_rho,
    const std::vector<ClientDataset>& clients, ContributionLedger& ledger);

}  // namespace fedce
