#pragma once

#include <functional>
#include <vector>

#include "fedce/engine.hpp"
#include "fedce/metrics.hpp"

namespace fedce {

// Maps a coalition (ascending client indices) to a value in [0,1].
using UtilityFn = std::function<double(const std::vector<int>&)>;

// Exact enumeration is O(2^N); larger federations are rejected.
inline constexpr int kMaxShapleyClients = 8;

// nu_i = sum over S ⊆ N\{i} of |S|!(N-1-|S|)!/N! * (U(S∪{i}) - U(S)).
// Each distinct coalition is evaluated once.
Vec exact_shapley(const UtilityFn& utility, int n_clients);

// Mean test performance of a federation retrained on a coalition: FedAvg
// over the subset (p renormalized within it), scored as 1 - mean
// evaluate_error across all N clients' test sets. U(∅) is the performance
// of the untrained initial model.
UtilityFn make_training_utility(const ModelSpec& model, const RunConfig& run,
                                const std::vector<ClientDataset>& clients);

struct ValuationResult {
  Vec shapley;             // empty unless computed
  Vec loo_drop;            // ΔPerf_i = Perf(all) - Perf(all \ {i})
  Vec loo_share;           // max(ΔPerf,0) normalized to the simplex
  Vec sample_share;        // p_i
  double full_performance = 0.0;
  Vec subset_performance;  // Perf(all \ {i}) per client
};

// N+1 full federated trainings (FedAvg, so the oracle stays independent of
// the estimator being graded).
ValuationResult leave_one_out(const ModelSpec& model, const RunConfig& run,
                              const std::vector<ClientDataset>& clients);

// Exact Shapley over the training utility; also fills sample_share and the
// normalized shares of max(nu, 0).
ValuationResult shapley_valuation(const ModelSpec& model, const RunConfig& run,
                                  const std::vector<ClientDataset>& clients);

// Shares of max(v,0); all-nonpositive input falls back to uniform.
Vec positive_shares(const Vec& v);

struct AlignmentMetrics {
  double pearson_r = 0.0;
  double p_value = 1.0;
  double euclidean_distance = 0.0;
  double cosine_similarity = 0.0;
};

AlignmentMetrics estimate_vs_oracle(const Vec& rho_final, const Vec& oracle_shares);

}  // namespace fedce
