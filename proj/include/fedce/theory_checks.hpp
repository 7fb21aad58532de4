#pragma once

#include <vector>

#include "fedce/engine.hpp"

namespace fedce {

// Exact W1 between equal-size 1-D empirical distributions: mean absolute
// difference of sorted samples. Unequal lengths are rejected.
double wasserstein_1d(const Vec& a, const Vec& b);

// Exact W1 between empirical distributions of any sizes, via the integral
// of |F_a - F_b| over the merged support. Coincides with wasserstein_1d on
// equal-size inputs.
double wasserstein_1d_cdf(const Vec& a, const Vec& b);

// Fixed 1-D feature projection: first coordinate of each feature vector.
Vec feature_projection(const std::vector<Sample>& samples);
// Projection pooled over train+val+test of every client.
Vec pooled_projection(const std::vector<ClientDataset>& clients);
// Projection of all of one client's samples.
Vec client_projection(const ClientDataset& client);

struct ShiftCheckResult {
  std::vector<int> surviving_clients;  // original ids, ascending
  Vec estimate_renormalized;  // N-client run estimates over survivors
  Vec estimate_reduced;       // (N-1)-client run estimates
  Vec abs_change;             // |Δ| per surviving client (weight fraction)
  double max_abs_change = 0.0;
  double wasserstein = 0.0;   // W1 between the pooled feature projections
};

// Runs the configured algorithm on all N clients and on the N-1 clients
// left after removing `removed_client`, renormalizes the N-client estimates
// over the survivors and reports per-client |Δ| plus the W1 distance
// between the two federations' pooled projections.
ShiftCheckResult shift_robustness_check(const ModelSpec& model, const RunConfig& run,
                                        const std::vector<ClientDataset>& clients,
                                        int removed_client);

struct RhoTraceRow {
  int round = 0;
  int client_id = 0;
  double rho = 0.0;
  int kappa = 0;
  double eta = 0.0;
  double a_proxy = 0.0;  // eta*sqrt(kappa)*(kappa-1)*||delta_i||^2/||gF||^2
};

// Monitoring trace for the convergence corollary. Only observable facts are
// asserted (simplex, finiteness); the bound constants are not estimable.
std::vector<RhoTraceRow> rho_bound_trace(const RunResult& result, const RunConfig& run);

struct ConvergenceCurve {
  Algorithm algorithm = Algorithm::fedavg;
  uint64_t seed = 0;
  Vec mean_val_score;  // per round
};

// Per-round mean validation score per algorithm, identical federation and
// model seed within each trial. Curves are emitted unsmoothed.
std::vector<ConvergenceCurve> convergence_compare(const ModelSpec& model,
                                                  const RunConfig& base,
                                                  const FederationSpec& federation,
                                                  const std::vector<Algorithm>& algorithms,
                                                  const std::vector<uint64_t>& seeds);

}  // namespace fedce
