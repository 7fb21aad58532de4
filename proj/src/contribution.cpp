#include "fedce/contribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedce {

double gamma_cos(const PseudoGradient& gFi, const PseudoGradient& gF_excl_i, bool* degenerate) {
  if (gFi.size() != gF_excl_i.size())
    throw std::invalid_argument("gamma_cos: dimension mismatch");
  const double ni = norm(gFi), ne = norm(gF_excl_i);
  if (ni < kDegenerateNorm || ne < kDegenerateNorm) {
    if (degenerate) *degenerate = true;
    return 1.0;  // orthogonality-equivalent fallback
  }
  const double c = std::clamp(dot(gFi, gF_excl_i) / (ni * ne), -1.0, 1.0);
  return 1.0 - c;
}

double gamma_err(const ModelSpec& model, const ParamVector& w_excl_i,
                 const ClientDataset& client) {
  if (client.val.empty()) throw std::invalid_argument("gamma_err: empty validation set");
  return evaluate_error(model, w_excl_i, client.val);
}

Vec normalize(const Vec& values, bool* degenerate) {
  double total = 0.0;
  for (double v : values) {
    if (v < 0.0) throw std::invalid_argument("normalize: negative input");
    total += v;
  }
  if (total < 1e-12) {
    if (degenerate) *degenerate = true;
    return Vec(values.size(), values.empty() ? 0.0 : 1.0 / values.size());
  }
  Vec out(values.size());
  for (size_t i = 0; i < values.size(); ++i) out[i] = values[i] / total;
  return out;
}

Vec combine(const Vec& gcos, const Vec& gerr, CombineMode mode) {
  if (gcos.size() != gerr.size()) throw std::invalid_argument("combine: length mismatch");
  Vec out(gcos.size());
  for (size_t i = 0; i < gcos.size(); ++i)
    out[i] = mode == CombineMode::multi ? gcos[i] * gerr[i] : gcos[i] + gerr[i];
  return out;
}

Vec update_rho(ContributionLedger& ledger, const Vec& combined) {
  if (static_cast<int>(combined.size()) != ledger.n_clients)
    throw std::invalid_argument("update_rho: length mismatch");
  for (double v : combined)
    if (v < 0.0) throw std::invalid_argument("update_rho: negative contribution");

  for (int i = 0; i < ledger.n_clients; ++i) ledger.cumulative[i] += combined[i];
  bool degen = false;
  ledger.rho = normalize(ledger.cumulative, &degen);
  if (degen) ++ledger.degenerate_rounds;
  return ledger.rho;
}

double free_rider_score(const PseudoGradient& gFi, const PseudoGradient& gF,
                        double local_err_on_i, double global_err_on_i) {
  if (!std::isfinite(local_err_on_i) || !std::isfinite(global_err_on_i))
    throw std::invalid_argument("free_rider_score: non-finite error input");
  const double dissent = gamma_cos(gFi, gF);  // 1 - cos, with the zero-norm fallback
  const double gap = std::fabs(local_err_on_i - global_err_on_i);
  return std::max(0.0, dissent * gap);
}

RoundContribution compute_round_contributions(
    const ModelSpec& model, const ParamVector& w_k, const std::vector<ParamVector>& w_locals,
    const std::vector<PseudoGradient>& deltas, const PseudoGradient& gF, const Vec& prev_rho,
    const std::vector<ClientDataset>& clients, ContributionLedger& ledger) {
  const size_t n = clients.size();
  if (w_locals.size() != n || deltas.size() != n || prev_rho.size() != n)
    throw std::invalid_argument("compute_round_contributions: length mismatch");

  RoundContribution rc;
  Vec raw_cos(n), raw_err(n);
  for (size_t i = 0; i < n; ++i) {
    bool degen = false;
    const PseudoGradient g_excl = exclude_client_gradient(gF, deltas[i], prev_rho[i]);
    raw_cos[i] = gamma_cos(deltas[i], g_excl, &degen);
    rc.degenerate = rc.degenerate || degen;
    const ParamVector w_excl = exclude_client_model(w_k, w_locals[i], prev_rho[i]);
    raw_err[i] = gamma_err(model, w_excl, clients[i]);
  }

  bool degen_cos = false, degen_err = false;
  rc.gamma_cos = normalize(raw_cos, &degen_cos);
  rc.gamma_err = normalize(raw_err, &degen_err);
  rc.degenerate = rc.degenerate || degen_cos || degen_err;

  rc.gamma_m = combine(rc.gamma_cos, rc.gamma_err, CombineMode::multi);
  rc.gamma_s = combine(rc.gamma_cos, rc.gamma_err, CombineMode::sum);

  const Vec& combined = ledger.mode == CombineMode::multi ? rc.gamma_m : rc.gamma_s;
  rc.rho = update_rho(ledger, combined);
  ledger.rounds.push_back(rc);
  return rc;
}

}  // namespace fedce
