#include "fedce/fl_engine.hpp"

#include <cmath>
#include <stdexcept>

namespace fedce {

LocalUpdateResult local_update(const ModelSpec& model, const ParamVector& w_global,
                               const std::vector<Sample>& train, int steps, double lr) {
  if (steps < 1) throw std::invalid_argument("local_update: steps must be >= 1");
  if (lr < 0.0) throw std::invalid_argument("local_update: negative learning rate");
  if (train.empty()) throw std::invalid_argument("local_update: empty train set");

  LocalUpdateResult res;
  res.w_local = w_global;
  for (int s = 0; s < steps; ++s) {
    const ParamVector g = gradient(model, res.w_local, train);
    axpy(res.w_local, -lr, g);
  }
  res.delta = sub(res.w_local, w_global);
  return res;
}

PseudoGradient global_pseudo_gradient(const ParamVector& w_k, const ParamVector& w_prev) {
  return sub(w_k, w_prev);
}

namespace {

void check_exclusion_weight(double p_i) {
  if (p_i < 0.0) throw std::invalid_argument("exclusion weight must be nonnegative");
  if (p_i >= 1.0)
    throw std::invalid_argument("cannot exclude a client holding the full weight (p_i >= 1)");
}

}  // namespace

PseudoGradient exclude_client_gradient(const PseudoGradient& gF, const PseudoGradient& gFi,
                                       double p_i) {
  check_exclusion_weight(p_i);
  if (gF.size() != gFi.size())
    throw std::invalid_argument("exclude_client_gradient: dimension mismatch");
  PseudoGradient out(gF.size());
  const double inv = 1.0 / (1.0 - p_i);
  for (size_t j = 0; j < gF.size(); ++j) out[j] = (gF[j] - p_i * gFi[j]) * inv;
  return out;
}

ParamVector exclude_client_model(const ParamVector& w_k, const ParamVector& w_ki, double p_i) {
  check_exclusion_weight(p_i);
  if (w_k.size() != w_ki.size())
    throw std::invalid_argument("exclude_client_model: dimension mismatch");
  ParamVector out(w_k.size());
  const double inv = 1.0 / (1.0 - p_i);
  for (size_t j = 0; j < w_k.size(); ++j) out[j] = (w_k[j] - p_i * w_ki[j]) * inv;
  return out;
}

ParamVector aggregate(const ParamVector& w_k, const std::vector<PseudoGradient>& deltas,
                      const Vec& rho, double server_lr) {
  if (deltas.size() != rho.size()) throw std::invalid_argument("aggregate: weight count mismatch");
  double s = 0.0;
  for (double r : rho) {
    if (r < 0.0) throw std::invalid_argument("aggregate: negative weight");
    s += r;
  }
  if (std::fabs(s - 1.0) > 1e-9)
    throw std::invalid_argument("aggregate: weights must sum to 1, got " + std::to_string(s));

  ParamVector w_next = w_k;
  for (size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i].size() != w_k.size())
      throw std::invalid_argument("aggregate: delta dimension mismatch");
    axpy(w_next, server_lr * rho[i], deltas[i]);
  }
  return w_next;
}

}  // namespace fedce
