#pragma once

#include <vector>

#include "fedce/models.hpp"
#include "fedce/types.hpp"

namespace fedce {

struct LocalUpdateResult {
  ParamVector w_local;   // parameters after the local steps
  PseudoGradient delta;  // w_local - w_global, exactly
};

// `steps` full-batch gradient-descent steps on the client's train set.
LocalUpdateResult local_update(const ModelSpec& model, const ParamVector& w_global,
                               const std::vector<Sample>& train, int steps, double lr);

// w_k - w_prev. Throws on dimension mismatch.
PseudoGradient global_pseudo_gradient(const ParamVector& w_k, const ParamVector& w_prev);

// (gF - p_i * gFi) / (1 - p_i). Requires 0 <= p_i < 1.
PseudoGradient exclude_client_gradient(const PseudoGradient& gF, const PseudoGradient& gFi,
                                       double p_i);

// (w_k - p_i * w_ki) / (1 - p_i). Requires 0 <= p_i < 1.
ParamVector exclude_client_model(const ParamVector& w_k, const ParamVector& w_ki, double p_i);

// w_k + server_lr * sum_i rho_i * delta_i, reduced in ascending client order.
// Requires rho on the probability simplex (sum within 1e-9).
ParamVector aggregate(const ParamVector& w_k, const std::vector<PseudoGradient>& deltas,
                      const Vec& rho, double server_lr);

}  // namespace fedce
