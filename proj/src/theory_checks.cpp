#include "fedce/theory_checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fedce/parallel.hpp"
#include "fedce/rng.hpp"

namespace fedce {

double wasserstein_1d(const Vec& a, const Vec& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein_1d: empty input");
  if (a.size() != b.size())
    throw std::invalid_argument("wasserstein_1d: equal sample counts required");
  Vec sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double total = 0.0;
  for (size_t i = 0; i < sa.size(); ++i) total += std::fabs(sa[i] - sb[i]);
  return total / static_cast<double>(sa.size());
}

double wasserstein_1d_cdf(const Vec& a, const Vec& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein_1d_cdf: empty input");
  Vec sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  // integral of |F_a - F_b| over the merged support
  const double wa = 1.0 / static_cast<double>(sa.size());
  const double wb = 1.0 / static_cast<double>(sb.size());
  size_t ia = 0, ib = 0;
  double total = 0.0, fa = 0.0, fb = 0.0;
  double prev = std::min(sa.front(), sb.front());
  while (ia < sa.size() || ib < sb.size()) {
    double x;
    if (ib >= sb.size() || (ia < sa.size() && sa[ia] <= sb[ib])) {
      x = sa[ia];
    } else {
      x = sb[ib];
    }
    total += std::fabs(fa - fb) * (x - prev);
    prev = x;
    while (ia < sa.size() && sa[ia] == x) {
      fa += wa;
      ++ia;
    }
    while (ib < sb.size() && sb[ib] == x) {
      fb += wb;
      ++ib;
    }
  }
  return total;
}

Vec feature_projection(const std::vector<Sample>& samples) {
  Vec proj;
  proj.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.features.empty()) throw std::invalid_argument("feature_projection: empty features");
    proj.push_back(s.features.front());
  }
  return proj;
}

Vec client_projection(const ClientDataset& client) {
  Vec proj = feature_projection(client.train);
  const Vec v = feature_projection(client.val);
  const Vec t = feature_projection(client.test);
  proj.insert(proj.end(), v.begin(), v.end());
  proj.insert(proj.end(), t.begin(), t.end());
  return proj;
}

Vec pooled_projection(const std::vector<ClientDataset>& clients) {
  Vec pooled;
  for (const auto& c : clients) {
    const Vec p = client_projection(c);
    pooled.insert(pooled.end(), p.begin(), p.end());
  }
  return pooled;
}

ShiftCheckResult shift_robustness_check(const ModelSpec& model, const RunConfig& run,
                                        const std::vector<ClientDataset>& clients,
                                        int removed_client) {
  const int n = static_cast<int>(clients.size());
  if (removed_client < 0 || removed_client >= n)
    throw std::invalid_argument("shift_robustness_check: removed client out of range");
  if (n < 3) throw std::invalid_argument("shift_robustness_check: need at least 3 clients");

  const auto reduced_clients = remove_client(clients, removed_client);

  RunResult full, reduced;
  parallel_for(2, [&](size_t j) {
    if (j == 0) {
      full = run_experiment(model, run, clients);
    } else {
      reduced = run_experiment(model, run, reduced_clients);
    }
  });

  ShiftCheckResult res;
  double surviving_total = 0.0;
  for (int i = 0; i < n; ++i)
    if (i != removed_client) surviving_total += full.final_rho[i];
  if (surviving_total < 1e-12)
    throw std::runtime_error("shift_robustness_check: surviving weights vanish");

  for (int i = 0; i < n; ++i) {
    if (i == removed_client) continue;
    res.surviving_clients.push_back(i);
    res.estimate_renormalized.push_back(full.final_rho[i] / surviving_total);
  }
  res.estimate_reduced = reduced.final_rho;

  res.abs_change.resize(res.estimate_reduced.size());
  for (size_t i = 0; i < res.abs_change.size(); ++i) {
    res.abs_change[i] = std::fabs(res.estimate_renormalized[i] - res.estimate_reduced[i]);
    res.max_abs_change = std::max(res.max_abs_change, res.abs_change[i]);
  }

  res.wasserstein = wasserstein_1d_cdf(pooled_projection(clients),
                                       pooled_projection(reduced_clients));
  return res;
}

std::vector<RhoTraceRow> rho_bound_trace(const RunResult& result, const RunConfig& run) {
  std::vector<RhoTraceRow> rows;
  rows.reserve(result.round_logs.size());
  for (const auto& log : result.round_logs) {
    RhoTraceRow row;
    row.round = log.round;
    row.client_id = log.client_id;
    row.rho = log.rho;
    row.kappa = log.local_steps;
    row.eta = run.client_lr;
    // observable stand-in for A_{(k,i)}: local/global gradient-norm ratio in
    // place of the unobservable beta^2 * delta
    const double ratio = log.global_grad_norm > 0.0
                             ? (log.delta_norm * log.delta_norm) /
                                   (log.global_grad_norm * log.global_grad_norm)
                             : 0.0;
    row.a_proxy = run.client_lr * std::sqrt(static_cast<double>(log.local_steps)) *
                  (log.local_steps - 1) * ratio;
    if (!std::isfinite(row.rho) || !std::isfinite(row.a_proxy))
      throw std::runtime_error("rho_bound_trace: non-finite trace entry");
    rows.push_back(row);
  }
  return rows;
}

std::vector<ConvergenceCurve> convergence_compare(const ModelSpec& model, const RunConfig& base,
                                                  const FederationSpec& federation,
                                                  const std::vector<Algorithm>& algorithms,
                                                  const std::vector<uint64_t>& seeds) {
  if (algorithms.empty() || seeds.empty())
    throw std::invalid_argument("convergence_compare: nothing to run");

  struct Job {
    Algorithm algorithm;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Algorithm a : algorithms)
    for (uint64_t s : seeds) jobs.push_back({a, s});

  std::vector<ConvergenceCurve> curves(jobs.size());
  parallel_for(jobs.size(), [&](size_t j) {
    FederationSpec spec = federation;
    spec.seed = federation.seed ^ splitmix64(jobs[j].seed);
    const auto clients = generate_federation(spec);
    RunConfig run = base;
    run.algorithm = jobs[j].algorithm;
    run.seed = splitmix64(jobs[j].seed ^ 0x6a09e667f3bcc908ULL);
    const RunResult result = run_experiment(model, run, clients);
    curves[j] = {jobs[j].algorithm, jobs[j].seed, result.mean_val_score};
  });
  return curves;
}

}  // namespace fedce
