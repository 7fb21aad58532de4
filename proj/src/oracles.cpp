#include "fedce/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "fedce/parallel.hpp"

namespace fedce {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

int popcount(uint32_t v) {
  int c = 0;
  while (v) {
    v &= v - 1;
    ++c;
  }
  return c;
}

std::vector<int> mask_to_subset(uint32_t mask, int n) {
  std::vector<int> subset;
  for (int i = 0; i < n; ++i)
    if (mask & (1u << i)) subset.push_back(i);
  return subset;
}

}  // namespace

Vec exact_shapley(const UtilityFn& utility, int n_clients) {
  if (n_clients < 1) throw std::invalid_argument("exact_shapley: need at least one client");
  if (n_clients > kMaxShapleyClients)
    throw std::invalid_argument(
        "exact_shapley: exact enumeration is O(2^N), refusing N = " + std::to_string(n_clients) +
        " (max " + std::to_string(kMaxShapleyClients) + ")");

  const uint32_t total = 1u << n_clients;
  Vec cache(total);
  parallel_for(total, [&](size_t mask) {
    cache[mask] = utility(mask_to_subset(static_cast<uint32_t>(mask), n_clients));
  });

  const double n_fact = factorial(n_clients);
  Vec values(n_clients, 0.0);
  for (int i = 0; i < n_clients; ++i) {
    const uint32_t bit = 1u << i;
    for (uint32_t mask = 0; mask < total; ++mask) {
      if (mask & bit) continue;
      const int s = popcount(mask);
      const double weight = factorial(s) * factorial(n_clients - 1 - s) / n_fact;
      values[i] += weight * (cache[mask | bit] - cache[mask]);
    }
  }
  return values;
}

UtilityFn make_training_utility(const ModelSpec& model, const RunConfig& run,
                                const std::vector<ClientDataset>& clients) {
  return [model, run, clients](const std::vector<int>& subset) {
    ParamVector w;
    if (subset.empty()) {
      w = init_params(model, run.seed);
    } else {
      std::vector<ClientDataset> coalition;
      coalition.reserve(subset.size());
      for (int idx : subset) {
        if (idx < 0 || idx >= static_cast<int>(clients.size()))
          throw std::invalid_argument("utility: client index out of range");
        coalition.push_back(clients[idx]);
      }
      assign_proportions(coalition);
      RunConfig sub = run;
      sub.algorithm = Algorithm::fedavg;  // keep the oracle independent of FedCE
      w = run_experiment(model, sub, coalition).final_model;
    }
    double err = 0.0;
    for (const auto& c : clients) err += evaluate_error(model, w, c.test);
    return 1.0 - err / static_cast<double>(clients.size());
  };
}

Vec positive_shares(const Vec& v) {
  Vec clipped(v.size());
  double total = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    clipped[i] = std::max(v[i], 0.0);
    total += clipped[i];
  }
  if (total < 1e-12) return Vec(v.size(), v.empty() ? 0.0 : 1.0 / v.size());
  for (auto& c : clipped) c /= total;
  return clipped;
}

ValuationResult leave_one_out(const ModelSpec& model, const RunConfig& run,
                              const std::vector<ClientDataset>& clients) {
  const int n = static_cast<int>(clients.size());
  if (n < 2) throw std::invalid_argument("leave_one_out: need at least 2 clients");

  const auto utility = make_training_utility(model, run, clients);

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;

  ValuationResult res;
  res.subset_performance.resize(n);
  res.loo_drop.resize(n);

  // n+1 independent trainings: the full federation plus each N-1 subset
  std::vector<double> perf(n + 1);
  parallel_for(static_cast<size_t>(n) + 1, [&](size_t j) {
    if (j == static_cast<size_t>(n)) {
      perf[j] = utility(all);
      return;
    }
    std::vector<int> subset;
    subset.reserve(n - 1);
    for (int i = 0; i < n; ++i)
      if (i != static_cast<int>(j)) subset.push_back(i);
    perf[j] = utility(subset);
  });

  res.full_performance = perf[n];
  for (int i = 0; i < n; ++i) {
    res.subset_performance[i] = perf[i];
    res.loo_drop[i] = res.full_performance - perf[i];
  }
  res.loo_share = positive_shares(res.loo_drop);
  res.sample_share.resize(n);
  for (int i = 0; i < n; ++i) res.sample_share[i] = clients[i].p;
  return res;
}

ValuationResult shapley_valuation(const ModelSpec& model, const RunConfig& run,
                                  const std::vector<ClientDataset>& clients) {
  const int n = static_cast<int>(clients.size());
  ValuationResult res;
  res.shapley = exact_shapley(make_training_utility(model, run, clients), n);
  res.sample_share.resize(n);
  for (int i = 0; i < n; ++i) res.sample_share[i] = clients[i].p;
  return res;
}

AlignmentMetrics estimate_vs_oracle(const Vec& rho_final, const Vec& oracle_shares) {
  if (rho_final.size() != oracle_shares.size())
    throw std::invalid_argument("estimate_vs_oracle: length mismatch");
  AlignmentMetrics m;
  const auto pr = pearson(rho_final, oracle_shares);
  m.pearson_r = pr.r;
  m.p_value = pr.p_value;
  m.euclidean_distance = euclidean(rho_final, oracle_shares);
  m.cosine_similarity = cosine_sim(rho_final, oracle_shares);
  return m;
}

}  // namespace fedce
