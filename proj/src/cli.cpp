#include "fedce/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <nlohmann/json.hpp>

#include "fedce/io.hpp"
#include "fedce/oracles.hpp"
#include "fedce/parallel.hpp"
#include "fedce/theory_checks.hpp"

namespace fedce {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

Vec method_test_scores(const ModelSpec& model, const RunResult& result,
                       const std::vector<ClientDataset>& clients, Algorithm algorithm) {
  if (algorithm == Algorithm::standalone)
    return standalone_test_scores(model, result.client_models, clients);
  return global_test_scores(model, result.final_model, clients);
}

// Fixed-width per-method summary, Tables 1-2 shape. Scores and correlations
// are rendered x100.
void print_score_table(const std::vector<std::pair<std::string, FairnessReport>>& rows) {
  if (rows.empty()) return;
  const size_t n = rows.front().second.client_scores.size();
  std::printf("%-14s", "Method");
  for (size_t i = 0; i < n; ++i) std::printf(" %7s", ("C" + std::to_string(i + 1)).c_str());
  std::printf(" | %7s %7s | %9s %9s %8s %7s\n", "Avg.", "Std.", "Pearson", "p-value", "Eucl.",
              "Cosine");
  for (const auto& [name, rep] : rows) {
    std::printf("%-14s", name.c_str());
    for (double s : rep.client_scores) std::printf(" %7.2f", 100.0 * s);
    std::printf(" | %7.2f %7.2f | %9.2f %9.2e %8.3f %7.4f\n", 100.0 * rep.mean_score,
                100.0 * rep.std_dev, 100.0 * rep.pearson_r, rep.p_value,
                rep.euclidean_distance, rep.cosine_similarity);
  }
}

void write_report_csv(const std::string& path,
                      const std::vector<std::pair<std::string, FairnessReport>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const size_t n = rows.empty() ? 0 : rows.front().second.client_scores.size();
  out << "method";
  for (size_t i = 0; i < n; ++i) out << ",score_" << i;
  out << ",avg,std,pearson_r,p_value,euclidean,cosine\n";
  for (const auto& [name, rep] : rows) {
    out << name;
    for (double s : rep.client_scores) out << ',' << format_number(s);
    out << ',' << format_number(rep.mean_score) << ',' << format_number(rep.std_dev) << ','
        << format_number(rep.pearson_r) << ',' << format_number(rep.p_value) << ','
        << format_number(rep.euclidean_distance) << ',' << format_number(rep.cosine_similarity)
        << '\n';
  }
}

void print_alignment_table(const std::vector<std::pair<std::string, AlignmentMetrics>>& rows) {
  std::printf("%-14s %9s %9s %9s %7s\n", "Method", "Pearson", "p-value", "Eucl.", "Cosine");
  for (const auto& [name, m] : rows)
    std::printf("%-14s %9.2f %9.2e %9.4f %7.4f\n", name.c_str(), 100.0 * m.pearson_r, m.p_value,
                m.euclidean_distance, m.cosine_similarity);
}

json alignment_to_json(const AlignmentMetrics& m) {
  json j;
  j["pearson_r"] = m.pearson_r;
  j["p_value"] = m.p_value;
  j["euclidean_distance"] = m.euclidean_distance;
  j["cosine_similarity"] = m.cosine_similarity;
  return j;
}

void write_valuation_json(const std::string& path, const ValuationResult& val,
                          const std::vector<std::pair<std::string, AlignmentMetrics>>& alignment) {
  const size_t n = val.sample_share.size();
  json clients = json::array();
  for (size_t i = 0; i < n; ++i) {
    json c;
    c["client_id"] = i;
    c["shapley"] = val.shapley.empty() ? json() : json(val.shapley[i]);
    c["loo_drop"] = val.loo_drop.empty() ? json() : json(val.loo_drop[i]);
    c["loo_share"] = val.loo_share.empty() ? json() : json(val.loo_share[i]);
    c["sample_share"] = val.sample_share[i];
    clients.push_back(c);
  }
  json root;
  root["clients"] = clients;
  if (!val.loo_drop.empty()) root["full_performance"] = val.full_performance;
  json al;
  for (const auto& [name, m] : alignment) al[name] = alignment_to_json(m);
  root["alignment"] = al;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << root.dump(2) << '\n';
}

// Oracle estimate of the configured algorithm plus the sample-proportion
// baseline, compared against oracle shares.
std::vector<std::pair<std::string, AlignmentMetrics>> build_alignment(
    const ExperimentConfig& config, const std::vector<ClientDataset>& clients,
    const Vec& oracle_shares, uint64_t run_seed) {
  Vec p(clients.size());
  for (size_t i = 0; i < clients.size(); ++i) p[i] = clients[i].p;

  std::vector<std::pair<std::string, AlignmentMetrics>> rows;
  rows.emplace_back("sample_share", estimate_vs_oracle(p, oracle_shares));

  if (config.algorithm != Algorithm::standalone && config.algorithm != Algorithm::fedavg) {
    const RunResult run = run_experiment(config.model, run_config(config, run_seed), clients);
    rows.emplace_back(to_string(config.algorithm),
                      estimate_vs_oracle(run.final_rho, oracle_shares));
  }
  return rows;
}

std::vector<ClientDataset> load_clients(const ExperimentConfig& config, uint64_t run_seed,
                                        const CliOptions& opts) {
  if (!opts.federation_import.empty()) {
    Task task;
    auto clients = read_federation(opts.federation_import, &task);
    if (task != config.federation.task)
      throw ConfigError("imported federation task does not match the config");
    return clients;
  }
  return generate_federation(federation_spec(config, run_seed));
}

}  // namespace

int cmd_run(const ExperimentConfig& config, const CliOptions& opts) {
  ensure_dir(config.output_dir);
  for (size_t si = 0; si < config.seeds.size(); ++si) {
    const uint64_t run_seed = config.seeds[si];
    const auto clients = load_clients(config, run_seed, opts);
    if (si == 0 && !opts.federation_export.empty())
      write_federation(opts.federation_export, clients, config.federation.task);

    const RunConfig run = run_config(config, run_seed);
    const RunResult result = run_experiment(config.model, run, clients);

    RunConfig run_std = run;
    run_std.algorithm = Algorithm::standalone;
    const RunResult standalone = run_experiment(config.model, run_std, clients);

    const Vec scores = method_test_scores(config.model, result, clients, config.algorithm);
    const Vec reference = standalone_test_scores(config.model, standalone.client_models, clients);

    std::vector<std::pair<std::string, FairnessReport>> rows;
    rows.emplace_back(to_string(config.algorithm), build_fairness_report(scores, reference));
    rows.emplace_back("standalone", build_fairness_report(reference, reference));

    const fs::path dir = fs::path(config.output_dir) / ("seed_" + std::to_string(run_seed));
    ensure_dir(dir);
    write_rounds_csv((dir / "rounds.csv").string(), result.round_logs);
    write_contributions_json((dir / "contributions.json").string(), result);
    write_freerider_csv((dir / "freerider.csv").string(), result.round_logs);
    write_report_csv((dir / "report.csv").string(), rows);
    if (config.algorithm == Algorithm::standalone) {
      for (size_t i = 0; i < result.client_models.size(); ++i)
        write_param_vector((dir / ("checkpoint_client" + std::to_string(i) + ".bin")).string(),
                           result.client_models[i]);
    } else {
      write_param_vector((dir / "checkpoint.bin").string(), result.final_model);
    }

    std::printf("== run seed %llu (%s, %d rounds) ==\n",
                static_cast<unsigned long long>(run_seed),
                to_string(config.algorithm).c_str(), config.rounds);
    print_score_table(rows);
    std::printf("final rho:");
    for (double r : result.final_rho) std::printf(" %.4f", r);
    std::printf("\nartifacts: %s\n", dir.string().c_str());
  }
  return kExitOk;
}

int cmd_shapley(const ExperimentConfig& config) {
  if (config.federation.n_clients > kMaxShapleyClients)
    throw ConfigError("shapley: exact enumeration is O(2^N); n_clients must be <= " +
                      std::to_string(kMaxShapleyClients));
  ensure_dir(config.output_dir);
  const uint64_t run_seed = config.seeds.front();
  const auto clients = generate_federation(federation_spec(config, run_seed));

  const ValuationResult val =
      shapley_valuation(config.model, run_config(config, run_seed), clients);
  const Vec oracle_shares = positive_shares(val.shapley);
  const auto alignment = build_alignment(config, clients, oracle_shares, run_seed);

  const std::string path = (fs::path(config.output_dir) / "valuation.json").string();
  write_valuation_json(path, val, alignment);

  std::printf("shapley values (seed %llu):\n", static_cast<unsigned long long>(run_seed));
  for (size_t i = 0; i < val.shapley.size(); ++i)
    std::printf("  client %zu: shapley %+0.6f  share %.4f  sample_share %.4f\n", i,
                val.shapley[i], oracle_shares[i], val.sample_share[i]);
  print_alignment_table(alignment);
  std::printf("artifacts: %s\n", path.c_str());
  return kExitOk;
}

int cmd_loo(const ExperimentConfig& config) {
  ensure_dir(config.output_dir);
  const uint64_t run_seed = config.seeds.front();
  const auto clients = generate_federation(federation_spec(config, run_seed));

  const ValuationResult val = leave_one_out(config.model, run_config(config, run_seed), clients);
  const auto alignment = build_alignment(config, clients, val.loo_share, run_seed);

  const std::string path = (fs::path(config.output_dir) / "valuation.json").string();
  write_valuation_json(path, val, alignment);

  std::printf("leave-one-out (seed %llu, full performance %.4f):\n",
              static_cast<unsigned long long>(run_seed), val.full_performance);
  std::printf("%-8s %12s %12s %14s %14s\n", "Client", "Perf w/o", "Drop", "Perf. Contrib",
              "Sample Contrib");
  for (size_t i = 0; i < val.loo_drop.size(); ++i)
    std::printf("%-8zu %12.4f %+12.4f %13.2f%% %13.2f%%\n", i, val.subset_performance[i],
                val.loo_drop[i], 100.0 * val.loo_share[i], 100.0 * val.sample_share[i]);
  print_alignment_table(alignment);
  std::printf("artifacts: %s\n", path.c_str());
  return kExitOk;
}

int cmd_freerider(const ExperimentConfig& config) {
  if (config.algorithm == Algorithm::standalone)
    throw ConfigError("freerider: standalone has no aggregation to study");
  ensure_dir(config.output_dir);
  const uint64_t run_seed = config.seeds.front();
  const int n = config.federation.n_clients;

  // one independent federated training per free-rider position
  std::vector<RunResult> results(n);
  parallel_for(static_cast<size_t>(n), [&](size_t pos) {
    FederationSpec spec = federation_spec(config, run_seed);
    spec.free_rider = FreeRiderSpec{static_cast<int>(pos), config.freerider.repeat};
    const auto clients = generate_federation(spec);
    results[pos] = run_experiment(config.model, run_config(config, run_seed), clients);
  });

  const fs::path path = fs::path(config.output_dir) / "freerider_matrix.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "free_rider,round,client_id,score\n";
  for (int pos = 0; pos < n; ++pos)
    for (const auto& log : results[pos].round_logs)
      out << pos << ',' << log.round << ',' << log.client_id << ','
          << format_number(log.free_rider_score) << '\n';

  std::printf("free-rider study (%d positions, repeat %d):\n", n, config.freerider.repeat);
  for (int pos = 0; pos < n; ++pos) {
    int detected_round = -1;
    for (int k = 0; k < config.rounds; ++k) {
      const auto* logs = &results[pos].round_logs[static_cast<size_t>(k) * n];
      int argmax = 0;
      for (int i = 1; i < n; ++i)
        if (logs[i].free_rider_score > logs[argmax].free_rider_score) argmax = i;
      if (argmax == pos && logs[argmax].free_rider_score > 0.0) {
        detected_round = k;
        break;
      }
    }
    std::printf("  free rider at client %d: first flagged at round %d\n", pos, detected_round);
  }
  std::printf("artifacts: %s\n", path.string().c_str());
  return kExitOk;
}

int cmd_theory(const ExperimentConfig& config) {
  ensure_dir(config.output_dir);
  const auto& seeds = config.theory.seeds.empty() ? config.seeds : config.theory.seeds;

  // convergence curves
  const std::vector<Algorithm> algos{Algorithm::fedavg, Algorithm::fedce_multi,
                                     Algorithm::fedce_sum};
  const auto curves = convergence_compare(config.model, run_config(config, config.seeds.front()),
                                          config.federation, algos, seeds);
  std::vector<ConvergenceRow> conv_rows;
  for (const auto& curve : curves)
    for (size_t k = 0; k < curve.mean_val_score.size(); ++k)
      conv_rows.push_back({static_cast<int>(k), to_string(curve.algorithm), curve.seed,
                           curve.mean_val_score[k]});
  write_convergence_csv((fs::path(config.output_dir) / "convergence.csv").string(), conv_rows);

  // distribution-shift robustness
  if (!config.federation.outlier_client)
    throw ConfigError("theory: shift check needs federation.outlier_client");
  json shift_entries = json::array();
  for (uint64_t seed : seeds) {
    const auto clients = generate_federation(federation_spec(config, seed));
    RunConfig run = run_config(config, seed);
    if (run.algorithm == Algorithm::standalone || run.algorithm == Algorithm::fedavg)
      run.algorithm = Algorithm::fedce_multi;
    const auto check =
        shift_robustness_check(config.model, run, clients, *config.federation.outlier_client);
    json e;
    e["seed"] = seed;
    e["surviving_clients"] = check.surviving_clients;
    e["estimate_renormalized"] = check.estimate_renormalized;
    e["estimate_reduced"] = check.estimate_reduced;
    Vec delta_pp = scale(check.abs_change, 100.0);
    e["delta_pp"] = delta_pp;
    e["max_delta_pp"] = 100.0 * check.max_abs_change;
    e["wasserstein_distance"] = check.wasserstein;
    shift_entries.push_back(e);
    std::printf("shift check seed %llu: max |delta| %.3f pp, W1 %.4f\n",
                static_cast<unsigned long long>(seed), 100.0 * check.max_abs_change,
                check.wasserstein);
  }
  json shift_root;
  shift_root["removed_client"] = *config.federation.outlier_client;
  shift_root["seeds"] = shift_entries;
  {
    std::ofstream out(fs::path(config.output_dir) / "shift_check.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write shift_check.json");
    out << shift_root.dump(2) << '\n';
  }

  // rho trace of the configured algorithm on the first seed
  {
    const uint64_t seed = config.seeds.front();
    const auto clients = generate_federation(federation_spec(config, seed));
    const RunConfig run = run_config(config, seed);
    const RunResult result = run_experiment(config.model, run, clients);
    const auto trace = rho_bound_trace(result, run);
    write_rho_trace_csv((fs::path(config.output_dir) / "rho_trace.csv").string(), trace);
  }

  std::printf("artifacts: %s/{convergence.csv, shift_check.json, rho_trace.csv}\n",
              config.output_dir.c_str());
  return kExitOk;
}

int cmd_report(const ExperimentConfig& config) {
  ensure_dir(config.output_dir);
  const uint64_t run_seed = config.seeds.front();
  const auto clients = generate_federation(federation_spec(config, run_seed));

  const std::vector<Algorithm> algos{Algorithm::standalone, Algorithm::fedavg,
                                     Algorithm::fedce_multi, Algorithm::fedce_sum};
  std::vector<RunResult> results(algos.size());
  parallel_for(algos.size(), [&](size_t i) {
    RunConfig run = run_config(config, run_seed);
    run.algorithm = algos[i];
    results[i] = run_experiment(config.model, run, clients);
  });

  const Vec reference =
      standalone_test_scores(config.model, results[0].client_models, clients);
  std::vector<std::pair<std::string, FairnessReport>> rows;
  for (size_t i = 0; i < algos.size(); ++i) {
    const Vec scores = method_test_scores(config.model, results[i], clients, algos[i]);
    rows.emplace_back(to_string(algos[i]), build_fairness_report(scores, reference));
  }

  write_report_csv((fs::path(config.output_dir) / "report.csv").string(), rows);
  print_score_table(rows);
  return kExitOk;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    json err;
    err["error"] = {{"kind", "config"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    json err;
    err["error"] = {{"kind", "runtime"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace fedce
