#include "fedce/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedce/rng.hpp"

namespace fedce {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, const std::string& scope,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      fail("unknown key: " + (scope.empty() ? key : scope + "." + key));
  }
}

template <typename T>
T get_or(const json& obj, const std::string& scope, const std::string& key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail("invalid value for " + (scope.empty() ? key : scope + "." + key));
  }
}

ClientShift parse_shift(const json& j, const std::string& scope) {
  if (!j.is_object()) fail(scope + " entries must be objects");
  check_keys(j, scope, {"mean_offset", "rotation", "contrast", "noise_scale"});
  ClientShift s;
  s.mean_offset = get_or(j, scope, "mean_offset", s.mean_offset);
  s.rotation = get_or(j, scope, "rotation", s.rotation);
  s.contrast = get_or(j, scope, "contrast", s.contrast);
  s.noise_scale = get_or(j, scope, "noise_scale", s.noise_scale);
  return s;
}

FederationSpec parse_federation(const json& j) {
  const std::string scope = "federation";
  check_keys(j, scope,
             {"n_clients", "samples_per_client", "task", "feature_dim", "grid", "client_shift",
              "outlier_client", "outlier_scale", "free_rider", "derive_client_seeds", "seed",
              "split"});
  FederationSpec spec;
  spec.n_clients = get_or(j, scope, "n_clients", spec.n_clients);
  if (j.contains("task")) {
    try {
      spec.task = task_from_string(j.at("task").get<std::string>());
    } catch (const std::exception& e) {
      fail(std::string("federation.task: ") + e.what());
    }
  }
  spec.feature_dim = get_or(j, scope, "feature_dim", spec.feature_dim);
  spec.grid = get_or(j, scope, "grid", spec.grid);

  if (j.contains("samples_per_client") && !j.at("samples_per_client").is_null()) {
    const auto& s = j.at("samples_per_client");
    try {
      if (s.is_number_integer()) {
        spec.samples_per_client.assign(spec.n_clients, s.get<int>());
      } else if (s.is_array()) {
        spec.samples_per_client = s.get<std::vector<int>>();
      } else {
        fail("federation.samples_per_client must be an integer or an array");
      }
    } catch (const json::exception&) {
      fail("invalid value for federation.samples_per_client");
    }
  } else {
    spec.samples_per_client.assign(spec.n_clients, 48);
  }

  if (j.contains("client_shift") && !j.at("client_shift").is_null()) {
    if (!j.at("client_shift").is_array()) fail("federation.client_shift must be an array");
    for (const auto& e : j.at("client_shift"))
      spec.client_shift.push_back(parse_shift(e, "federation.client_shift"));
  }
  if (j.contains("outlier_client") && !j.at("outlier_client").is_null())
    spec.outlier_client = get_or(j, scope, "outlier_client", 0);
  spec.outlier_scale = get_or(j, scope, "outlier_scale", spec.outlier_scale);
  if (j.contains("free_rider") && !j.at("free_rider").is_null()) {
    const auto& fr = j.at("free_rider");
    check_keys(fr, "federation.free_rider", {"client", "repeat"});
    FreeRiderSpec f;
    f.client = get_or(fr, "federation.free_rider", "client", f.client);
    f.repeat = get_or(fr, "federation.free_rider", "repeat", f.repeat);
    spec.free_rider = f;
  }
  spec.derive_client_seeds = get_or(j, scope, "derive_client_seeds", spec.derive_client_seeds);
  spec.seed = get_or(j, scope, "seed", spec.seed);
  if (j.contains("split") && !j.at("split").is_null()) {
    const auto& sp = j.at("split");
    check_keys(sp, "federation.split", {"train", "val", "test"});
    spec.split.train = get_or(sp, "federation.split", "train", spec.split.train);
    spec.split.val = get_or(sp, "federation.split", "val", spec.split.val);
    spec.split.test = get_or(sp, "federation.split", "test", spec.split.test);
  }
  return spec;
}

ModelSpec parse_model(const json& j, const FederationSpec& fed) {
  const std::string scope = "model";
  check_keys(j, scope, {"family", "input_dim", "hidden", "grid"});
  ModelSpec m;
  // defaults follow the federation's task
  m.family = fed.task == Task::classification ? ModelFamily::logistic : ModelFamily::pixel_seg;
  if (j.contains("family")) {
    try {
      m.family = model_family_from_string(j.at("family").get<std::string>());
    } catch (const std::exception& e) {
      fail(std::string("model.family: ") + e.what());
    }
  }
  m.grid = get_or(j, scope, "grid", fed.grid);
  const int default_input =
      m.family == ModelFamily::pixel_seg ? m.grid * m.grid : fed.feature_dim;
  m.input_dim = get_or(j, scope, "input_dim", default_input);
  m.hidden = get_or(j, scope, "hidden", m.hidden);
  return m;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("config root must be an object");
  check_keys(root, "",
             {"federation", "model", "algorithm", "rounds", "local_steps", "client_lr",
              "server_lr", "seeds", "output_dir", "freerider", "theory"});

  ExperimentConfig cfg;
  cfg.federation = parse_federation(root.contains("federation") ? root.at("federation")
                                                                : json::object());
  cfg.model = parse_model(root.contains("model") ? root.at("model") : json::object(),
                          cfg.federation);
  if (root.contains("algorithm")) {
    try {
      cfg.algorithm = algorithm_from_string(root.at("algorithm").get<std::string>());
    } catch (const std::exception& e) {
      fail(std::string("algorithm: ") + e.what());
    }
  }
  cfg.rounds = get_or(root, "", "rounds", cfg.rounds);
  cfg.local_steps = get_or(root, "", "local_steps", cfg.local_steps);
  cfg.client_lr = get_or(root, "", "client_lr", cfg.client_lr);
  cfg.server_lr = get_or(root, "", "server_lr", cfg.server_lr);
  if (root.contains("seeds")) {
    if (!root.at("seeds").is_array()) fail("seeds must be an array");
    try {
      cfg.seeds = root.at("seeds").get<std::vector<uint64_t>>();
    } catch (const json::exception&) {
      fail("invalid value for seeds");
    }
  }
  cfg.output_dir = get_or(root, "", "output_dir", cfg.output_dir);
  if (root.contains("freerider")) {
    const auto& fr = root.at("freerider");
    check_keys(fr, "freerider", {"repeat"});
    cfg.freerider.repeat = get_or(fr, "freerider", "repeat", cfg.freerider.repeat);
  }
  if (root.contains("theory")) {
    const auto& th = root.at("theory");
    check_keys(th, "theory", {"seeds"});
    if (th.contains("seeds")) {
      try {
        cfg.theory.seeds = th.at("seeds").get<std::vector<uint64_t>>();
      } catch (const json::exception&) {
        fail("invalid value for theory.seeds");
      }
    }
  }

  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("config file not found: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate(const ExperimentConfig& config) {
  try {
    fedce::validate(config.federation);
  } catch (const std::exception& e) {
    fail(std::string("federation: ") + e.what());
  }
  if (config.rounds < 1) fail("rounds must be >= 1");
  if (config.local_steps < 1) fail("local_steps must be >= 1");
  if (config.client_lr <= 0.0) fail("client_lr must be > 0");
  if (config.seeds.empty()) fail("seeds must contain at least one entry");

  const bool classification = config.federation.task == Task::classification;
  if (classification && config.model.family == ModelFamily::pixel_seg)
    fail("model.family pixel_seg requires a segmentation federation");
  if (!classification && config.model.family != ModelFamily::pixel_seg)
    fail("segmentation federations require model.family pixel_seg");
  if (classification && config.model.input_dim != config.federation.feature_dim)
    fail("model.input_dim must equal federation.feature_dim");
  if (!classification && config.model.grid != config.federation.grid)
    fail("model.grid must equal federation.grid");
  if (config.model.family == ModelFamily::pixel_seg &&
      config.model.input_dim != config.model.grid * config.model.grid)
    fail("model.input_dim must equal model.grid^2 for pixel_seg");
  if (config.model.family == ModelFamily::mlp1 && config.model.hidden < 1)
    fail("model.hidden must be >= 1");
}

std::string serialize_config(const ExperimentConfig& c) {
  json root;
  json fed;
  fed["n_clients"] = c.federation.n_clients;
  fed["samples_per_client"] = c.federation.samples_per_client;
  fed["task"] = to_string(c.federation.task);
  fed["feature_dim"] = c.federation.feature_dim;
  fed["grid"] = c.federation.grid;
  if (!c.federation.client_shift.empty()) {
    json shifts = json::array();
    for (const auto& s : c.federation.client_shift) {
      json e;
      e["mean_offset"] = s.mean_offset;
      e["rotation"] = s.rotation;
      e["contrast"] = s.contrast;
      e["noise_scale"] = s.noise_scale;
      shifts.push_back(e);
    }
    fed["client_shift"] = shifts;
  }
  if (c.federation.outlier_client) fed["outlier_client"] = *c.federation.outlier_client;
  fed["outlier_scale"] = c.federation.outlier_scale;
  if (c.federation.free_rider) {
    json fr;
    fr["client"] = c.federation.free_rider->client;
    fr["repeat"] = c.federation.free_rider->repeat;
    fed["free_rider"] = fr;
  }
  fed["derive_client_seeds"] = c.federation.derive_client_seeds;
  fed["seed"] = c.federation.seed;
  json split;
  split["train"] = c.federation.split.train;
  split["val"] = c.federation.split.val;
  split["test"] = c.federation.split.test;
  fed["split"] = split;
  root["federation"] = fed;

  json model;
  model["family"] = to_string(c.model.family);
  model["input_dim"] = c.model.input_dim;
  model["hidden"] = c.model.hidden;
  model["grid"] = c.model.grid;
  root["model"] = model;

  root["algorithm"] = to_string(c.algorithm);
  root["rounds"] = c.rounds;
  root["local_steps"] = c.local_steps;
  root["client_lr"] = c.client_lr;
  root["server_lr"] = c.server_lr;
  root["seeds"] = c.seeds;
  root["output_dir"] = c.output_dir;
  json fr;
  fr["repeat"] = c.freerider.repeat;
  root["freerider"] = fr;
  json th;
  th["seeds"] = c.theory.seeds;
  root["theory"] = th;
  return root.dump(2) + "\n";
}

uint64_t federation_seed(const ExperimentConfig& config, uint64_t run_seed) {
  return config.federation.seed ^ splitmix64(run_seed);
}

uint64_t model_seed(uint64_t run_seed) { return splitmix64(run_seed ^ 0x6a09e667f3bcc908ULL); }

RunConfig run_config(const ExperimentConfig& config, uint64_t run_seed) {
  RunConfig run;
  run.algorithm = config.algorithm;
  run.rounds = config.rounds;
  run.local_steps = config.local_steps;
  run.client_lr = config.client_lr;
  run.server_lr = config.server_lr;
  run.seed = model_seed(run_seed);
  return run;
}

FederationSpec federation_spec(const ExperimentConfig& config, uint64_t run_seed) {
  FederationSpec spec = config.federation;
  spec.seed = federation_seed(config, run_seed);
  return spec;
}

}  // namespace fedce
