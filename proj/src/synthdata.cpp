#include "fedce/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fedce/rng.hpp"

namespace fedce {

using json = nlohmann::ordered_json;

std::vector<ClientShift> default_shifts(const FederationSpec& spec) {
  const int n = spec.n_clients;
  std::vector<ClientShift> shifts(n);
  for (int i = 0; i < n; ++i) {
    if (spec.task == Task::classification) {
      shifts[i].mean_offset = 1.0;
      shifts[i].rotation = 0.2 * (i - 0.5 * (n - 1));
      shifts[i].noise_scale = 1.0;
    } else {
      // blob-center displacement in relative units (1.0 = half the grid);
      // directions come from the client's slot on a ring
      shifts[i].mean_offset = 0.2;
      shifts[i].contrast = 1.0;
      shifts[i].noise_scale = 1.0;
    }
  }
  return shifts;
}

void validate(const FederationSpec& spec) {
  if (spec.n_clients < 2)
    throw std::invalid_argument("federation needs at least 2 clients, got " +
                                std::to_string(spec.n_clients));
  if (static_cast<int>(spec.samples_per_client.size()) != spec.n_clients)
    throw std::invalid_argument("samples_per_client must have one entry per client");
  for (int count : spec.samples_per_client)
    if (count < 4)
      throw std::invalid_argument("samples_per_client entries must be >= 4 (split infeasible)");
  if (!spec.client_shift.empty() &&
      static_cast<int>(spec.client_shift.size()) != spec.n_clients)
    throw std::invalid_argument("client_shift must be empty or have one entry per client");
  if (spec.outlier_client && (*spec.outlier_client < 0 || *spec.outlier_client >= spec.n_clients))
    throw std::invalid_argument("outlier_client out of range");
  if (spec.free_rider) {
    if (spec.free_rider->client < 0 || spec.free_rider->client >= spec.n_clients)
      throw std::invalid_argument("free_rider client out of range");
    if (spec.free_rider->repeat < 1) throw std::invalid_argument("free_rider repeat must be >= 1");
  }
  if (spec.task == Task::classification && spec.feature_dim < 2)
    throw std::invalid_argument("classification needs feature_dim >= 2");
  if (spec.task == Task::segmentation && spec.grid < 2)
    throw std::invalid_argument("segmentation needs grid >= 2");
}

namespace {

// Effective shifts with the outlier's mean offset amplified to
// outlier_scale times the largest configured magnitude.
std::vector<ClientShift> effective_shifts(const FederationSpec& spec) {
  auto shifts = spec.client_shift.empty() ? default_shifts(spec) : spec.client_shift;
  if (spec.outlier_client) {
    double base = 0.0;
    for (const auto& s : shifts) base = std::max(base, std::fabs(s.mean_offset));
    if (base < 1e-12) base = 1.0;
    shifts[*spec.outlier_client].mean_offset = spec.outlier_scale * base;
  }
  return shifts;
}

Sample draw_classification_sample(const FederationSpec& spec, const ClientShift& shift,
                                  bool is_outlier, int client_index, Rng& rng) {
  const int f = spec.feature_dim;
  Sample s;
  s.features.resize(f);
  s.label = rng.bit();

  const double class_sep = 1.5;
  const double u = class_sep / std::sqrt(static_cast<double>(f));
  const double sign = s.label == 1 ? 1.0 : -1.0;
  for (int j = 0; j < f; ++j) s.features[j] = sign * u + shift.noise_scale * rng.normal();

  // client-specific rotation in the first two feature dims
  const double c = std::cos(shift.rotation), sn = std::sin(shift.rotation);
  const double x0 = s.features[0], x1 = s.features[1];
  s.features[0] = c * x0 - sn * x1;
  s.features[1] = sn * x0 + c * x1;

  // mean displacement: non-outliers sit on a ring, the outlier goes
  // straight along the first axis so its projection separates cleanly
  if (is_outlier) {
    s.features[0] += shift.mean_offset;
  } else {
    const double phi = 2.0 * M_PI * client_index / spec.n_clients;
    s.features[0] += shift.mean_offset * std::cos(phi);
    s.features[1] += shift.mean_offset * std::sin(phi);
  }
  return s;
}

// Blob segmentation grids. A client's blob centers are displaced from the
// grid center by mean_offset (relative units, direction = the client's slot
// on a ring); the outlier is displaced straight toward the top-left corner,
// so cells near that corner see foreground only in the outlier's data.
Sample draw_segmentation_sample(const FederationSpec& spec, const ClientShift& shift,
                                bool is_outlier, int client_index, Rng& rng) {
  const int g = spec.grid;
  const double fg = 1.0, bg = -1.0, sigma = 0.25;
  Sample s;
  s.features.resize(g * g);
  s.mask.resize(g * g);

  double dir_x, dir_y;
  if (is_outlier) {
    dir_x = -M_SQRT1_2;
    dir_y = -M_SQRT1_2;
  } else {
    const double phi = 2.0 * M_PI * client_index / spec.n_clients;
    dir_x = std::cos(phi);
    dir_y = std::sin(phi);
  }
  const double displacement = shift.mean_offset * 0.5 * g;
  const double cx = std::clamp(0.5 * g + displacement * dir_x + rng.uniform(-0.075 * g, 0.075 * g),
                               0.5, g - 0.5);
  const double cy = std::clamp(0.5 * g + displacement * dir_y + rng.uniform(-0.075 * g, 0.075 * g),
                               0.5, g - 0.5);
  const double r = rng.uniform(0.15 * g, 0.25 * g);

  for (int row = 0; row < g; ++row) {
    for (int col = 0; col < g; ++col) {
      const int j = row * g + col;
      const double dx = col + 0.5 - cx, dy = row + 0.5 - cy;
      const bool inside = dx * dx + dy * dy <= r * r;
      s.mask[j] = inside ? 1 : 0;
      const double base = (inside ? fg : bg) + sigma * shift.noise_scale * rng.normal();
      s.features[j] = shift.contrast * base;
    }
  }
  return s;
}

}  // namespace

SplitResult split_client(const std::vector<Sample>& samples, const SplitRatios& ratios,
                         uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("split_client: empty input");
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0)
    throw std::invalid_argument("split_client: negative ratio");
  if (std::fabs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
    throw std::invalid_argument("split_client: ratios must sum to 1");
  if (samples.size() < 4) throw std::invalid_argument("split_client: need at least 4 samples");

  const size_t n = samples.size();
  size_t n_train = static_cast<size_t>(std::floor(ratios.train * n));
  const size_t n_val = static_cast<size_t>(std::floor(ratios.val * n));
  const size_t n_test = static_cast<size_t>(std::floor(ratios.test * n));
  n_train += n - (n_train + n_val + n_test);  // remainder to train

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  shuffle(order, rng);

  SplitResult result;
  result.train.reserve(n_train);
  result.val.reserve(n_val);
  result.test.reserve(n_test);
  size_t pos = 0;
  for (size_t i = 0; i < n_train; ++i) result.train.push_back(samples[order[pos++]]);
  for (size_t i = 0; i < n_val; ++i) result.val.push_back(samples[order[pos++]]);
  for (size_t i = 0; i < n_test; ++i) result.test.push_back(samples[order[pos++]]);
  return result;
}

ClientDataset make_free_rider(const Sample& base, int repeat) {
  if (repeat < 1) throw std::invalid_argument("make_free_rider: repeat must be >= 1");
  ClientDataset ds;
  ds.train.assign(static_cast<size_t>(repeat), base);
  ds.val.assign(1, base);
  ds.test.assign(1, base);
  return ds;
}

void assign_proportions(std::vector<ClientDataset>& clients) {
  double total = 0.0;
  for (const auto& c : clients) total += static_cast<double>(c.train.size());
  if (total <= 0.0) throw std::invalid_argument("assign_proportions: no training samples");
  for (auto& c : clients) c.p = static_cast<double>(c.train.size()) / total;
}

std::vector<ClientDataset> generate_federation(const FederationSpec& spec) {
  validate(spec);
  const auto shifts = effective_shifts(spec);

  std::vector<ClientDataset> clients(spec.n_clients);
  for (int i = 0; i < spec.n_clients; ++i) {
    const uint64_t cseed =
        spec.derive_client_seeds ? spec.seed ^ splitmix64(static_cast<uint64_t>(i)) : spec.seed;
    Rng rng(cseed);

    const bool is_outlier = spec.outlier_client && *spec.outlier_client == i;
    std::vector<Sample> samples;
    samples.reserve(spec.samples_per_client[i]);
    for (int t = 0; t < spec.samples_per_client[i]; ++t) {
      samples.push_back(spec.task == Task::classification
                            ? draw_classification_sample(spec, shifts[i], is_outlier, i, rng)
                            : draw_segmentation_sample(spec, shifts[i], is_outlier, i, rng));
    }

    ClientDataset& ds = clients[i];
    if (spec.free_rider && spec.free_rider->client == i) {
      ds = make_free_rider(samples.front(), spec.free_rider->repeat);
    } else {
      auto split = split_client(samples, spec.split, splitmix64(cseed ^ 0xa0761d6478bd642fULL));
      ds.train = std::move(split.train);
      ds.val = std::move(split.val);
      ds.test = std::move(split.test);
    }
    ds.client_id = i;
  }

  assign_proportions(clients);
  return clients;
}

std::vector<ClientDataset> remove_client(const std::vector<ClientDataset>& clients,
                                         int client_id) {
  std::vector<ClientDataset> reduced;
  reduced.reserve(clients.size());
  for (const auto& c : clients)
    if (c.client_id != client_id) reduced.push_back(c);
  if (reduced.size() == clients.size())
    throw std::invalid_argument("remove_client: no client with id " + std::to_string(client_id));
  for (size_t i = 0; i < reduced.size(); ++i) reduced[i].client_id = static_cast<int>(i);
  assign_proportions(reduced);
  return reduced;
}

namespace {

json sample_to_json(const Sample& s, Task task) {
  json j;
  j["x"] = s.features;
  if (task == Task::classification) {
    j["y"] = s.label;
  } else {
    j["mask"] = s.mask;
  }
  return j;
}

Sample sample_from_json(const json& j, Task task) {
  Sample s;
  s.features = j.at("x").get<std::vector<double>>();
  if (task == Task::classification) {
    s.label = j.at("y").get<int>();
  } else {
    s.mask = j.at("mask").get<std::vector<uint8_t>>();
  }
  return s;
}

json samples_to_json(const std::vector<Sample>& v, Task task) {
  json arr = json::array();
  for (const auto& s : v) arr.push_back(sample_to_json(s, task));
  return arr;
}

std::vector<Sample> samples_from_json(const json& arr, Task task) {
  std::vector<Sample> v;
  v.reserve(arr.size());
  for (const auto& j : arr) v.push_back(sample_from_json(j, task));
  return v;
}

}  // namespace

void write_federation(const std::string& path, const std::vector<ClientDataset>& clients,
                      Task task) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  json header;
  header["format"] = "fedce-federation";
  header["version"] = 1;
  header["task"] = to_string(task);
  header["n_clients"] = clients.size();
  out << header.dump() << '\n';
  for (const auto& c : clients) {
    json j;
    j["client_id"] = c.client_id;
    j["p"] = c.p;
    j["train"] = samples_to_json(c.train, task);
    j["val"] = samples_to_json(c.val, task);
    j["test"] = samples_to_json(c.test, task);
    out << j.dump() << '\n';
  }
}

std::vector<ClientDataset> read_federation(const std::string& path, Task* task_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open federation file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty federation file: " + path);
  const json header = json::parse(line);
  if (header.at("format").get<std::string>() != "fedce-federation")
    throw std::runtime_error("not a federation record file: " + path);
  if (header.at("version").get<int>() != 1)
    throw std::runtime_error("unsupported federation file version");
  const Task task = task_from_string(header.at("task").get<std::string>());
  if (task_out) *task_out = task;

  std::vector<ClientDataset> clients;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    ClientDataset c;
    c.client_id = j.at("client_id").get<int>();
    c.p = j.at("p").get<double>();
    c.train = samples_from_json(j.at("train"), task);
    c.val = samples_from_json(j.at("val"), task);
    c.test = samples_from_json(j.at("test"), task);
    clients.push_back(std::move(c));
  }
  if (clients.size() != header.at("n_clients").get<size_t>())
    throw std::runtime_error("federation file truncated: " + path);
  return clients;
}

}  // namespace fedce
