#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fedce/types.hpp"

namespace fedce {

// Per-client distribution parameters. Classification uses mean_offset /
// rotation / noise_scale; segmentation uses mean_offset (intensity bias),
// contrast and noise_scale.
struct ClientShift {
  double mean_offset = 1.0;
  double rotation = 0.0;
  double contrast = 1.0;
  double noise_scale = 1.0;

  bool operator==(const ClientShift&) const = default;
};

struct FreeRiderSpec {
  int client = 0;
  int repeat = 50;

  bool operator==(const FreeRiderSpec&) const = default;
};

struct SplitRatios {
  double train = 0.5;
  double val = 0.25;
  double test = 0.25;

  bool operator==(const SplitRatios&) const = default;
};

struct FederationSpec {
  int n_clients = 6;
  std::vector<int> samples_per_client;  // one entry per client
  Task task = Task::segmentation;
  int feature_dim = 4;  // classification feature length f
  int grid = 8;         // segmentation grid side g (features = g*g)
  std::vector<ClientShift> client_shift;  // empty -> defaults per client
  std::optional<int> outlier_client;
  double outlier_scale = 4.0;  // multiplier on the outlier's mean offset
  std::optional<FreeRiderSpec> free_rider;
  bool derive_client_seeds = true;  // false -> all clients share one stream
  uint64_t seed = 0;
  SplitRatios split;

  bool operator==(const FederationSpec&) const = default;
};

// Shift parameters used when FederationSpec::client_shift is empty:
// clients sit on a ring (classification) or an intensity ramp (segmentation);
// the outlier gets mean_offset = outlier_scale * base magnitude.
std::vector<ClientShift> default_shifts(const FederationSpec& spec);

// Throws std::invalid_argument on any invariant violation.
void validate(const FederationSpec& spec);

std::vector<ClientDataset> generate_federation(const FederationSpec& spec);

struct SplitResult {
  std::vector<Sample> train;
  std::vector<Sample> val;
  std::vector<Sample> test;
};

// Deterministic shuffled split. Counts are floor(r*n) per part with the
// remainder assigned to train; the three parts partition the input exactly.
SplitResult split_client(const std::vector<Sample>& samples, const SplitRatios& ratios,
                         uint64_t seed);

// Train set holds `repeat` copies of the base sample; val and test hold one
// copy each. client_id and p are filled in by the caller.
ClientDataset make_free_rider(const Sample& base, int repeat);

// Recompute p from train counts after editing a federation by hand.
void assign_proportions(std::vector<ClientDataset>& clients);

// Drop one client, renumber ids to 0..N-2 and renormalize p.
std::vector<ClientDataset> remove_client(const std::vector<ClientDataset>& clients,
                                         int client_id);

// Versioned line-delimited record file, for reuse across runs.
void write_federation(const std::string& path, const std::vector<ClientDataset>& clients,
                      Task task);
std::vector<ClientDataset> read_federation(const std::string& path, Task* task_out = nullptr);

}  // namespace fedce
