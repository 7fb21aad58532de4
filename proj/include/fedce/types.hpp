#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fedce {

using Vec = std::vector<double>;

// Flat model parameter vector of fixed dimension d.
using ParamVector = Vec;
// Parameter delta, convention: post-update minus pre-update parameters.
using PseudoGradient = Vec;

enum class Task { classification, segmentation };

std::string to_string(Task task);
Task task_from_string(const std::string& s);

// One labeled example. Classification uses `label`; segmentation uses `mask`
// (grid*grid cells, row-major, entries 0/1) and leaves `label` at -1.
struct Sample {
  std::vector<double> features;
  int label = -1;
  std::vector<uint8_t> mask;

  bool operator==(const Sample& other) const = default;
};

struct ClientDataset {
  int client_id = 0;
  std::vector<Sample> train;
  std::vector<Sample> val;
  std::vector<Sample> test;
  double p = 0.0;  // sample-proportion weight; sums to 1 across the federation

  bool operator==(const ClientDataset& other) const = default;
};

// Small dense-vector helpers shared by the whole simulator.
double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
double sum(const Vec& a);
double mean(const Vec& a);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, double c);
void axpy(Vec& y, double c, const Vec& x);  // y += c*x

}  // namespace fedce
