#include "fedce/types.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fedce {

std::string to_string(Task task) {
  return task == Task::classification ? "classification" : "segmentation";
}

Task task_from_string(const std::string& s) {
  if (s == "classification") return Task::classification;
  if (s == "segmentation") return Task::segmentation;
  throw std::invalid_argument("unknown task: " + s);
}

static void check_same_size(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("vector dimension mismatch: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
}

double dot(const Vec& a, const Vec& b) {
  check_same_size(a, b);
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

double sum(const Vec& a) { return std::accumulate(a.begin(), a.end(), 0.0); }

double mean(const Vec& a) {
  if (a.empty()) throw std::invalid_argument("mean of empty vector");
  return sum(a) / static_cast<double>(a.size());
}

Vec add(const Vec& a, const Vec& b) {
  check_same_size(a, b);
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec sub(const Vec& a, const Vec& b) {
  check_same_size(a, b);
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec scale(const Vec& a, double c) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
  return r;
}

void axpy(Vec& y, double c, const Vec& x) {
  check_same_size(y, x);
  for (size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

}  // namespace fedce
