#include "fedce/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedce {

double dice_coefficient(const std::vector<uint8_t>& pred_mask,
                        const std::vector<uint8_t>& gt_mask) {
  if (pred_mask.size() != gt_mask.size())
    throw std::invalid_argument("dice_coefficient: mask shape mismatch");
  long inter = 0, psum = 0, gsum = 0;
  for (size_t j = 0; j < pred_mask.size(); ++j) {
    const int p = pred_mask[j] ? 1 : 0;
    const int g = gt_mask[j] ? 1 : 0;
    inter += p & g;
    psum += p;
    gsum += g;
  }
  if (psum + gsum == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(psum + gsum);
}

namespace {

constexpr double kBetaTol = 1e-12;
constexpr int kBetaMaxIter = 200000;

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Continued fraction for I_x(a,b), modified Lentz.
double ibeta_cf(double x, double a, double b) {
  const double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double result = d;
  for (int m = 1; m <= kBetaMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    result *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double mult = d * c;
    result *= mult;
    if (std::fabs(mult - 1.0) <= kBetaTol) break;
  }
  return result;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0) || a <= 0.0 || b <= 0.0)
    throw std::invalid_argument("regularized_incomplete_beta: domain error");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * ibeta_cf(x, a, b) / a;
  return 1.0 - std::exp(b * std::log(1.0 - x) + a * std::log(x) - log_beta(a, b)) *
                   ibeta_cf(1.0 - x, b, a) / b;
}

double student_t_cdf(double t, double dof) {
  if (dof <= 0.0) throw std::invalid_argument("student_t_cdf: dof must be positive");
  const double x = dof / (t * t + dof);
  const double half_tail = 0.5 * regularized_incomplete_beta(x, 0.5 * dof, 0.5);
  return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

double pearson_p_value(double r, int n) {
  if (n < 3) throw std::invalid_argument("pearson_p_value: need n >= 3");
  const double r2 = std::min(r * r, 1.0 - 1e-15);
  const double dof = n - 2;
  const double t = std::fabs(r) * std::sqrt(dof / (1.0 - r2));
  // two-tailed: P(|T| >= t) = I_{dof/(dof+t^2)}(dof/2, 1/2)
  return regularized_incomplete_beta(dof / (dof + t * t), 0.5 * dof, 0.5);
}

PearsonResult pearson(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  const int n = static_cast<int>(x.size());
  if (n < 3) throw std::invalid_argument("pearson: need n >= 3");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw std::invalid_argument("pearson: zero variance");
  PearsonResult res;
  res.r = sxy / std::sqrt(sxx * syy);
  res.r = std::clamp(res.r, -1.0, 1.0);
  res.p_value = pearson_p_value(res.r, n);
  return res;
}

double euclidean(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("euclidean: length mismatch");
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double cosine_sim(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("cosine_sim: length mismatch");
  const double nx = norm(x), ny = norm(y);
  if (nx <= 0.0 || ny <= 0.0) throw std::invalid_argument("cosine_sim: zero norm");
  return dot(x, y) / (nx * ny);
}

double client_std(const Vec& scores) {
  const int n = static_cast<int>(scores.size());
  if (n < 2) throw std::invalid_argument("client_std: need n >= 2");
  const double m = mean(scores);
  double s = 0.0;
  for (double v : scores) s += (v - m) * (v - m);
  return std::sqrt(s / n);
}

FairnessReport build_fairness_report(const Vec& method_scores, const Vec& standalone_scores) {
  if (method_scores.size() != standalone_scores.size())
    throw std::invalid_argument("build_fairness_report: length mismatch");
  FairnessReport report;
  report.client_scores = method_scores;
  report.mean_score = mean(method_scores);
  report.std_dev = client_std(method_scores);
  const auto pr = pearson(method_scores, standalone_scores);
  report.pearson_r = pr.r;
  report.p_value = pr.p_value;
  report.euclidean_distance = euclidean(method_scores, standalone_scores);
  report.cosine_similarity = cosine_sim(method_scores, standalone_scores);
  return report;
}

}  // namespace fedce
