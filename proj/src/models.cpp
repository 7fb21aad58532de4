#include "fedce/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fedce/metrics.hpp"
#include "fedce/rng.hpp"

namespace fedce {

std::string to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::logistic: return "logistic";
    case ModelFamily::mlp1: return "mlp1";
    case ModelFamily::pixel_seg: return "pixel_seg";
  }
  return "unknown";
}

ModelFamily model_family_from_string(const std::string& s) {
  if (s == "logistic") return ModelFamily::logistic;
  if (s == "mlp1") return ModelFamily::mlp1;
  if (s == "pixel_seg") return ModelFamily::pixel_seg;
  throw std::invalid_argument("unknown model family: " + s);
}

int ModelSpec::param_count() const {
  switch (family) {
    case ModelFamily::logistic:
      return input_dim + 1;
    case ModelFamily::mlp1:
      return input_dim * hidden + hidden + hidden + 1;
    case ModelFamily::pixel_seg:
      return 2 * grid * grid;
  }
  return 0;
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_model(const ModelSpec& m) {
  if (m.family == ModelFamily::mlp1 && m.hidden < 1)
    throw std::invalid_argument("mlp1 needs hidden width >= 1");
  if (m.family == ModelFamily::pixel_seg && m.input_dim != m.grid * m.grid)
    throw std::invalid_argument("pixel_seg input_dim must equal grid*grid");
  if (m.input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
}

void check_dims(const ModelSpec& m, const ParamVector& w, const Vec& x) {
  if (static_cast<int>(w.size()) != m.param_count())
    throw std::invalid_argument("parameter dimension mismatch: expected " +
                                std::to_string(m.param_count()) + ", got " +
                                std::to_string(w.size()));
  if (static_cast<int>(x.size()) != m.input_dim)
    throw std::invalid_argument("feature dimension mismatch: expected " +
                                std::to_string(m.input_dim) + ", got " +
                                std::to_string(x.size()));
}

// Probability that the binary classifier assigns to class 1.
double classify_prob(const ModelSpec& m, const ParamVector& w, const Vec& x) {
  const int f = m.input_dim;
  if (m.family == ModelFamily::logistic) {
    double z = w[f];
    for (int i = 0; i < f; ++i) z += w[i] * x[i];
    return sigmoid(z);
  }
  // mlp1
  const int h = m.hidden;
  double z2 = w[f * h + 2 * h];  // output bias
  for (int j = 0; j < h; ++j) {
    double z1 = w[f * h + j];  // hidden bias
    for (int i = 0; i < f; ++i) z1 += w[j * f + i] * x[i];
    z2 += w[f * h + h + j] * std::tanh(z1);
  }
  return sigmoid(z2);
}

Vec seg_probs(const ModelSpec& m, const ParamVector& w, const Vec& x) {
  const int cells = m.grid * m.grid;
  Vec p(cells);
  for (int j = 0; j < cells; ++j) p[j] = sigmoid(w[j] * x[j] + w[cells + j]);
  return p;
}

constexpr double kLogClamp = 1e-12;

}  // namespace

ParamVector init_params(const ModelSpec& model, uint64_t seed) {
  check_model(model);
  Rng rng(splitmix64(seed ^ 0x243f6a8885a308d3ULL));
  ParamVector w(model.param_count());
  for (auto& v : w) v = rng.uniform(-0.5, 0.5);
  return w;
}

Vec predict(const ModelSpec& model, const ParamVector& w, const Vec& x) {
  check_model(model);
  check_dims(model, w, x);
  if (model.family == ModelFamily::pixel_seg) return seg_probs(model, w, x);
  const double p1 = classify_prob(model, w, x);
  return {1.0 - p1, p1};
}

double loss(const ModelSpec& model, const ParamVector& w, const std::vector<Sample>& batch) {
  check_model(model);
  if (batch.empty()) throw std::invalid_argument("loss: empty batch");
  double total = 0.0;
  for (const auto& s : batch) {
    check_dims(model, w, s.features);
    if (model.family == ModelFamily::pixel_seg) {
      const Vec p = seg_probs(model, w, s.features);
      double inter = 0.0, psum = 0.0, gsum = 0.0;
      for (size_t j = 0; j < p.size(); ++j) {
        inter += p[j] * s.mask[j];
        psum += p[j];
        gsum += s.mask[j];
      }
      total += 1.0 - (2.0 * inter + kDiceEps) / (psum + gsum + kDiceEps);
    } else {
      const double p = std::clamp(classify_prob(model, w, s.features), kLogClamp, 1.0 - kLogClamp);
      total += s.label == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
  }
  return total / static_cast<double>(batch.size());
}

ParamVector gradient(const ModelSpec& model, const ParamVector& w,
                     const std::vector<Sample>& batch) {
  check_model(model);
  if (batch.empty()) throw std::invalid_argument("gradient: empty batch");
  ParamVector g(model.param_count(), 0.0);
  const int f = model.input_dim;

  for (const auto& s : batch) {
    check_dims(model, w, s.features);
    const Vec& x = s.features;

    if (model.family == ModelFamily::pixel_seg) {
      const int cells = model.grid * model.grid;
      const Vec p = seg_probs(model, w, x);
      double inter = 0.0, psum = 0.0, gsum = 0.0;
      for (int j = 0; j < cells; ++j) {
        inter += p[j] * s.mask[j];
        psum += p[j];
        gsum += s.mask[j];
      }
      const double a = 2.0 * inter + kDiceEps;
      const double b = psum + gsum + kDiceEps;
      for (int j = 0; j < cells; ++j) {
        // d(1 - a/b)/dp_j = (a - 2*mask_j*b) / b^2
        const double dp = (a - 2.0 * s.mask[j] * b) / (b * b);
        const double dz = dp * p[j] * (1.0 - p[j]);
        g[j] += dz * x[j];
        g[cells + j] += dz;
      }
    } else if (model.family == ModelFamily::logistic) {
      const double p = classify_prob(model, w, x);
      const double dz = p - s.label;
      for (int i = 0; i < f; ++i) g[i] += dz * x[i];
      g[f] += dz;
    } else {  // mlp1
      const int h = model.hidden;
      Vec a1(h);
      for (int j = 0; j < h; ++j) {
        double z1 = w[f * h + j];
        for (int i = 0; i < f; ++i) z1 += w[j * f + i] * x[i];
        a1[j] = std::tanh(z1);
      }
      double z2 = w[f * h + 2 * h];
      for (int j = 0; j < h; ++j) z2 += w[f * h + h + j] * a1[j];
      const double dz2 = sigmoid(z2) - s.label;
      g[f * h + 2 * h] += dz2;
      for (int j = 0; j < h; ++j) {
        g[f * h + h + j] += dz2 * a1[j];
        const double dz1 = dz2 * w[f * h + h + j] * (1.0 - a1[j] * a1[j]);
        g[f * h + j] += dz1;
        for (int i = 0; i < f; ++i) g[j * f + i] += dz1 * x[i];
      }
    }
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  for (auto& v : g) v *= inv;
  return g;
}

double evaluate_error(const ModelSpec& model, const ParamVector& w,
                      const std::vector<Sample>& data) {
  check_model(model);
  if (data.empty()) throw std::invalid_argument("evaluate_error: empty dataset");

  double score = 0.0;
  for (const auto& s : data) {
    check_dims(model, w, s.features);
    if (model.family == ModelFamily::pixel_seg) {
      const Vec p = seg_probs(model, w, s.features);
      std::vector<uint8_t> pred(p.size());
      for (size_t j = 0; j < p.size(); ++j) pred[j] = p[j] > 0.5 ? 1 : 0;
      score += dice_coefficient(pred, s.mask);
    } else {
      const bool pred = classify_prob(model, w, s.features) > 0.5;
      score += pred == (s.label == 1) ? 1.0 : 0.0;
    }
  }
  return 1.0 - score / static_cast<double>(data.size());
}

}  // namespace fedce
