#pragma once

#include <cstdint>
#include <vector>

#include "fedce/types.hpp"

namespace fedce {

enum class ModelFamily { logistic, mlp1, pixel_seg };

std::string to_string(ModelFamily f);
ModelFamily model_family_from_string(const std::string& s);

// Small differentiable predictors with closed-form analytic gradients.
//   logistic:  binary classifier, d = f + 1
//   mlp1:      one tanh hidden layer of width h, sigmoid output,
//              d = f*h + h + h + 1
//   pixel_seg: per-cell logistic over a g*g intensity grid (cell j has its
//              own weight and bias), d = 2*g*g
struct ModelSpec {
  ModelFamily family = ModelFamily::pixel_seg;
  int input_dim = 4;  // f; for pixel_seg this must equal grid*grid
  int hidden = 2;     // mlp1 only
  int grid = 8;       // pixel_seg only

  int param_count() const;

  bool operator==(const ModelSpec&) const = default;
};

// Smoothing constant in the soft Dice loss, keeps 0/0 off empty masks.
inline constexpr double kDiceEps = 1e-6;

// Deterministic initialization, entries uniform in [-0.5, 0.5].
ParamVector init_params(const ModelSpec& model, uint64_t seed);

// Classification returns {P(y=0), P(y=1)}; pixel_seg returns one probability
// per cell. Throws on dimension mismatch.
Vec predict(const ModelSpec& model, const ParamVector& w, const Vec& x);

// Training loss averaged over the batch: soft Dice for segmentation,
// cross-entropy for classification. Throws on an empty batch.
double loss(const ModelSpec& model, const ParamVector& w, const std::vector<Sample>& batch);

// Analytic gradient of `loss`.
ParamVector gradient(const ModelSpec& model, const ParamVector& w,
                     const std::vector<Sample>& batch);

// Evaluation error in [0,1]: 1 - mean hard-Dice (threshold 0.5) for
// segmentation, 1 - accuracy for classification.
double evaluate_error(const ModelSpec& model, const ParamVector& w,
                      const std::vector<Sample>& data);

}  // namespace fedce
