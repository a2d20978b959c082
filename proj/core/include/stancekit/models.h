// Copyright 2026 The stancekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef STANCEKIT_MODELS_H_
#define STANCEKIT_MODELS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stancekit/container.h"
#include "stancekit/sparse.h"

namespace stancekit {

enum class ModelKind { kSvcOvr, kLogregMultinomial };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct TrainConfig {
  double c = 1.0;       // inverse regularization strength
  int max_iter = 1000;  // epochs (svc) or optimizer iterations (logreg)
  double tol = 1e-4;
  uint64_t seed = 42;
  // Optional per-label multiplier on the loss of each sample. Labels not
  // listed weigh 1.
  std::map<std::string, double> class_weights;
  // Declared label set. Empty means the distinct training labels; otherwise
  // at least two labels, a superset of the training labels.
  std::vector<std::string> classes;

  void validate() const;
};

// Per-class linear scorer: score_k(v) = weights_k . v + bias_k.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(ModelKind kind, std::vector<std::string> classes, size_t dim,
              std::vector<double> weights, std::vector<double> biases);

  ModelKind kind() const { return kind_; }
  const std::vector<std::string>& classes() const { return classes_; }
  size_t dim() const { return dim_; }
  size_t num_classes() const { return classes_.size(); }

  std::span<const double> weights(size_t k) const {
    return std::span<const double>(weights_).subspan(k * dim_, dim_);
  }
  std::span<const double> biases() const { return biases_; }

  std::vector<double> decision_scores(const SparseVector& v) const;
  // Softmax of decision_scores; logreg models only.
  std::vector<double> probabilities(const SparseVector& v) const;
  // Index of the highest score; ties go to the lowest index.
  size_t predict_index(const SparseVector& v) const;
  const std::string& predict(const SparseVector& v) const;

  // Header {"type":"linear_model","kind","classes","dim"}; payload is the
  // K x dim weight matrix row-major followed by the K biases.
  Section to_section() const;
  static LinearModel from_section(const Section& section);

  friend bool operator==(const LinearModel&, const LinearModel&) = default;

 private:
  ModelKind kind_ = ModelKind::kSvcOvr;
  std::vector<std::string> classes_;
  size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> biases_;
};

// Optimizer progress, filled when a pointer is passed to a trainer.
struct TrainTrace {
  // svc: objective after each epoch, one series per class (index 0 holds
  // the value at the zero start). logreg: objective after each iteration.
  std::vector<std::vector<double>> objectives;
  std::vector<int> iterations;
  std::vector<bool> converged;
};

// One-vs-rest L2-regularized squared-hinge SVM. For class k minimizes
//   1/2 |w|^2 + C sum_i weight_i max(0, 1 - s_i (w . x_i + b))^2
// with s_i = +1 iff y_i == k, by primal coordinate descent with a
// sufficient-decrease line search (bias unpenalized). Stops when an epoch
// lowers the objective by less than tol (relative) or after max_iter epochs.
LinearModel train_lsvc(std::span<const SparseVector> x,
                       std::span<const std::string> y, const TrainConfig& cfg,
                       TrainTrace* trace = nullptr);

// Multinomial logistic regression minimizing
//   sum_i weight_i * cross_entropy_i + 1/(2C) sum_k |w_k|^2
// (biases unpenalized)
// with L-BFGS until max|grad| <= tol or max_iter iterations.
LinearModel train_logreg(std::span<const SparseVector> x,
                         std::span<const std::string> y, const TrainConfig& cfg,
                         TrainTrace* trace = nullptr);

// Objectives exposed for verification. `targets` are class indices and
// `sample_weights` multiply each sample's loss term (empty = all ones).
namespace objective {

// Binary squared-hinge objective for one OvR problem; signs are +1/-1.
double squared_hinge(std::span<const SparseVector> x, std::span<const int> signs,
                     std::span<const double> w, double bias, double c,
                     std::span<const double> sample_weights = {});

// Sum of squared-hinge losses only (no regularizer, no C).
double squared_hinge_loss(std::span<const SparseVector> x,
                          std::span<const int> signs, std::span<const double> w,
                          double bias);

// theta = [W (num_classes x dim, row-major), b (num_classes)]. Writes the
// gradient into `grad` when it is non-empty.
double logreg(std::span<const SparseVector> x, std::span<const int> targets,
              size_t num_classes, std::span<const double> theta, double c,
              std::span<double> grad,
              std::span<const double> sample_weights = {});

}  // namespace objective

std::vector<double> softmax(std::span<const double> scores);

}  // namespace stancekit

#endif  // STANCEKIT_MODELS_H_
