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

#include "stancekit/models.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <random>

#include "stancekit/error.h"

namespace stancekit {
namespace {

struct Problem {
  std::vector<std::string> classes;
  std::vector<int> targets;
  std::vector<double> weights;  // class weight of each sample
  size_t dim = 0;
};

Problem prepare(std::span<const SparseVector> x, std::span<const std::string> y,
                const TrainConfig& cfg) {
  cfg.validate();
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(x.size()) + " vectors but " +
                    std::to_string(y.size()) + " labels");
  }
  if (x.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training samples");
  Problem p;
  p.dim = x[0].dim();
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].dim() != p.dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "sample " + std::to_string(i) + " has dim " +
                      std::to_string(x[i].dim()) + ", expected " +
                      std::to_string(p.dim));
    }
    for (double v : x[i].values()) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteFeature,
                    "sample " + std::to_string(i) + " has a non-finite value");
      }
    }
  }
  const bool declared = !cfg.classes.empty();
  if (declared) {
    p.classes = cfg.classes;
  } else {
    p.classes.assign(y.begin(), y.end());
  }
  std::sort(p.classes.begin(), p.classes.end());
  p.classes.erase(std::unique(p.classes.begin(), p.classes.end()), p.classes.end());
  if (p.classes.size() < 2) {
    throw Error(declared ? ErrorCode::kInvalidArgument : ErrorCode::kSingleClassCorpus,
                declared ? "declared class set needs at least two labels"
                         : "training labels contain a single class '" + p.classes[0] + "'");
  }
  p.targets.reserve(y.size());
  p.weights.reserve(y.size());
  for (const auto& label : y) {
    auto it = std::lower_bound(p.classes.begin(), p.classes.end(), label);
    if (it == p.classes.end() || *it != label) {
      throw Error(ErrorCode::kUnknownLabel,
                  "training label '" + label + "' is not in the declared class set");
    }
    p.targets.push_back(static_cast<int>(it - p.classes.begin()));
    auto w = cfg.class_weights.find(label);
    p.weights.push_back(w == cfg.class_weights.end() ? 1.0 : w->second);
  }
  return p;
}

// Column-major copy of the design matrix for coordinate descent.
struct ColumnMatrix {
  std::vector<size_t> start;
  std::vector<uint32_t> rows;
  std::vector<double> values;

  ColumnMatrix(std::span<const SparseVector> x, size_t dim) : start(dim + 1, 0) {
    for (const auto& v : x) {
      for (uint32_t j : v.indices()) ++start[j + 1];
    }
    std::partial_sum(start.begin(), start.end(), start.begin());
    rows.resize(start.back());
    values.resize(start.back());
    std::vector<size_t> fill(start.begin(), start.end() - 1);
    for (size_t i = 0; i < x.size(); ++i) {
      auto idx = x[i].indices();
      auto val = x[i].values();
      for (size_t k = 0; k < idx.size(); ++k) {
        const size_t pos = fill[idx[k]]++;
        rows[pos] = static_cast<uint32_t>(i);
        values[pos] = val[k];
      }
    }
  }
};

void shuffle(std::vector<size_t>& order, std::mt19937_64& rng) {
  for (size_t i = order.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

struct BinarySvcResult {
  std::vector<double> w;
  double bias = 0.0;
  std::vector<double> objectives;
  int epochs = 0;
  bool converged = false;
};

// Primal coordinate descent for one squared-hinge problem. `slack` holds
// 1 - s_i (w . x_i + b) and is kept in sync with every coordinate update.
BinarySvcResult train_binary_svc(const ColumnMatrix& cols, size_t n, size_t dim,
                                 std::span<const int> signs,
                                 std::span<const double> costs,
                                 const TrainConfig& cfg, uint64_t seed) {
  constexpr double kSigma = 0.01;
  constexpr int kMaxLineSearch = 30;

  BinarySvcResult r;
  r.w.assign(dim, 0.0);
  std::vector<double> slack(n, 1.0);

  auto objective = [&] {
    double reg = 0.0;
    for (double v : r.w) reg += v * v;
    double loss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (slack[i] > 0.0) loss += costs[i] * slack[i] * slack[i];
    }
    return 0.5 * reg + loss;
  };

  // Coordinate ids: feature columns with at least one entry, then `dim` for
  // the bias.
  std::vector<size_t> order;
  for (size_t j = 0; j < dim; ++j) {
    if (cols.start[j + 1] > cols.start[j]) order.push_back(j);
  }
  order.push_back(dim);

  // Visits (row, value) pairs of coordinate j; the bias column is all ones.
  auto for_each_entry = [&](size_t j, auto&& fn) {
    if (j == dim) {
      for (size_t i = 0; i < n; ++i) fn(i, 1.0);
    } else {
      for (size_t p = cols.start[j]; p < cols.start[j + 1]; ++p) {
        fn(cols.rows[p], cols.values[p]);
      }
    }
  };

  std::mt19937_64 rng(seed);
  double f_prev = objective();
  r.objectives.push_back(f_prev);
  for (int epoch = 1; epoch <= cfg.max_iter; ++epoch) {
    shuffle(order, rng);
    for (size_t j : order) {
      const bool is_bias = j == dim;
      const double wj = is_bias ? r.bias : r.w[j];
      double grad = is_bias ? 0.0 : wj;
      double hess = is_bias ? 0.0 : 1.0;
      for_each_entry(j, [&](size_t i, double v) {
        if (slack[i] > 0.0) {
          grad -= 2.0 * costs[i] * signs[i] * v * slack[i];
          hess += 2.0 * costs[i] * v * v;
        }
      });
      if (hess <= 0.0 || std::abs(grad) < 1e-15) continue;
      const double d = -grad / hess;

      double z = d;
      bool accepted = false;
      for (int t = 0; t < kMaxLineSearch; ++t) {
        double change = is_bias ? 0.0 : wj * z + 0.5 * z * z;
        for_each_entry(j, [&](size_t i, double v) {
          const double old_s = slack[i];
          const double new_s = old_s - signs[i] * z * v;
          const double a = old_s > 0.0 ? old_s : 0.0;
          const double b = new_s > 0.0 ? new_s : 0.0;
          change += costs[i] * (b * b - a * a);
        });
        if (change <= -kSigma * z * z) {
          accepted = true;
          break;
        }
        z *= 0.5;
      }
      if (!accepted) continue;
      if (is_bias) {
        r.bias += z;
      } else {
        r.w[j] += z;
      }
      for_each_entry(j, [&](size_t i, double v) { slack[i] -= signs[i] * z * v; });
    }

    const double f = objective();
    assert(f <= f_prev * (1.0 + 1e-12) + 1e-12);
    r.objectives.push_back(f);
    r.epochs = epoch;
    if (f_prev - f <= cfg.tol * f_prev) {
      r.converged = true;
      break;
    }
    f_prev = f;
  }
  return r;
}

double dot_row(const SparseVector& v, std::span<const double> w) { return v.dot(w); }

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  return kind == ModelKind::kSvcOvr ? "svc_ovr" : "logreg_multinomial";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "svc_ovr") return ModelKind::kSvcOvr;
  if (name == "logreg_multinomial") return ModelKind::kLogregMultinomial;
  throw Error(ErrorCode::kFormat, "unknown model kind '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::kInvalidArgument, "C must be a positive finite number");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");
  if (max_iter < 1) throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
  for (const auto& [label, w] : class_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "class weight for '" + label + "' must be positive");
    }
  }
}

LinearModel::LinearModel(ModelKind kind, std::vector<std::string> classes,
                         size_t dim, std::vector<double> weights,
                         std::vector<double> biases)
    : kind_(kind),
      classes_(std::move(classes)),
      dim_(dim),
      weights_(std::move(weights)),
      biases_(std::move(biases)) {
  if (classes_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "a model needs at least two classes");
  }
  if (weights_.size() != classes_.size() * dim_ || biases_.size() != classes_.size()) {
    throw Error(ErrorCode::kFormat, "weight/bias shape does not match classes x dim");
  }
  for (double v : weights_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteValue, "non-finite weight");
  }
  for (double v : biases_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteValue, "non-finite bias");
  }
}

std::vector<double> LinearModel::decision_scores(const SparseVector& v) const {
  if (v.dim() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector dim " + std::to_string(v.dim()) + " != model dim " +
                    std::to_string(dim_));
  }
  std::vector<double> scores(classes_.size());
  for (size_t k = 0; k < classes_.size(); ++k) {
    scores[k] = dot_row(v, weights(k)) + biases_[k];
  }
  return scores;
}

std::vector<double> LinearModel::probabilities(const SparseVector& v) const {
  if (kind_ != ModelKind::kLogregMultinomial) {
    throw Error(ErrorCode::kInvalidArgument,
                "probabilities are only defined for logistic regression models");
  }
  return softmax(decision_scores(v));
}

size_t LinearModel::predict_index(const SparseVector& v) const {
  const auto scores = decision_scores(v);
  size_t best = 0;
  for (size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

const std::string& LinearModel::predict(const SparseVector& v) const {
  return classes_[predict_index(v)];
}

Section LinearModel::to_section() const {
  Section s;
  s.header = {{"type", "linear_model"},
              {"kind", model_kind_name(kind_)},
              {"classes", classes_},
              {"dim", dim_}};
  s.payload.reserve(weights_.size() + biases_.size());
  s.payload.insert(s.payload.end(), weights_.begin(), weights_.end());
  s.payload.insert(s.payload.end(), biases_.begin(), biases_.end());
  return s;
}

LinearModel LinearModel::from_section(const Section& section) {
  try {
    const auto& h = section.header;
    if (h.at("type") != "linear_model") {
      throw Error(ErrorCode::kFormat, "section is not a linear_model");
    }
    auto classes = h.at("classes").get<std::vector<std::string>>();
    const auto dim = h.at("dim").get<size_t>();
    const size_t k = classes.size();
    if (section.payload.size() != k * dim + k) {
      throw Error(ErrorCode::kFormat, "linear_model payload size mismatch");
    }
    std::vector<double> w(section.payload.begin(),
                          section.payload.begin() + static_cast<long>(k * dim));
    std::vector<double> b(section.payload.begin() + static_cast<long>(k * dim),
                          section.payload.end());
    return LinearModel(parse_model_kind(h.at("kind").get<std::string>()),
                       std::move(classes), dim, std::move(w), std::move(b));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("linear_model header: ") + e.what());
  }
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> p(scores.begin(), scores.end());
  if (p.empty()) return p;
  const double m = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

LinearModel train_lsvc(std::span<const SparseVector> x,
                       std::span<const std::string> y, const TrainConfig& cfg,
                       TrainTrace* trace) {
  const Problem p = prepare(x, y, cfg);
  const size_t n = x.size();
  const size_t k_count = p.classes.size();
  const ColumnMatrix cols(x, p.dim);

  std::vector<double> weights(k_count * p.dim, 0.0);
  std::vector<double> biases(k_count, 0.0);
  std::vector<int> signs(n);
  std::vector<double> costs(n);
  for (size_t i = 0; i < n; ++i) costs[i] = cfg.c * p.weights[i];
  for (size_t k = 0; k < k_count; ++k) {
    for (size_t i = 0; i < n; ++i) {
      signs[i] = p.targets[i] == static_cast<int>(k) ? 1 : -1;
    }
    auto r = train_binary_svc(cols, n, p.dim, signs, costs, cfg, cfg.seed + k);
    std::copy(r.w.begin(), r.w.end(), weights.begin() + static_cast<long>(k * p.dim));
    biases[k] = r.bias;
    if (trace) {
      trace->objectives.push_back(std::move(r.objectives));
      trace->iterations.push_back(r.epochs);
      trace->converged.push_back(r.converged);
    }
  }
  return LinearModel(ModelKind::kSvcOvr, p.classes, p.dim, std::move(weights),
                     std::move(biases));
}

LinearModel train_logreg(std::span<const SparseVector> x,
                         std::span<const std::string> y, const TrainConfig& cfg,
                         TrainTrace* trace) {
  constexpr size_t kHistory = 10;
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktrack = 50;

  const Problem p = prepare(x, y, cfg);
  const size_t k_count = p.classes.size();
  const size_t size = k_count * p.dim + k_count;

  auto eval = [&](std::span<const double> theta, std::span<double> grad) {
    return objective::logreg(x, p.targets, k_count, theta, cfg.c, grad, p.weights);
  };

  std::vector<double> theta(size, 0.0), grad(size), next(size), next_grad(size),
      dir(size);
  double f = eval(theta, grad);
  std::vector<double> series{f};

  std::vector<std::vector<double>> s_hist, y_hist;
  std::vector<double> rho_hist;
  int iter = 0;
  bool converged = max_abs(grad) <= cfg.tol;
  while (!converged && iter < cfg.max_iter) {
    ++iter;
    // Two-loop recursion for dir = -H grad.
    dir = grad;
    const size_t m = s_hist.size();
    std::vector<double> alpha(m);
    for (size_t h = m; h-- > 0;) {
      alpha[h] = rho_hist[h] * dot(s_hist[h], dir);
      for (size_t j = 0; j < size; ++j) dir[j] -= alpha[h] * y_hist[h][j];
    }
    double gamma;
    if (m > 0) {
      gamma = dot(s_hist[m - 1], y_hist[m - 1]) / dot(y_hist[m - 1], y_hist[m - 1]);
    } else {
      gamma = 1.0 / std::max(1.0, std::sqrt(dot(grad, grad)));
    }
    for (double& v : dir) v *= gamma;
    for (size_t h = 0; h < m; ++h) {
      const double beta = rho_hist[h] * dot(y_hist[h], dir);
      for (size_t j = 0; j < size; ++j) dir[j] += (alpha[h] - beta) * s_hist[h][j];
    }
    for (double& v : dir) v = -v;

    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      const double scale = 1.0 / std::max(1.0, std::sqrt(dot(grad, grad)));
      for (size_t j = 0; j < size; ++j) dir[j] = -grad[j] * scale;
      slope = dot(grad, dir);
    }

    double step = 1.0;
    double f_next = 0.0;
    bool ok = false;
    for (int t = 0; t < kMaxBacktrack; ++t) {
      for (size_t j = 0; j < size; ++j) next[j] = theta[j] + step * dir[j];
      f_next = eval(next, next_grad);
      if (std::isfinite(f_next) && f_next <= f + kArmijo * step * slope) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;  // no further decrease available at double precision

    std::vector<double> s(size), yv(size);
    for (size_t j = 0; j < size; ++j) {
      s[j] = next[j] - theta[j];
      yv[j] = next_grad[j] - grad[j];
    }
    const double sy = dot(s, yv);
    if (sy > 1e-12 * dot(yv, yv)) {
      if (s_hist.size() == kHistory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
    }
    theta.swap(next);
    grad.swap(next_grad);
    f = f_next;
    series.push_back(f);
    converged = max_abs(grad) <= cfg.tol;
  }

  if (trace) {
    trace->objectives.push_back(std::move(series));
    trace->iterations.push_back(iter);
    trace->converged.push_back(converged);
  }
  std::vector<double> weights(theta.begin(), theta.begin() + static_cast<long>(k_count * p.dim));
  std::vector<double> biases(theta.begin() + static_cast<long>(k_count * p.dim), theta.end());
  return LinearModel(ModelKind::kLogregMultinomial, p.classes, p.dim,
                     std::move(weights), std::move(biases));
}

namespace objective {

double squared_hinge_loss(std::span<const SparseVector> x, std::span<const int> signs,
                          std::span<const double> w, double bias) {
  double loss = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double slack = 1.0 - signs[i] * (x[i].dot(w) + bias);
    if (slack > 0.0) loss += slack * slack;
  }
  return loss;
}

double squared_hinge(std::span<const SparseVector> x, std::span<const int> signs,
                     std::span<const double> w, double bias, double c,
                     std::span<const double> sample_weights) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double slack = 1.0 - signs[i] * (x[i].dot(w) + bias);
    const double cost = sample_weights.empty() ? c : c * sample_weights[i];
    if (slack > 0.0) loss += cost * slack * slack;
  }
  return 0.5 * reg + loss;
}

double logreg(std::span<const SparseVector> x, std::span<const int> targets,
              size_t num_classes, std::span<const double> theta, double c,
              std::span<double> grad, std::span<const double> sample_weights) {
  const size_t dim = x.empty() ? 0 : x[0].dim();
  const size_t bias_at = num_classes * dim;
  const bool want_grad = !grad.empty();
  if (theta.size() != bias_at + num_classes ||
      (want_grad && grad.size() != theta.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "logreg parameter vector has wrong size");
  }
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);

  double loss = 0.0;
  std::vector<double> scores(num_classes);
  for (size_t i = 0; i < x.size(); ++i) {
    const auto idx = x[i].indices();
    const auto val = x[i].values();
    for (size_t k = 0; k < num_classes; ++k) {
      double s = theta[bias_at + k];
      const double* w = theta.data() + k * dim;
      for (size_t e = 0; e < idx.size(); ++e) s += w[idx[e]] * val[e];
      scores[k] = s;
    }
    const double m = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (size_t k = 0; k < num_classes; ++k) sum += std::exp(scores[k] - m);
    const double lse = m + std::log(sum);
    const double weight = sample_weights.empty() ? 1.0 : sample_weights[i];
    loss += weight * (lse - scores[targets[i]]);
    if (want_grad) {
      for (size_t k = 0; k < num_classes; ++k) {
        double r = std::exp(scores[k] - lse);
        if (static_cast<int>(k) == targets[i]) r -= 1.0;
        r *= weight;
        double* g = grad.data() + k * dim;
        for (size_t e = 0; e < idx.size(); ++e) g[idx[e]] += r * val[e];
        grad[bias_at + k] += r;
      }
    }
  }
  double reg = 0.0;
  for (size_t j = 0; j < bias_at; ++j) {
    reg += theta[j] * theta[j];
    if (want_grad) grad[j] += theta[j] / c;
  }
  return loss + reg / (2.0 * c);
}

}  // namespace objective
}  // namespace stancekit
