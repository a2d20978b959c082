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

#include "stancekit/sparse.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "stancekit/error.h"

namespace stancekit {

SparseVector SparseVector::from_pairs(
    size_t dim, std::vector<std::pair<uint32_t, double>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector v(dim);
  size_t i = 0;
  while (i < pairs.size()) {
    const uint32_t index = pairs[i].first;
    if (index >= dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "index " + std::to_string(index) + " out of range for dim " +
                      std::to_string(dim));
    }
    double sum = 0.0;
    for (; i < pairs.size() && pairs[i].first == index; ++i) {
      sum += pairs[i].second;
    }
    if (!std::isfinite(sum)) {
      throw Error(ErrorCode::kNonFiniteFeature,
                  "non-finite value at index " + std::to_string(index));
    }
    if (sum != 0.0) {
      v.indices_.push_back(index);
      v.values_.push_back(sum);
    }
  }
  return v;
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector v(dense.size());
  for (size_t j = 0; j < dense.size(); ++j) {
    if (!std::isfinite(dense[j])) {
      throw Error(ErrorCode::kNonFiniteFeature,
                  "non-finite value at index " + std::to_string(j));
    }
    if (dense[j] != 0.0) {
      v.indices_.push_back(static_cast<uint32_t>(j));
      v.values_.push_back(dense[j]);
    }
  }
  return v;
}

void SparseVector::push_back(uint32_t index, double value) {
  if (index >= dim_ || (!indices_.empty() && index <= indices_.back())) {
    throw Error(ErrorCode::kInvalidArgument,
                "SparseVector::push_back: index " + std::to_string(index) +
                    " breaks ordering or range");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kNonFiniteFeature,
                "non-finite value at index " + std::to_string(index));
  }
  if (value == 0.0) return;
  indices_.push_back(index);
  values_.push_back(value);
}

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (size_t k = 0; k < indices_.size(); ++k) {
    sum += values_[k] * dense[indices_[k]];
  }
  return sum;
}

double SparseVector::norm() const {
  double sq = 0.0;
  for (double v : values_) sq += v * v;
  return std::sqrt(sq);
}

void SparseVector::scale(double factor) {
  if (factor == 0.0) {
    indices_.clear();
    values_.clear();
    return;
  }
  for (double& v : values_) v *= factor;
}

double SparseVector::at(uint32_t index) const {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) return 0.0;
  return values_[static_cast<size_t>(it - indices_.begin())];
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim_, 0.0);
  for (size_t k = 0; k < indices_.size(); ++k) out[indices_[k]] = values_[k];
  return out;
}

SparseVector SparseVector::concat(std::span<const SparseVector> parts) {
  size_t dim = 0;
  size_t nnz = 0;
  for (const auto& p : parts) {
    dim += p.dim();
    nnz += p.nnz();
  }
  SparseVector out(dim);
  out.indices_.reserve(nnz);
  out.values_.reserve(nnz);
  size_t offset = 0;
  for (const auto& p : parts) {
    for (size_t k = 0; k < p.nnz(); ++k) {
      out.indices_.push_back(static_cast<uint32_t>(offset + p.indices_[k]));
      out.values_.push_back(p.values_[k]);
    }
    offset += p.dim();
  }
  return out;
}

}  // namespace stancekit
