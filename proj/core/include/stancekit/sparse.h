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

#ifndef STANCEKIT_SPARSE_H_
#define STANCEKIT_SPARSE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace stancekit {

// Sparse vector over [0, dim). Indices are strictly increasing and every
// stored value is finite and non-zero.
class SparseVector {
 public:
  SparseVector() = default;
  explicit SparseVector(size_t dim) : dim_(dim) {}

  // Builds from unordered (index, value) pairs. Duplicate indices are summed,
  // zeros dropped. Throws on out-of-range indices or non-finite values.
  static SparseVector from_pairs(size_t dim,
                                 std::vector<std::pair<uint32_t, double>> pairs);
  // Keeps the non-zero entries of a dense vector.
  static SparseVector from_dense(std::span<const double> dense);

  size_t dim() const { return dim_; }
  size_t nnz() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }

  std::span<const uint32_t> indices() const { return indices_; }
  std::span<const double> values() const { return values_; }

  // Appends an entry; `index` must exceed the last stored index.
  void push_back(uint32_t index, double value);

  double dot(std::span<const double> dense) const;
  double norm() const;
  void scale(double factor);

  // Value at `index` (0 if absent). O(log nnz).
  double at(uint32_t index) const;

  std::vector<double> to_dense() const;

  // Concatenates `parts` in order; the result has dim = sum of part dims.
  static SparseVector concat(std::span<const SparseVector> parts);

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  size_t dim_ = 0;
  std::vector<uint32_t> indices_;
  std::vector<double> values_;
};

}  // namespace stancekit

#endif  // STANCEKIT_SPARSE_H_
