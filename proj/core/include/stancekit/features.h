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

#ifndef STANCEKIT_FEATURES_H_
#define STANCEKIT_FEATURES_H_

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stancekit/container.h"
#include "stancekit/preproc.h"
#include "stancekit/sparse.h"

namespace stancekit {

// One fitted TF-IDF vectorizer. Column j holds features()[j]; columns are in
// lexicographic (byte) order of the feature strings.
class TfidfBlock {
 public:
  TfidfBlock() = default;
  TfidfBlock(AnalyzerSpec analyzer, std::vector<std::string> features,
             std::vector<double> idf);

  const AnalyzerSpec& analyzer() const { return analyzer_; }
  const std::vector<std::string>& features() const { return features_; }
  const std::vector<double>& idf() const { return idf_; }
  size_t size() const { return features_.size(); }

  // Column of `feature`, or -1 if out of vocabulary.
  long column(std::string_view feature) const;

 private:
  AnalyzerSpec analyzer_;
  std::vector<std::string> features_;
  std::vector<double> idf_;
  std::unordered_map<std::string, uint32_t> index_;
};

// Vocabulary is every distinct analyzer output; idf = ln((1+N)/(1+df)) + 1.
// Throws kEmptyCorpus / kEmptyVocabulary.
TfidfBlock fit_block(std::span<const std::string> corpus,
                     const AnalyzerSpec& spec);

// Raw counts times idf, L2-normalized. Out-of-vocabulary grams are ignored.
SparseVector transform_block(const TfidfBlock& block, std::string_view doc);

struct UnionBlockSpec {
  AnalyzerSpec analyzer;
  double weight = 1.0;

  friend bool operator==(const UnionBlockSpec&, const UnionBlockSpec&) = default;
};

struct UnionSpec {
  std::vector<UnionBlockSpec> blocks;

  // At least one block; weights in (0, 1]; analyzers valid.
  void validate() const;

  friend bool operator==(const UnionSpec&, const UnionSpec&) = default;
};

// word/char/char_wb blocks sharing one n-gram range with weights
// (0.85, 0.85, 0.65).
UnionSpec tw1_union(int ngram_min, int ngram_max);

class FittedUnion {
 public:
  struct Block {
    TfidfBlock tfidf;
    double weight;
  };

  FittedUnion() = default;
  explicit FittedUnion(std::vector<Block> blocks);

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<size_t>& offsets() const { return offsets_; }
  size_t total_dim() const { return total_dim_; }
  UnionSpec spec() const;

  // Section layout: header {"type":"fitted_union","blocks":[{kind, ngram_min,
  // ngram_max, lowercase, weight, offset, size, features:[...]}],
  // "total_dim":D}; payload = idf arrays of all blocks, concatenated in block
  // order (payload length == total_dim).
  Section to_section() const;
  static FittedUnion from_section(const Section& section);

 private:
  std::vector<Block> blocks_;
  std::vector<size_t> offsets_;
  size_t total_dim_ = 0;
};

// Fits every block on the same corpus. Errors name the failing block index.
FittedUnion fit_union(std::span<const std::string> corpus,
                      const UnionSpec& spec);

// Per-block transform scaled by the block weight, concatenated at offsets.
SparseVector transform_union(const FittedUnion& fitted, std::string_view doc);

}  // namespace stancekit

#endif  // STANCEKIT_FEATURES_H_
