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

#include "stancekit/features.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "stancekit/error.h"

namespace stancekit {

TfidfBlock::TfidfBlock(AnalyzerSpec analyzer, std::vector<std::string> features,
                       std::vector<double> idf)
    : analyzer_(analyzer), features_(std::move(features)), idf_(std::move(idf)) {
  if (features_.size() != idf_.size()) {
    throw Error(ErrorCode::kFormat, "vocabulary and idf sizes differ");
  }
  index_.reserve(features_.size());
  for (size_t j = 0; j < features_.size(); ++j) {
    if (j > 0 && !(features_[j - 1] < features_[j])) {
      throw Error(ErrorCode::kFormat, "vocabulary not strictly sorted");
    }
    if (!(idf_[j] >= 1.0) || !std::isfinite(idf_[j])) {
      throw Error(ErrorCode::kFormat, "idf below 1 at column " + std::to_string(j));
    }
    index_.emplace(features_[j], static_cast<uint32_t>(j));
  }
}

long TfidfBlock::column(std::string_view feature) const {
  auto it = index_.find(std::string(feature));
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

TfidfBlock fit_block(std::span<const std::string> corpus,
                     const AnalyzerSpec& spec) {
  spec.validate();
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot fit TF-IDF on an empty corpus");
  }
  std::map<std::string, size_t> df;
  for (const auto& doc : corpus) {
    std::vector<std::string> grams = analyze(doc, spec);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[std::move(g)];
  }
  if (df.empty()) {
    throw Error(ErrorCode::kEmptyVocabulary,
                "no document produced any " +
                    std::string(analyzer_kind_name(spec.kind)) + " feature");
  }
  const double n = static_cast<double>(corpus.size());
  std::vector<std::string> features;
  std::vector<double> idf;
  features.reserve(df.size());
  idf.reserve(df.size());
  for (auto& [feature, count] : df) {
    features.push_back(feature);
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return TfidfBlock(spec, std::move(features), std::move(idf));
}

SparseVector transform_block(const TfidfBlock& block, std::string_view doc) {
  std::map<uint32_t, double> counts;
  for (const auto& gram : analyze(doc, block.analyzer())) {
    const long col = block.column(gram);
    if (col >= 0) counts[static_cast<uint32_t>(col)] += 1.0;
  }
  SparseVector v(block.size());
  double sq = 0.0;
  for (auto& [col, count] : counts) {
    count *= block.idf()[col];
    sq += count * count;
  }
  if (sq == 0.0) return v;
  const double norm = std::sqrt(sq);
  for (const auto& [col, value] : counts) v.push_back(col, value / norm);
  return v;
}

void UnionSpec::validate() const {
  if (blocks.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "feature union needs at least one block");
  }
  for (size_t b = 0; b < blocks.size(); ++b) {
    blocks[b].analyzer.validate();
    const double w = blocks[b].weight;
    if (!(w > 0.0 && w <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "block " + std::to_string(b) + ": weight must be in (0,1]");
    }
  }
}

UnionSpec tw1_union(int ngram_min, int ngram_max) {
  UnionSpec spec;
  spec.blocks = {
      {{AnalyzerKind::kWord, ngram_min, ngram_max, true}, 0.85},
      {{AnalyzerKind::kChar, ngram_min, ngram_max, true}, 0.85},
      {{AnalyzerKind::kCharWb, ngram_min, ngram_max, true}, 0.65},
  };
  return spec;
}

FittedUnion::FittedUnion(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  offsets_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    offsets_.push_back(total_dim_);
    total_dim_ += b.tfidf.size();
  }
}

UnionSpec FittedUnion::spec() const {
  UnionSpec spec;
  for (const auto& b : blocks_) spec.blocks.push_back({b.tfidf.analyzer(), b.weight});
  return spec;
}

Section FittedUnion::to_section() const {
  Section section;
  section.header["type"] = "fitted_union";
  section.header["total_dim"] = total_dim_;
  auto& blocks = section.header["blocks"] = nlohmann::json::array();
  section.payload.reserve(total_dim_);
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const auto& tfidf = blocks_[b].tfidf;
    blocks.push_back({
        {"kind", analyzer_kind_name(tfidf.analyzer().kind)},
        {"ngram_min", tfidf.analyzer().ngram_min},
        {"ngram_max", tfidf.analyzer().ngram_max},
        {"lowercase", tfidf.analyzer().lowercase},
        {"weight", blocks_[b].weight},
        {"offset", offsets_[b]},
        {"size", tfidf.size()},
        {"features", tfidf.features()},
    });
    section.payload.insert(section.payload.end(), tfidf.idf().begin(),
                           tfidf.idf().end());
  }
  return section;
}

FittedUnion FittedUnion::from_section(const Section& section) {
  const auto& h = section.header;
  try {
    if (h.at("type") != "fitted_union") {
      throw Error(ErrorCode::kFormat, "section is not a fitted_union");
    }
    std::vector<Block> blocks;
    size_t offset = 0;
    for (const auto& jb : h.at("blocks")) {
      AnalyzerSpec analyzer{parse_analyzer_kind(jb.at("kind").get<std::string>()),
                            jb.at("ngram_min").get<int>(),
                            jb.at("ngram_max").get<int>(),
                            jb.at("lowercase").get<bool>()};
      analyzer.validate();
      auto features = jb.at("features").get<std::vector<std::string>>();
      const size_t size = jb.at("size").get<size_t>();
      if (size != features.size() || jb.at("offset").get<size_t>() != offset ||
          offset + size > section.payload.size()) {
        throw Error(ErrorCode::kFormat, "fitted_union block layout inconsistent");
      }
      std::vector<double> idf(section.payload.begin() + static_cast<long>(offset),
                              section.payload.begin() + static_cast<long>(offset + size));
      blocks.push_back({TfidfBlock(analyzer, std::move(features), std::move(idf)),
                        jb.at("weight").get<double>()});
      offset += size;
    }
    if (offset != section.payload.size() || offset != h.at("total_dim").get<size_t>()) {
      throw Error(ErrorCode::kFormat, "fitted_union payload size mismatch");
    }
    return FittedUnion(std::move(blocks));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("fitted_union header: ") + e.what());
  }
}

FittedUnion fit_union(std::span<const std::string> corpus, const UnionSpec& spec) {
  spec.validate();
  std::vector<FittedUnion::Block> blocks;
  blocks.reserve(spec.blocks.size());
  for (size_t b = 0; b < spec.blocks.size(); ++b) {
    try {
      blocks.push_back({fit_block(corpus, spec.blocks[b].analyzer), spec.blocks[b].weight});
    } catch (const Error& e) {
      throw Error(e.code(), "union block " + std::to_string(b) + ": " + e.what());
    }
  }
  return FittedUnion(std::move(blocks));
}

SparseVector transform_union(const FittedUnion& fitted, std::string_view doc) {
  std::vector<SparseVector> parts;
  parts.reserve(fitted.blocks().size());
  for (const auto& b : fitted.blocks()) {
    SparseVector part = transform_block(b.tfidf, doc);
    part.scale(b.weight);
    parts.push_back(std::move(part));
  }
  return SparseVector::concat(parts);
}

}  // namespace stancekit
