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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.h"
#include "stancekit/container.h"
#include "stancekit/features.h"
#include "test_util.h"

namespace stancekit {
namespace {

using Strings = std::vector<std::string>;

AnalyzerSpec word(int lo = 1, int hi = 1) { return {AnalyzerKind::kWord, lo, hi, true}; }

TEST(FitBlock, SmoothIdf) {
  const Strings corpus = {"a b", "a c"};
  const TfidfBlock b = fit_block(corpus, word());
  EXPECT_EQ(b.features(), (Strings{"a", "b", "c"}));
  ASSERT_EQ(b.idf().size(), 3u);
  // frozen reference values
  EXPECT_DOUBLE_EQ(b.idf()[0], 1.0);
  EXPECT_NEAR(b.idf()[1], 1.4054651081081644, 1e-15);
  EXPECT_NEAR(b.idf()[2], 1.4054651081081644, 1e-15);
  EXPECT_EQ(b.column("b"), 1);
  EXPECT_EQ(b.column("zz"), -1);
}

TEST(FitBlock, SingleDocument) {
  const Strings corpus = {"x"};
  const TfidfBlock b = fit_block(corpus, word());
  EXPECT_EQ(b.features(), (Strings{"x"}));
  EXPECT_EQ(b.idf(), (std::vector<double>{1.0}));
}

TEST(FitBlock, Errors) {
  EXPECT_ERROR_CODE(fit_block(Strings{"", ""}, word()), ErrorCode::kEmptyVocabulary);
  EXPECT_ERROR_CODE(fit_block(Strings{}, word()), ErrorCode::kEmptyCorpus);
  EXPECT_ERROR_CODE(fit_block(Strings{"a"}, word(2, 1)), ErrorCode::kInvalidArgument);
}

TEST(FitBlock, ConstructorValidates) {
  EXPECT_THROW(TfidfBlock(word(), {"b", "a"}, {1.0, 1.0}), Error);
  EXPECT_THROW(TfidfBlock(word(), {"a", "a"}, {1.0, 1.0}), Error);
  EXPECT_THROW(TfidfBlock(word(), {"a"}, {0.5}), Error);
  EXPECT_THROW(TfidfBlock(word(), {"a"}, {1.0, 2.0}), Error);
}

TEST(TransformBlock, Examples) {
  const Strings corpus = {"a b", "a c"};
  const TfidfBlock b = fit_block(corpus, word());

  const SparseVector v = transform_block(b, "a b");
  EXPECT_EQ(v.dim(), 3u);
  ASSERT_EQ(v.nnz(), 2u);
  EXPECT_NEAR(v.at(0), 0.5797386715376657, 1e-15);
  EXPECT_NEAR(v.at(1), 0.8148024746671689, 1e-15);
  EXPECT_NEAR(v.at(0), 0.5797, 5e-5);
  EXPECT_NEAR(v.at(1), 0.8148, 5e-5);

  const SparseVector z = transform_block(b, "z z");
  EXPECT_EQ(z.dim(), 3u);
  EXPECT_TRUE(z.empty());

  const SparseVector a = transform_block(b, "a");
  ASSERT_EQ(a.nnz(), 1u);
  EXPECT_EQ(a.at(0), 1.0);
}

TEST(TransformBlock, RawCounts) {
  const Strings corpus = {"a b", "a c"};
  const TfidfBlock b = fit_block(corpus, word());
  const SparseVector v = transform_block(b, "b b c");
  // (2*idf_b, idf_c) normalized: idf_b == idf_c
  EXPECT_NEAR(v.at(1), 2.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(v.at(2), 1.0 / std::sqrt(5.0), 1e-15);
}

Strings random_corpus(oracle::Rng& rng) {
  static const Strings alphabet = {"a", "b", "c", "A", " ", " ", "ب", "ت", "é", "👍"};
  Strings corpus(1 + rng.below(10));
  for (auto& doc : corpus) {
    const size_t len = rng.below(31);
    for (size_t i = 0; i < len; ++i) doc += alphabet[rng.below(alphabet.size())];
  }
  return corpus;
}

TEST(TfidfProperties, NormIsOneOrZero) {
  oracle::Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const Strings corpus = random_corpus(rng);
    AnalyzerSpec spec{AnalyzerKind::kChar, 1, 3, true};
    TfidfBlock b;
    try {
      b = fit_block(corpus, spec);
    } catch (const Error&) {
      continue;
    }
    for (const auto& d : random_corpus(rng)) {
      const double n = transform_block(b, d).norm();
      EXPECT_TRUE(n == 0.0 || std::abs(n - 1.0) < 1e-12) << n;
    }
  }
}

TEST(TfidfProperties, IdfAtLeastOne) {
  oracle::Rng rng(22);
  for (int t = 0; t < 50; ++t) {
    const Strings corpus = random_corpus(rng);
    try {
      const TfidfBlock b = fit_block(corpus, AnalyzerSpec{AnalyzerKind::kCharWb, 1, 4, true});
      for (double v : b.idf()) EXPECT_GE(v, 1.0);
      for (size_t j = 0; j < b.size(); ++j) EXPECT_EQ(b.column(b.features()[j]), long(j));
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kEmptyVocabulary);
    }
  }
}

TEST(TfidfProperties, MatchesOracle) {
  oracle::Rng rng(23);
  const AnalyzerKind kinds[] = {AnalyzerKind::kWord, AnalyzerKind::kChar,
                                AnalyzerKind::kCharWb};
  for (int t = 0; t < 60; ++t) {
    const Strings corpus = random_corpus(rng);
    const int k = static_cast<int>(rng.below(3));
    const int lo = 1 + static_cast<int>(rng.below(6));
    const int hi = lo + static_cast<int>(rng.below(7 - lo));
    const auto ref = oracle::fit(corpus, k, lo, hi);
    const AnalyzerSpec spec{kinds[k], lo, hi, true};
    if (ref.vocab.empty()) {
      EXPECT_ERROR_CODE(fit_block(corpus, spec), ErrorCode::kEmptyVocabulary);
      continue;
    }
    const TfidfBlock b = fit_block(corpus, spec);
    ASSERT_EQ(b.features(), ref.vocab);
    for (size_t j = 0; j < ref.idf.size(); ++j) {
      EXPECT_NEAR(b.idf()[j], ref.idf[j], 1e-12 * ref.idf[j]);
    }
    for (const auto& d : corpus) {
      const auto got = transform_block(b, d).to_dense();
      const auto want = oracle::transform(ref, d, k, lo, hi);
      for (size_t j = 0; j < want.size(); ++j) {
        EXPECT_NEAR(got[j], want[j], 1e-12 * std::abs(want[j]) + 1e-300);
      }
    }
  }
}

TEST(TfidfProperties, Deterministic) {
  const Strings corpus = {"كلمة اخرى", "abc abd", "اخرى abc 👍"};
  const AnalyzerSpec spec{AnalyzerKind::kCharWb, 1, 5, true};
  const TfidfBlock a = fit_block(corpus, spec);
  const TfidfBlock b = fit_block(corpus, spec);
  EXPECT_EQ(a.features(), b.features());
  EXPECT_EQ(a.idf(), b.idf());
  for (const auto& d : corpus) EXPECT_EQ(transform_block(a, d), transform_block(b, d));
}

const Strings& fixture_corpus() {
  static const Strings c = {"التطعيم مهم للجميع", "لا اثق في اللقاح", "abc abd abc",
                            "كورونا 👍 انتهى", "x"};
  return c;
}

TEST(Union, Tw1Preset) {
  const UnionSpec s = tw1_union(1, 6);
  ASSERT_EQ(s.blocks.size(), 3u);
  EXPECT_EQ(s.blocks[0].analyzer.kind, AnalyzerKind::kWord);
  EXPECT_EQ(s.blocks[1].analyzer.kind, AnalyzerKind::kChar);
  EXPECT_EQ(s.blocks[2].analyzer.kind, AnalyzerKind::kCharWb);
  EXPECT_EQ(s.blocks[0].weight, 0.85);
  EXPECT_EQ(s.blocks[1].weight, 0.85);
  EXPECT_EQ(s.blocks[2].weight, 0.65);
  for (const auto& b : s.blocks) {
    EXPECT_EQ(b.analyzer.ngram_min, 1);
    EXPECT_EQ(b.analyzer.ngram_max, 6);
  }
}

TEST(Union, SpecValidation) {
  EXPECT_ERROR_CODE(UnionSpec{}.validate(), ErrorCode::kInvalidArgument);
  for (double w : {0.0, -0.5, 1.5, std::nan("")}) {
    UnionSpec s{{{word(), w}}};
    EXPECT_ERROR_CODE(s.validate(), ErrorCode::kInvalidArgument);
  }
  UnionSpec ok{{{word(), 1.0}, {word(), 0.1}}};
  EXPECT_NO_THROW(ok.validate());
}

TEST(Union, OffsetsAreCumulative) {
  const FittedUnion u = fit_union(fixture_corpus(), tw1_union(1, 3));
  ASSERT_EQ(u.offsets().size(), 3u);
  EXPECT_EQ(u.offsets()[0], 0u);
  size_t total = 0;
  for (size_t b = 0; b < 3; ++b) {
    EXPECT_EQ(u.offsets()[b], total);
    total += u.blocks()[b].tfidf.size();
  }
  EXPECT_EQ(u.total_dim(), total);
  EXPECT_EQ(u.spec(), tw1_union(1, 3));
}

TEST(Union, HalfWeightHalvesSlice) {
  UnionSpec s{{{word(1, 2), 1.0}, {word(1, 2), 0.5}}};
  const FittedUnion u = fit_union(fixture_corpus(), s);
  const size_t n = u.blocks()[0].tfidf.size();
  for (const auto& d : fixture_corpus()) {
    const auto v = transform_union(u, d).to_dense();
    for (size_t j = 0; j < n; ++j) EXPECT_EQ(v[n + j], 0.5 * v[j]);
  }
}

TEST(Union, UnitWeightsEqualConcatenation) {
  UnionSpec s = tw1_union(1, 4);
  for (auto& b : s.blocks) b.weight = 1.0;
  const FittedUnion u = fit_union(fixture_corpus(), s);
  for (const auto& d : fixture_corpus()) {
    std::vector<SparseVector> parts;
    for (const auto& b : u.blocks()) parts.push_back(transform_block(b.tfidf, d));
    EXPECT_EQ(transform_union(u, d), SparseVector::concat(parts));
  }
}

TEST(Union, DoublingWeightDoublesOnlyThatSlice) {
  for (size_t which = 0; which < 3; ++which) {
    UnionSpec s = tw1_union(1, 4);
    s.blocks[which].weight = 0.4;
    UnionSpec d2 = s;
    d2.blocks[which].weight = 0.8;
    const FittedUnion a = fit_union(fixture_corpus(), s);
    const FittedUnion b = fit_union(fixture_corpus(), d2);
    for (const auto& doc : fixture_corpus()) {
      const auto va = transform_union(a, doc).to_dense();
      const auto vb = transform_union(b, doc).to_dense();
      ASSERT_EQ(va.size(), vb.size());
      for (size_t blk = 0; blk < 3; ++blk) {
        const size_t lo = a.offsets()[blk];
        const size_t hi = lo + a.blocks()[blk].tfidf.size();
        for (size_t j = lo; j < hi; ++j) {
          EXPECT_EQ(vb[j], blk == which ? 2.0 * va[j] : va[j]);
        }
      }
    }
  }
}

TEST(Union, ErrorsNameTheBlock) {
  UnionSpec s{{{word(), 1.0}, {word(5, 5), 1.0}}};
  try {
    fit_union(Strings{"a b"}, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyVocabulary);
    EXPECT_NE(std::string(e.what()).find("block 1"), std::string::npos) << e.what();
  }
}

TEST(Union, SectionRoundTrip) {
  const FittedUnion u = fit_union(fixture_corpus(), tw1_union(1, 3));
  std::stringstream buf;
  const std::vector<Section> sections = {u.to_section()};
  write_container(buf, sections);
  const auto back = read_container(buf);
  ASSERT_EQ(back.size(), 1u);
  const FittedUnion r = FittedUnion::from_section(back[0]);
  EXPECT_EQ(r.spec(), u.spec());
  EXPECT_EQ(r.offsets(), u.offsets());
  for (size_t b = 0; b < 3; ++b) {
    EXPECT_EQ(r.blocks()[b].tfidf.features(), u.blocks()[b].tfidf.features());
    EXPECT_EQ(r.blocks()[b].tfidf.idf(), u.blocks()[b].tfidf.idf());
  }
  for (const auto& d : fixture_corpus()) EXPECT_EQ(transform_union(r, d), transform_union(u, d));
}

TEST(Union, FromSectionRejectsBadPayload) {
  const FittedUnion u = fit_union(fixture_corpus(), tw1_union(1, 2));
  Section s = u.to_section();
  s.payload.pop_back();
  EXPECT_ERROR_CODE(FittedUnion::from_section(s), ErrorCode::kFormat);
}

}  // namespace
}  // namespace stancekit
