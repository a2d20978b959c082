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

#include <algorithm>
#include <string>
#include <vector>

#include "oracles/oracles.h"
#include "stancekit/metrics.h"
#include "test_util.h"

namespace stancekit {
namespace {

using Strings = std::vector<std::string>;

MetricsReport run(const Strings& t, const Strings& p) {
  return metrics(confusion(t, p, stance_labels()));
}

TEST(Metrics, HandCase) {
  const auto r = run({"Favor", "Favor", "Against", "None"}, {"Favor", "Against", "Against", "None"});
  EXPECT_DOUBLE_EQ(r.find("Favor")->f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.find("Against")->f1, 2.0 / 3.0);
  EXPECT_EQ(r.find("None")->f1, 1.0);
  EXPECT_EQ(r.macro_f1_all, 7.0 / 9.0);
  EXPECT_DOUBLE_EQ(r.f1_favor_against, 2.0 / 3.0);
  EXPECT_EQ(r.accuracy, 0.75);
  EXPECT_EQ(r.confusion.counts[1][0], 1u);  // Favor predicted as Against
  EXPECT_EQ(r.confusion.total(), 4u);
}

TEST(Metrics, Perfect) {
  const Strings y = {"Favor", "Against", "None", "None"};
  const auto r = run(y, y);
  for (const auto& c : r.per_class) EXPECT_EQ(c.f1, 1.0);
  EXPECT_EQ(r.macro_f1_all, 1.0);
  EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Metrics, NeverPredictedClass) {
  const auto r = run({"Favor", "None", "Against"}, {"Favor", "Favor", "Against"});
  EXPECT_EQ(r.find("None")->f1, 0.0);
  EXPECT_EQ(r.find("None")->precision, 0.0);
  EXPECT_EQ(r.find("None")->support, 1u);
}

TEST(Metrics, AbsentClassEverywhere) {
  const auto r = run({"Favor", "Favor"}, {"Favor", "Favor"});
  EXPECT_EQ(r.find("Against")->f1, 0.0);
  EXPECT_EQ(r.f1_favor_against, 0.5);
}

TEST(Metrics, Errors) {
  EXPECT_ERROR_CODE(confusion(Strings{"Favor"}, Strings{}, stance_labels()),
                    ErrorCode::kLengthMismatch);
  EXPECT_ERROR_CODE(confusion(Strings{}, Strings{}, stance_labels()),
                    ErrorCode::kLengthMismatch);
  EXPECT_ERROR_CODE(confusion(Strings{"Favor"}, Strings{"favor"}, stance_labels()),
                    ErrorCode::kUnknownLabel);
}

TEST(Metrics, HeadlineAndJson) {
  const auto r = run({"Favor", "Against"}, {"Favor", "None"});
  EXPECT_EQ(headline(r, HeadlineMetric::kF1FavorAgainst), r.f1_favor_against);
  EXPECT_EQ(headline(r, HeadlineMetric::kMacroF1All), r.macro_f1_all);
  for (auto m : {HeadlineMetric::kF1FavorAgainst, HeadlineMetric::kMacroF1All}) {
    EXPECT_EQ(parse_headline_metric(headline_metric_name(m)), m);
  }
  const auto j = to_json(r);
  EXPECT_EQ(j["accuracy"].get<double>(), 0.5);
  EXPECT_EQ(j["per_class"].size(), 3u);
  EXPECT_EQ(j["confusion"]["counts"][1][1].get<int>(), 1);
  EXPECT_NE(render_text(r).find("Favor"), std::string::npos);
}

Strings random_labels(oracle::Rng& rng, size_t n) {
  Strings out;
  for (size_t i = 0; i < n; ++i) out.push_back(stance_labels()[rng.below(3)]);
  return out;
}

TEST(MetricsProperties, MatchesOracle) {
  oracle::Rng rng(51);
  for (int t = 0; t < 200; ++t) {
    const size_t n = 1 + rng.below(50);
    const Strings truth = random_labels(rng, n), pred = random_labels(rng, n);
    const auto r = run(truth, pred);
    const auto ref = oracle::per_class(truth, pred, stance_labels());
    double macro = 0.0;
    for (const auto& label : stance_labels()) {
      const auto* c = r.find(label);
      EXPECT_NEAR(c->precision, ref.at(label).precision, 1e-12);
      EXPECT_NEAR(c->recall, ref.at(label).recall, 1e-12);
      EXPECT_NEAR(c->f1, ref.at(label).f1, 1e-12);
      EXPECT_GE(c->f1, 0.0);
      EXPECT_LE(c->f1, 1.0);
      macro += ref.at(label).f1;
    }
    EXPECT_NEAR(r.macro_f1_all, macro / 3.0, 1e-12);
    EXPECT_NEAR(r.f1_favor_against, (ref.at("Favor").f1 + ref.at("Against").f1) / 2.0, 1e-12);
    // macro is the mean of the reported per-class values, rounded once
    double own = 0.0;
    for (const auto& c : r.per_class) own += c.f1;
    EXPECT_DOUBLE_EQ(r.macro_f1_all, own / 3.0);
  }
}

TEST(MetricsProperties, PermutationInvariant) {
  oracle::Rng rng(52);
  for (int t = 0; t < 100; ++t) {
    const size_t n = 1 + rng.below(40);
    Strings truth = random_labels(rng, n), pred = random_labels(rng, n);
    const auto before = run(truth, pred);
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng.engine);
    Strings t2, p2;
    for (size_t i : order) {
      t2.push_back(truth[i]);
      p2.push_back(pred[i]);
    }
    const auto after = run(t2, p2);
    EXPECT_EQ(after.confusion.counts, before.confusion.counts);
    EXPECT_EQ(after.macro_f1_all, before.macro_f1_all);
    EXPECT_EQ(after.f1_favor_against, before.f1_favor_against);
  }
}

}  // namespace
}  // namespace stancekit
