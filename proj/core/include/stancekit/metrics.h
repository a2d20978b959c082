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

#ifndef STANCEKIT_METRICS_H_
#define STANCEKIT_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace stancekit {

inline constexpr const char* kFavor = "Favor";
inline constexpr const char* kAgainst = "Against";
inline constexpr const char* kNone = "None";

// The three stance labels in lexicographic order (the order trained models
// use for their classes).
const std::vector<std::string>& stance_labels();

struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<uint64_t>> counts;  // [true][predicted]

  uint64_t total() const;
};

ConfusionMatrix confusion(std::span<const std::string> y_true,
                          std::span<const std::string> y_pred,
                          std::span<const std::string> classes);

struct ClassScores {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  uint64_t support = 0;
};

struct MetricsReport {
  ConfusionMatrix confusion;
  std::vector<ClassScores> per_class;
  double macro_f1_all = 0.0;
  // Mean of F1(Favor) and F1(Against); a label missing from the class list
  // contributes 0.
  double f1_favor_against = 0.0;
  double accuracy = 0.0;

  const ClassScores* find(const std::string& label) const;
};

// Precision, recall and F1 per class with 0/0 taken as 0.
MetricsReport metrics(const ConfusionMatrix& cm);

enum class HeadlineMetric { kF1FavorAgainst, kMacroF1All };

std::string_view headline_metric_name(HeadlineMetric m);
HeadlineMetric parse_headline_metric(std::string_view name);
double headline(const MetricsReport& report, HeadlineMetric m);

// Human-readable table with confusion matrix.
std::string render_text(const MetricsReport& report);

// {"accuracy", "macro_f1_all", "f1_favor_against",
//  "per_class": [{"label","precision","recall","f1","support"}],
//  "confusion": {"classes": [...], "counts": [[...]]}}
nlohmann::json to_json(const MetricsReport& report);

}  // namespace stancekit

#endif  // STANCEKIT_METRICS_H_
