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

#ifndef STANCEKIT_EXPERIMENTS_H_
#define STANCEKIT_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stancekit/container.h"
#include "stancekit/data.h"
#include "stancekit/features.h"
#include "stancekit/metrics.h"
#include "stancekit/models.h"
#include "stancekit/preproc.h"

namespace stancekit {

enum class Pipeline { kTfidfLsvc, kEmbedLogreg };
enum class Scope { kPerTarget, kPooled };

std::string_view pipeline_name(Pipeline p);
std::string_view scope_name(Scope s);

struct ExperimentConfig {
  std::string name;
  Pipeline pipeline = Pipeline::kTfidfLsvc;
  UnionSpec features;  // tfidf_lsvc only
  TrainConfig train;
  PreprocessFlags preprocessing;
  Scope scope = Scope::kPerTarget;
  HeadlineMetric metric = HeadlineMetric::kF1FavorAgainst;
  double dev_fraction = 0.2;
  bool use_split_column = false;
  uint64_t seed = 42;  // drives the split and the trainers

  std::vector<std::pair<int, int>> ngram_ranges;  // for ngram sweeps
  std::vector<std::vector<double>> weight_grid;   // one list per block

  TrainConfig seeded_train() const;
};

// Named starting points: "baseline" (word unigrams, C=4), "tw1" (word, char,
// char_wb over (1,6) weighted 0.85/0.85/0.65, C=4, n-gram ranges (1,1)..(1,10)
// and the coarse weight grid), "embed" (multinomial logistic regression, C=1,
// max_iter=1000, na and re on).
ExperimentConfig preset_config(std::string_view name);
std::vector<std::string> preset_names();

// 0.25, 0.5, 0.75, 1.0 per block, or 0.1..1.0 in steps of 0.1 when `full`.
std::vector<std::vector<double>> default_weight_grid(size_t blocks, bool full);

// Parses the JSON experiment config. Unknown keys, type errors and invalid
// values are collected and reported together in one Error(kConfig).
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// A trained model bundle: per target (or one pooled "*" entry) an optional
// feature union plus a linear model.
struct TrainedPipeline {
  struct Member {
    std::string target;  // "*" when pooled
    std::optional<FittedUnion> features;
    LinearModel model;
  };

  Pipeline pipeline = Pipeline::kTfidfLsvc;
  PreprocessFlags preprocessing;
  Scope scope = Scope::kPerTarget;
  std::vector<Member> members;

  const Member& member_for(const std::string& target) const;

  // Sections: {"type":"pipeline", "pipeline", "scope", "preprocessing",
  // "targets"} followed, per member, by an optional fitted_union and a
  // linear_model section (both carry "target").
  std::vector<Section> to_sections() const;
  static TrainedPipeline from_sections(const std::vector<Section>& sections);
  // Feature unions only, one fitted_union section per member.
  std::vector<Section> feature_sections() const;
};

inline constexpr const char* kPooledTarget = "*";

TrainedPipeline fit_pipeline(const ExperimentConfig& cfg, const Dataset& train,
                             const EmbeddingTable* embeddings = nullptr);

struct Prediction {
  std::string label;
  std::vector<double> scores;  // decision scores in model class order
};

std::vector<Prediction> predict_records(const TrainedPipeline& pipeline,
                                        const Dataset& ds,
                                        const EmbeddingTable* embeddings = nullptr);

struct TargetReport {
  std::string target;
  MetricsReport report;
};

struct ExperimentResult {
  MetricsReport pooled;  // over all dev predictions
  std::vector<TargetReport> per_target;
  // per_target scope: unweighted mean over targets; pooled: pooled figure.
  double overall_f1_favor_against = 0.0;
  double overall_macro_f1_all = 0.0;

  double overall(HeadlineMetric m) const {
    return m == HeadlineMetric::kF1FavorAgainst ? overall_f1_favor_against
                                                : overall_macro_f1_all;
  }
};

ExperimentResult evaluate_pipeline(const TrainedPipeline& pipeline, const Dataset& ds,
                                   const EmbeddingTable* embeddings = nullptr);

// Fits on train and evaluates on dev. Errors carry the config name.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& train,
                                const Dataset& dev,
                                const EmbeddingTable* embeddings = nullptr);

// Train/dev according to cfg: the split column if requested, else a
// stratified split with cfg.dev_fraction and cfg.seed.
SplitResult make_split(const ExperimentConfig& cfg, const Dataset& ds);

struct SweepRow {
  int id = 0;
  std::string model;
  std::string text_features;
  std::string configuration;
  std::string other;
  std::vector<std::pair<std::string, double>> per_target;  // headline metric
  double overall = 0.0;
  double overall_f1_favor_against = 0.0;
  double overall_macro_f1_all = 0.0;
  bool ok = true;
  std::string error;
};

struct SweepResult {
  std::string mode;  // "ngram" or "weight"
  std::string metric;
  std::vector<SweepRow> rows;
  std::optional<size_t> best;  // index into rows

  bool any_failed() const;
};

// One run per range, applied to every union block; rows sorted by overall
// score ascending (failures last), ids 1..n after sorting.
SweepResult run_ngram_sweep(const ExperimentConfig& base,
                            const std::vector<std::pair<int, int>>& ranges,
                            const Dataset& train, const Dataset& dev, int jobs = 1);

// Full Cartesian product of per-block weights, in grid order.
SweepResult run_weight_sweep(const ExperimentConfig& base,
                             const std::vector<std::vector<double>>& grid,
                             const Dataset& train, const Dataset& dev, int jobs = 1);

enum class TableFormat { kText, kCsv, kJson };
TableFormat parse_table_format(std::string_view name);

// text: aligned table with F1 in percent. csv: header
//   id,model,text_feat,configuration,other,f1,f1_favor_against,macro_f1_all,
//   per_target,status,error
// with full-precision numbers and per_target as "target=value;...". json:
//   {"mode","metric","best","rows":[{...same fields, per_target object}]}.
std::string emit_table(const SweepResult& result, TableFormat format);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace stancekit

#endif  // STANCEKIT_EXPERIMENTS_H_
