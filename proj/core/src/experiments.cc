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

#include "stancekit/experiments.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "stancekit/error.h"

namespace stancekit {
namespace {

using nlohmann::json;

// Collects every problem in a config document before failing.
class ConfigReader {
 public:
  void error(const std::string& path, const std::string& what) {
    errors_.push_back(path + ": " + what);
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) error(join(path, it.key()), "unknown key");
    }
  }

  const json* object(const json& parent, const std::string& path, const char* key) {
    if (!parent.contains(key)) return nullptr;
    const json& v = parent.at(key);
    if (!v.is_object()) {
      error(join(path, key), "expected an object");
      return nullptr;
    }
    return &v;
  }

  template <typename T>
  void read(const json& parent, const std::string& path, const char* key, T& out,
            std::function<bool(const T&)> valid = nullptr, const char* rule = "") {
    if (!parent.contains(key)) return;
    const json& v = parent.at(key);
    const std::string where = join(path, key);
    bool type_ok;
    if constexpr (std::is_same_v<T, bool>) {
      type_ok = v.is_boolean();
    } else if constexpr (std::is_same_v<T, std::string>) {
      type_ok = v.is_string();
    } else if constexpr (std::is_integral_v<T>) {
      type_ok = v.is_number_integer();
    } else {
      type_ok = v.is_number();
    }
    if (!type_ok) {
      error(where, "wrong type");
      return;
    }
    T value = v.get<T>();
    if (valid && !valid(value)) {
      error(where, rule);
      return;
    }
    out = value;
  }

  void finish() const {
    if (errors_.empty()) return;
    std::string msg = "invalid experiment config (" + std::to_string(errors_.size()) +
                      " problem" + (errors_.size() == 1 ? "" : "s") + "):";
    for (const auto& e : errors_) msg += "\n  " + e;
    throw Error(ErrorCode::kConfig, msg);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<std::string> errors_;
};

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

std::string range_text(const AnalyzerSpec& a) {
  return "(" + std::to_string(a.ngram_min) + "," + std::to_string(a.ngram_max) + ")";
}

bool is_tw1(const UnionSpec& spec) {
  if (spec.blocks.size() != 3) return false;
  const UnionSpec ref = tw1_union(spec.blocks[0].analyzer.ngram_min,
                                  spec.blocks[0].analyzer.ngram_max);
  for (size_t b = 0; b < 3; ++b) {
    if (spec.blocks[b].weight != ref.blocks[b].weight ||
        spec.blocks[b].analyzer.kind != ref.blocks[b].analyzer.kind) {
      return false;
    }
  }
  return true;
}

SweepRow describe(const ExperimentConfig& cfg) {
  SweepRow row;
  std::vector<std::string> other;
  if (cfg.pipeline == Pipeline::kTfidfLsvc) {
    row.model = "LSVC";
    std::string ranges;
    std::string weights;
    for (const auto& b : cfg.features.blocks) {
      ranges += (ranges.empty() ? "" : ",") + range_text(b.analyzer);
      weights += (weights.empty() ? "" : ",") + format_double(b.weight);
    }
    row.text_features = "ngram_range=" + ranges;
    row.configuration = "C=" + format_double(cfg.train.c);
    other.push_back(is_tw1(cfg.features) ? "tw1" : "w={" + weights + "}");
  } else {
    row.model = "LR";
    row.text_features = "sentence embeddings";
    row.configuration = "max_iter=" + std::to_string(cfg.train.max_iter) +
                        " multinomial C=" + format_double(cfg.train.c);
  }
  if (cfg.preprocessing.normalize_arabic) other.push_back("na");
  if (cfg.preprocessing.replace_emojis) other.push_back("re");
  for (const auto& o : other) row.other += (row.other.empty() ? "" : ", ") + o;
  return row;
}

void fill_scores(SweepRow& row, const ExperimentResult& r, HeadlineMetric metric) {
  row.overall = r.overall(metric);
  row.overall_f1_favor_against = r.overall_f1_favor_against;
  row.overall_macro_f1_all = r.overall_macro_f1_all;
  for (const auto& t : r.per_target) {
    row.per_target.emplace_back(t.target, headline(t.report, metric));
  }
}

// Runs `count` independent tasks on up to `jobs` threads; task i writes slot i.
void run_parallel(size_t count, int jobs, const std::function<void(size_t)>& task) {
  const size_t workers = std::max<size_t>(1, std::min<size_t>(count, static_cast<size_t>(std::max(jobs, 1))));
  if (workers == 1) {
    for (size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& t : pool) t.join();
}

SweepRow run_row(const ExperimentConfig& cfg, const Dataset& train, const Dataset& dev) {
  SweepRow row = describe(cfg);
  try {
    fill_scores(row, run_experiment(cfg, train, dev), cfg.metric);
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

std::vector<std::string> preprocess_all(const Dataset& ds, const PreprocessFlags& flags) {
  std::vector<std::string> out;
  out.reserve(ds.size());
  for (const auto& r : ds.records) out.push_back(preprocess(r.text, flags));
  return out;
}

TrainedPipeline::Member fit_member(const ExperimentConfig& cfg, const Dataset& part,
                                   const std::string& target,
                                   const EmbeddingTable* embeddings) {
  TrainedPipeline::Member m;
  m.target = target;
  std::vector<std::string> labels;
  for (const auto& r : part.records) {
    if (r.stance.empty()) {
      throw Error(ErrorCode::kBadLabel, "training record '" + r.id + "' has no stance");
    }
    labels.push_back(r.stance);
  }
  if (cfg.pipeline == Pipeline::kTfidfLsvc) {
    const auto docs = preprocess_all(part, cfg.preprocessing);
    m.features = fit_union(docs, cfg.features);
    std::vector<SparseVector> x;
    x.reserve(docs.size());
    for (const auto& d : docs) x.push_back(transform_union(*m.features, d));
    m.model = train_lsvc(x, labels, cfg.seeded_train());
  } else {
    if (!embeddings) {
      throw Error(ErrorCode::kInvalidArgument, "embed_logreg needs an embeddings file");
    }
    auto aligned = join_embeddings(part, *embeddings);
    m.model = train_logreg(aligned.x, aligned.labels, cfg.seeded_train());
  }
  return m;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string_view pipeline_name(Pipeline p) {
  return p == Pipeline::kTfidfLsvc ? "tfidf_lsvc" : "embed_logreg";
}

std::string_view scope_name(Scope s) {
  return s == Scope::kPerTarget ? "per_target" : "pooled";
}

TrainConfig ExperimentConfig::seeded_train() const {
  TrainConfig t = train;
  t.seed = seed;
  return t;
}

std::vector<std::vector<double>> default_weight_grid(size_t blocks, bool full) {
  std::vector<double> values;
  if (full) {
    for (int k = 1; k <= 10; ++k) values.push_back(k / 10.0);
  } else {
    values = {0.25, 0.5, 0.75, 1.0};
  }
  return std::vector<std::vector<double>>(blocks, values);
}

std::vector<std::string> preset_names() { return {"baseline", "tw1", "embed"}; }

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig cfg;
  cfg.name = std::string(name);
  std::vector<std::pair<int, int>> all_ranges;
  for (int n = 1; n <= 10; ++n) all_ranges.emplace_back(1, n);
  if (name == "baseline") {
    cfg.pipeline = Pipeline::kTfidfLsvc;
    cfg.features.blocks = {{{AnalyzerKind::kWord, 1, 1, true}, 1.0}};
    cfg.train.c = 4.0;
    cfg.ngram_ranges = all_ranges;
    cfg.weight_grid = default_weight_grid(1, false);
  } else if (name == "tw1") {
    cfg.pipeline = Pipeline::kTfidfLsvc;
    cfg.features = tw1_union(1, 6);
    cfg.train.c = 4.0;
    cfg.ngram_ranges = all_ranges;
    cfg.weight_grid = default_weight_grid(3, false);
  } else if (name == "embed") {
    cfg.pipeline = Pipeline::kEmbedLogreg;
    cfg.train.c = 1.0;
    cfg.train.max_iter = 1000;
    cfg.preprocessing = {true, true};
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown preset '" + std::string(name) + "' (baseline, tw1, embed)");
  }
  return cfg;
}

ExperimentConfig parse_config(const json& j) {
  ConfigReader r;
  ExperimentConfig cfg;
  if (!j.is_object()) {
    r.error("<root>", "expected a JSON object");
    r.finish();
  }
  r.check_keys(j, "", {"name", "pipeline", "features", "train", "preprocessing", "scope",
                       "metric", "split", "seed", "sweep"});
  r.read<std::string>(j, "", "name", cfg.name);

  std::string pipeline = "tfidf_lsvc";
  r.read<std::string>(j, "", "pipeline", pipeline,
                      [](const std::string& s) { return s == "tfidf_lsvc" || s == "embed_logreg"; },
                      "must be tfidf_lsvc or embed_logreg");
  cfg.pipeline = pipeline == "embed_logreg" ? Pipeline::kEmbedLogreg : Pipeline::kTfidfLsvc;
  if (cfg.pipeline == Pipeline::kEmbedLogreg) cfg.train.c = 1.0;

  if (const json* f = r.object(j, "", "features")) {
    r.check_keys(*f, "features", {"preset", "ngram_range", "blocks"});
    if (f->contains("preset") && f->contains("blocks")) {
      r.error("features", "give either preset or blocks, not both");
    }
    std::pair<int, int> range{1, 1};
    if (f->contains("ngram_range")) {
      const json& nr = f->at("ngram_range");
      if (nr.is_array() && nr.size() == 2 && nr[0].is_number_integer() &&
          nr[1].is_number_integer() && nr[0].get<int>() >= 1 &&
          nr[1].get<int>() >= nr[0].get<int>()) {
        range = {nr[0].get<int>(), nr[1].get<int>()};
      } else {
        r.error("features.ngram_range", "expected [min, max] with 1 <= min <= max");
      }
    }
    if (f->contains("preset")) {
      std::string preset;
      r.read<std::string>(*f, "features", "preset", preset,
                          [](const std::string& s) { return s == "tw1"; }, "only tw1 is defined");
      if (preset == "tw1") cfg.features = tw1_union(range.first, range.second);
    } else if (f->contains("blocks")) {
      const json& blocks = f->at("blocks");
      if (!blocks.is_array() || blocks.empty()) {
        r.error("features.blocks", "expected a non-empty array");
      } else {
        for (size_t b = 0; b < blocks.size(); ++b) {
          const std::string path = "features.blocks[" + std::to_string(b) + "]";
          if (!blocks[b].is_object()) {
            r.error(path, "expected an object");
            continue;
          }
          r.check_keys(blocks[b], path, {"kind", "ngram_min", "ngram_max", "lowercase", "weight"});
          UnionBlockSpec spec;
          spec.analyzer.ngram_min = range.first;
          spec.analyzer.ngram_max = range.second;
          std::string kind = "word";
          r.read<std::string>(blocks[b], path, "kind", kind,
                              [](const std::string& s) {
                                return s == "word" || s == "char" || s == "char_wb";
                              },
                              "must be word, char or char_wb");
          spec.analyzer.kind = parse_analyzer_kind(kind == "char" || kind == "char_wb" ? kind : "word");
          r.read<int>(blocks[b], path, "ngram_min", spec.analyzer.ngram_min,
                      [](const int& v) { return v >= 1; }, "must be >= 1");
          r.read<int>(blocks[b], path, "ngram_max", spec.analyzer.ngram_max,
                      [](const int& v) { return v >= 1; }, "must be >= 1");
          if (spec.analyzer.ngram_max < spec.analyzer.ngram_min) {
            r.error(path, "ngram_max must be >= ngram_min");
          }
          r.read<bool>(blocks[b], path, "lowercase", spec.analyzer.lowercase);
          r.read<double>(blocks[b], path, "weight", spec.weight,
                         [](const double& w) { return w > 0.0 && w <= 1.0; },
                         "must lie in (0, 1]");
          cfg.features.blocks.push_back(spec);
        }
      }
    } else {
      r.error("features", "needs preset or blocks");
    }
  } else if (cfg.pipeline == Pipeline::kTfidfLsvc) {
    r.error("features", "required for tfidf_lsvc");
  }

  if (const json* t = r.object(j, "", "train")) {
    r.check_keys(*t, "train", {"c", "max_iter", "tol", "class_weights"});
    r.read<double>(*t, "train", "c", cfg.train.c,
                   [](const double& v) { return v > 0.0 && std::isfinite(v); }, "must be > 0");
    r.read<int>(*t, "train", "max_iter", cfg.train.max_iter,
                [](const int& v) { return v >= 1; }, "must be >= 1");
    r.read<double>(*t, "train", "tol", cfg.train.tol,
                   [](const double& v) { return v > 0.0; }, "must be > 0");
    if (const json* cw = r.object(*t, "train", "class_weights")) {
      for (auto it = cw->begin(); it != cw->end(); ++it) {
        const std::string path = "train.class_weights." + it.key();
        if (it.key() != kFavor && it.key() != kAgainst && it.key() != kNone) {
          r.error(path, "unknown stance label");
        } else if (!it->is_number() || !(it->get<double>() > 0.0)) {
          r.error(path, "must be a positive number");
        } else {
          cfg.train.class_weights[it.key()] = it->get<double>();
        }
      }
    }
  }

  if (const json* p = r.object(j, "", "preprocessing")) {
    r.check_keys(*p, "preprocessing", {"na", "re"});
    r.read<bool>(*p, "preprocessing", "na", cfg.preprocessing.normalize_arabic);
    r.read<bool>(*p, "preprocessing", "re", cfg.preprocessing.replace_emojis);
  }

  std::string scope = "per_target";
  r.read<std::string>(j, "", "scope", scope,
                      [](const std::string& s) { return s == "per_target" || s == "pooled"; },
                      "must be per_target or pooled");
  cfg.scope = scope == "pooled" ? Scope::kPooled : Scope::kPerTarget;

  std::string metric = "f1_favor_against";
  r.read<std::string>(j, "", "metric", metric,
                      [](const std::string& s) {
                        return s == "f1_favor_against" || s == "macro_f1_all";
                      },
                      "must be f1_favor_against or macro_f1_all");
  cfg.metric = parse_headline_metric(metric);

  if (const json* s = r.object(j, "", "split")) {
    r.check_keys(*s, "split", {"dev_fraction", "use_column"});
    r.read<double>(*s, "split", "dev_fraction", cfg.dev_fraction,
                   [](const double& v) { return v > 0.0 && v < 1.0; }, "must lie in (0, 1)");
    r.read<bool>(*s, "split", "use_column", cfg.use_split_column);
  }
  r.read<uint64_t>(j, "", "seed", cfg.seed);

  if (const json* sw = r.object(j, "", "sweep")) {
    r.check_keys(*sw, "sweep", {"ngram_ranges", "weight_grid"});
    if (sw->contains("ngram_ranges")) {
      const json& nr = sw->at("ngram_ranges");
      bool ok = nr.is_array() && !nr.empty();
      if (ok) {
        for (const auto& e : nr) {
          if (!(e.is_array() && e.size() == 2 && e[0].is_number_integer() &&
                e[1].is_number_integer() && e[0].get<int>() >= 1 &&
                e[1].get<int>() >= e[0].get<int>())) {
            ok = false;
            break;
          }
          cfg.ngram_ranges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
      }
      if (!ok) {
        cfg.ngram_ranges.clear();
        r.error("sweep.ngram_ranges", "expected a non-empty list of [min, max] pairs");
      }
    }
    if (sw->contains("weight_grid")) {
      const json& wg = sw->at("weight_grid");
      bool ok = wg.is_array() && !wg.empty();
      if (ok) {
        for (const auto& lst : wg) {
          std::vector<double> values;
          ok = lst.is_array() && !lst.empty();
          for (const auto& v : lst) {
            if (!v.is_number() || !(v.get<double>() > 0.0 && v.get<double>() <= 1.0)) {
              ok = false;
              break;
            }
            values.push_back(v.get<double>());
          }
          if (!ok) break;
          cfg.weight_grid.push_back(std::move(values));
        }
      }
      if (!ok) {
        cfg.weight_grid.clear();
        r.error("sweep.weight_grid", "expected one non-empty list of weights in (0,1] per block");
      }
    }
  }
  r.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["pipeline"] = pipeline_name(cfg.pipeline);
  if (cfg.pipeline == Pipeline::kTfidfLsvc) {
    json blocks = json::array();
    for (const auto& b : cfg.features.blocks) {
      blocks.push_back({{"kind", analyzer_kind_name(b.analyzer.kind)},
                        {"ngram_min", b.analyzer.ngram_min},
                        {"ngram_max", b.analyzer.ngram_max},
                        {"lowercase", b.analyzer.lowercase},
                        {"weight", b.weight}});
    }
    j["features"] = {{"blocks", blocks}};
  }
  j["train"] = {{"c", cfg.train.c}, {"max_iter", cfg.train.max_iter}, {"tol", cfg.train.tol}};
  if (!cfg.train.class_weights.empty()) j["train"]["class_weights"] = cfg.train.class_weights;
  j["preprocessing"] = {{"na", cfg.preprocessing.normalize_arabic},
                        {"re", cfg.preprocessing.replace_emojis}};
  j["scope"] = scope_name(cfg.scope);
  j["metric"] = headline_metric_name(cfg.metric);
  j["split"] = {{"dev_fraction", cfg.dev_fraction}, {"use_column", cfg.use_split_column}};
  j["seed"] = cfg.seed;
  json sweep = json::object();
  if (!cfg.ngram_ranges.empty()) {
    json ranges = json::array();
    for (const auto& [lo, hi] : cfg.ngram_ranges) ranges.push_back({lo, hi});
    sweep["ngram_ranges"] = ranges;
  }
  if (!cfg.weight_grid.empty()) sweep["weight_grid"] = cfg.weight_grid;
  if (!sweep.empty()) j["sweep"] = sweep;
  return j;
}

const TrainedPipeline::Member& TrainedPipeline::member_for(const std::string& target) const {
  for (const auto& m : members) {
    if (m.target == kPooledTarget || m.target == target) return m;
  }
  throw Error(ErrorCode::kUnknownLabel, "no trained model for target '" + target + "'");
}

std::vector<Section> TrainedPipeline::to_sections() const {
  std::vector<Section> sections;
  Section head;
  std::vector<std::string> targets;
  for (const auto& m : members) targets.push_back(m.target);
  head.header = {{"type", "pipeline"},
                 {"pipeline", pipeline_name(pipeline)},
                 {"scope", scope_name(scope)},
                 {"preprocessing",
                  {{"na", preprocessing.normalize_arabic}, {"re", preprocessing.replace_emojis}}},
                 {"targets", targets}};
  sections.push_back(std::move(head));
  for (const auto& m : members) {
    if (m.features) {
      Section f = m.features->to_section();
      f.header["target"] = m.target;
      sections.push_back(std::move(f));
    }
    Section s = m.model.to_section();
    s.header["target"] = m.target;
    sections.push_back(std::move(s));
  }
  return sections;
}

std::vector<Section> TrainedPipeline::feature_sections() const {
  std::vector<Section> sections;
  for (const auto& m : members) {
    if (!m.features) continue;
    Section f = m.features->to_section();
    f.header["target"] = m.target;
    sections.push_back(std::move(f));
  }
  return sections;
}

TrainedPipeline TrainedPipeline::from_sections(const std::vector<Section>& sections) {
  if (sections.empty() || !sections[0].header.contains("type") ||
      sections[0].header["type"] != "pipeline") {
    throw Error(ErrorCode::kFormat, "model file does not start with a pipeline section");
  }
  TrainedPipeline p;
  try {
    const auto& h = sections[0].header;
    p.pipeline = h.at("pipeline") == "embed_logreg" ? Pipeline::kEmbedLogreg
                                                    : Pipeline::kTfidfLsvc;
    p.scope = h.at("scope") == "pooled" ? Scope::kPooled : Scope::kPerTarget;
    p.preprocessing.normalize_arabic = h.at("preprocessing").at("na").get<bool>();
    p.preprocessing.replace_emojis = h.at("preprocessing").at("re").get<bool>();
    std::optional<FittedUnion> pending;
    for (size_t s = 1; s < sections.size(); ++s) {
      const auto& type = sections[s].header.at("type");
      if (type == "fitted_union") {
        pending = FittedUnion::from_section(sections[s]);
      } else if (type == "linear_model") {
        Member m;
        m.target = sections[s].header.at("target").get<std::string>();
        m.features = std::move(pending);
        pending.reset();
        m.model = LinearModel::from_section(sections[s]);
        if (p.pipeline == Pipeline::kTfidfLsvc &&
            (!m.features || m.features->total_dim() != m.model.dim())) {
          throw Error(ErrorCode::kFormat, "model for target '" + m.target +
                                              "' lacks a matching feature union");
        }
        p.members.push_back(std::move(m));
      } else {
        throw Error(ErrorCode::kFormat, "unexpected section type in model file");
      }
    }
    if (p.members.size() != h.at("targets").size()) {
      throw Error(ErrorCode::kFormat, "model file target list does not match its sections");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("pipeline header: ") + e.what());
  }
  return p;
}

TrainedPipeline fit_pipeline(const ExperimentConfig& cfg, const Dataset& train,
                             const EmbeddingTable* embeddings) {
  if (train.empty()) throw Error(ErrorCode::kEmptyCorpus, "training set is empty");
  TrainedPipeline p;
  p.pipeline = cfg.pipeline;
  p.preprocessing = cfg.preprocessing;
  p.scope = cfg.scope;
  if (cfg.scope == Scope::kPooled) {
    p.members.push_back(fit_member(cfg, train, kPooledTarget, embeddings));
  } else {
    auto targets = train.targets();
    std::sort(targets.begin(), targets.end());
    for (const auto& t : targets) {
      try {
        p.members.push_back(fit_member(cfg, train.filter_target(t), t, embeddings));
      } catch (const Error& e) {
        throw Error(e.code(), "target '" + t + "': " + e.what());
      }
    }
  }
  return p;
}

std::vector<Prediction> predict_records(const TrainedPipeline& pipeline, const Dataset& ds,
                                        const EmbeddingTable* embeddings) {
  if (pipeline.pipeline == Pipeline::kEmbedLogreg && !embeddings) {
    throw Error(ErrorCode::kInvalidArgument, "embed_logreg models need embeddings");
  }
  std::vector<Prediction> out;
  out.reserve(ds.size());
  for (const auto& r : ds.records) {
    const auto& m = pipeline.member_for(r.target);
    SparseVector v;
    if (pipeline.pipeline == Pipeline::kTfidfLsvc) {
      v = transform_union(*m.features, preprocess(r.text, pipeline.preprocessing));
    } else {
      const auto* e = embeddings->find(r.id);
      if (!e) throw Error(ErrorCode::kMissingEmbedding, "no embedding for id '" + r.id + "'");
      if (e->size() != m.model.dim()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "embedding dim " + std::to_string(e->size()) + " != model dim " +
                        std::to_string(m.model.dim()));
      }
      v = SparseVector::from_dense(*e);
    }
    Prediction p;
    p.scores = m.model.decision_scores(v);
    size_t best = 0;
    for (size_t k = 1; k < p.scores.size(); ++k) {
      if (p.scores[k] > p.scores[best]) best = k;
    }
    p.label = m.model.classes()[best];
    out.push_back(std::move(p));
  }
  return out;
}

ExperimentResult evaluate_pipeline(const TrainedPipeline& pipeline, const Dataset& ds,
                                   const EmbeddingTable* embeddings) {
  if (ds.empty()) throw Error(ErrorCode::kEmptyCorpus, "evaluation set is empty");
  const auto predictions = predict_records(pipeline, ds, embeddings);
  const auto& labels = stance_labels();
  std::vector<std::string> truth;
  std::vector<std::string> predicted;
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> by_target;
  for (size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds.records[i];
    if (r.stance.empty()) {
      throw Error(ErrorCode::kBadLabel, "evaluation record '" + r.id + "' has no stance");
    }
    truth.push_back(r.stance);
    predicted.push_back(predictions[i].label);
    by_target[r.target].first.push_back(r.stance);
    by_target[r.target].second.push_back(predictions[i].label);
  }
  ExperimentResult result;
  result.pooled = metrics(confusion(truth, predicted, labels));
  for (const auto& [target, pair] : by_target) {
    result.per_target.push_back({target, metrics(confusion(pair.first, pair.second, labels))});
  }
  if (pipeline.scope == Scope::kPerTarget) {
    double fa = 0.0;
    double macro = 0.0;
    for (const auto& t : result.per_target) {
      fa += t.report.f1_favor_against;
      macro += t.report.macro_f1_all;
    }
    const auto n = static_cast<double>(result.per_target.size());
    result.overall_f1_favor_against = fa / n;
    result.overall_macro_f1_all = macro / n;
  } else {
    result.overall_f1_favor_against = result.pooled.f1_favor_against;
    result.overall_macro_f1_all = result.pooled.macro_f1_all;
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& train,
                                const Dataset& dev, const EmbeddingTable* embeddings) {
  try {
    if (cfg.pipeline == Pipeline::kEmbedLogreg && !embeddings) {
      throw Error(ErrorCode::kInvalidArgument, "embed_logreg needs embeddings");
    }
    if (cfg.pipeline == Pipeline::kTfidfLsvc) cfg.features.validate();
    const auto pipeline = fit_pipeline(cfg, train, embeddings);
    return evaluate_pipeline(pipeline, dev, embeddings);
  } catch (const Error& e) {
    const std::string name = cfg.name.empty() ? std::string(pipeline_name(cfg.pipeline)) : cfg.name;
    throw Error(e.code(), "experiment '" + name + "': " + e.what());
  }
}

SplitResult make_split(const ExperimentConfig& cfg, const Dataset& ds) {
  if (cfg.use_split_column) {
    auto cols = split_by_column(ds);
    SplitResult r;
    r.train = std::move(cols.train);
    r.dev = std::move(cols.dev);
    return r;
  }
  return stratified_split(ds, cfg.dev_fraction, cfg.seed);
}

bool SweepResult::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok; });
}

SweepResult run_ngram_sweep(const ExperimentConfig& base,
                            const std::vector<std::pair<int, int>>& ranges,
                            const Dataset& train, const Dataset& dev, int jobs) {
  if (ranges.empty()) throw Error(ErrorCode::kInvalidArgument, "n-gram sweep needs ranges");
  if (base.pipeline != Pipeline::kTfidfLsvc) {
    throw Error(ErrorCode::kInvalidArgument, "n-gram sweeps apply to tfidf_lsvc only");
  }
  SweepResult result;
  result.mode = "ngram";
  result.metric = std::string(headline_metric_name(base.metric));
  result.rows.resize(ranges.size());
  run_parallel(ranges.size(), jobs, [&](size_t i) {
    ExperimentConfig cfg = base;
    for (auto& b : cfg.features.blocks) {
      b.analyzer.ngram_min = ranges[i].first;
      b.analyzer.ngram_max = ranges[i].second;
    }
    result.rows[i] = run_row(cfg, train, dev);
  });
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     if (a.ok != b.ok) return a.ok;
                     return a.ok && a.overall < b.overall;
                   });
  for (size_t i = 0; i < result.rows.size(); ++i) {
    result.rows[i].id = static_cast<int>(i + 1);
    if (result.rows[i].ok) result.best = i;
  }
  return result;
}

SweepResult run_weight_sweep(const ExperimentConfig& base,
                             const std::vector<std::vector<double>>& grid,
                             const Dataset& train, const Dataset& dev, int jobs) {
  if (base.pipeline != Pipeline::kTfidfLsvc) {
    throw Error(ErrorCode::kInvalidArgument, "weight sweeps apply to tfidf_lsvc only");
  }
  if (grid.size() != base.features.blocks.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "weight grid has " + std::to_string(grid.size()) + " lists for " +
                    std::to_string(base.features.blocks.size()) + " blocks");
  }
  size_t total = 1;
  for (const auto& values : grid) {
    if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "empty weight list");
    total *= values.size();
  }
  SweepResult result;
  result.mode = "weight";
  result.metric = std::string(headline_metric_name(base.metric));
  result.rows.resize(total);
  run_parallel(total, jobs, [&](size_t i) {
    ExperimentConfig cfg = base;
    // Mixed-radix decode with the first block as the most significant digit.
    size_t rest = i;
    for (size_t b = grid.size(); b-- > 0;) {
      cfg.features.blocks[b].weight = grid[b][rest % grid[b].size()];
      rest /= grid[b].size();
    }
    result.rows[i] = run_row(cfg, train, dev);
  });
  for (size_t i = 0; i < total; ++i) {
    result.rows[i].id = static_cast<int>(i + 1);
    if (result.rows[i].ok &&
        (!result.best || result.rows[i].overall > result.rows[*result.best].overall)) {
      result.best = i;
    }
  }
  return result;
}

TableFormat parse_table_format(std::string_view name) {
  if (name == "text") return TableFormat::kText;
  if (name == "csv") return TableFormat::kCsv;
  if (name == "json") return TableFormat::kJson;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown table format '" + std::string(name) + "' (text, csv, json)");
}

std::string emit_table(const SweepResult& result, TableFormat format) {
  std::ostringstream out;
  auto per_target_text = [](const SweepRow& row) {
    std::string s;
    for (const auto& [t, v] : row.per_target) {
      s += (s.empty() ? "" : ";") + t + "=" + format_double(v);
    }
    return s;
  };
  auto csv_field = [](const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };

  switch (format) {
    case TableFormat::kCsv: {
      out << "id,model,text_feat,configuration,other,f1,f1_favor_against,macro_f1_all,"
             "per_target,status,error\n";
      for (const auto& row : result.rows) {
        out << row.id << ',' << csv_field(row.model) << ',' << csv_field(row.text_features)
            << ',' << csv_field(row.configuration) << ',' << csv_field(row.other) << ',';
        if (row.ok) {
          out << format_double(row.overall) << ',' << format_double(row.overall_f1_favor_against)
              << ',' << format_double(row.overall_macro_f1_all);
        } else {
          out << ",,";
        }
        out << ',' << csv_field(per_target_text(row)) << ',' << (row.ok ? "ok" : "failed")
            << ',' << csv_field(row.error) << '\n';
      }
      break;
    }
    case TableFormat::kJson: {
      json j;
      j["mode"] = result.mode;
      j["metric"] = result.metric;
      j["best"] = result.best ? json(result.rows[*result.best].id) : json(nullptr);
      j["rows"] = json::array();
      for (const auto& row : result.rows) {
        json pt = json::object();
        for (const auto& [t, v] : row.per_target) pt[t] = v;
        json jr = {{"id", row.id},
                   {"model", row.model},
                   {"text_feat", row.text_features},
                   {"configuration", row.configuration},
                   {"other", row.other},
                   {"per_target", pt},
                   {"status", row.ok ? "ok" : "failed"},
                   {"error", row.error}};
        if (row.ok) {
          jr["f1"] = row.overall;
          jr["f1_favor_against"] = row.overall_f1_favor_against;
          jr["macro_f1_all"] = row.overall_macro_f1_all;
        } else {
          jr["f1"] = nullptr;
          jr["f1_favor_against"] = nullptr;
          jr["macro_f1_all"] = nullptr;
        }
        j["rows"].push_back(jr);
      }
      out << j.dump(2) << '\n';
      break;
    }
    case TableFormat::kText: {
      size_t feat_w = 9;
      size_t conf_w = 13;
      size_t other_w = 5;
      for (const auto& row : result.rows) {
        feat_w = std::max(feat_w, row.text_features.size());
        conf_w = std::max(conf_w, row.configuration.size());
        other_w = std::max(other_w, row.other.size());
      }
      auto cell = [](const std::string& s, size_t w) {
        return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
      };
      out << cell("Id", 4) << cell("Model", 7) << cell("Text Feat", feat_w + 2)
          << cell("Configuration", conf_w + 2) << cell("Other", other_w + 2) << "F1 ("
          << result.metric << ")\n";
      for (const auto& row : result.rows) {
        out << cell(std::to_string(row.id), 4) << cell(row.model, 7)
            << cell(row.text_features, feat_w + 2) << cell(row.configuration, conf_w + 2)
            << cell(row.other, other_w + 2)
            << (row.ok ? percent(row.overall) : "FAILED: " + row.error) << '\n';
      }
      if (result.best) {
        const auto& b = result.rows[*result.best];
        out << "best: row " << b.id << " (" << percent(b.overall) << ")\n";
      }
      break;
    }
  }
  return out.str();
}

}  // namespace stancekit
