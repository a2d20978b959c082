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

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "stancekit/container.h"
#include "stancekit/data.h"
#include "stancekit/error.h"
#include "stancekit/experiments.h"
#include "stancekit/metrics.h"
#include "stancekit/preproc.h"

namespace stancekit::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kFormatsHelp = R"(File formats
  dataset CSV    UTF-8, comma separated, RFC 4180 quoting. Header names
                 id,target,text,stance[,split] in any order; stance is
                 Favor|Against|None, split is train|dev|test.
  embeddings     JSON Lines, one {"id": "...", "v": [numbers]} per line, all
                 vectors the same length.
  model file     binary container: "STKC", u32 version (1), u32 section
                 count, then per section u64 header length, compact JSON
                 header, u64 float64 count, little-endian float64 payload.
                 Sections: pipeline, then per target [fitted_union]
                 linear_model.
  features file  same container holding fitted_union sections only.
  config         JSON experiment config (see `export-config`).
  predictions    CSV id,predicted_stance[,score_Against,score_Favor,score_None]
)";

struct Shared {
  std::string config_path;
  std::string preset;
  std::optional<uint64_t> seed;
  std::optional<double> c;
  std::string scope;
  std::string metric;
  bool na = false;
  bool re = false;
  std::string data;
  std::string embeddings;
};

void add_experiment_flags(CLI::App* cmd, Shared& s) {
  auto* config = cmd->add_option("--config", s.config_path, "Experiment config (JSON)");
  auto* preset = cmd->add_option("--preset", s.preset, "Built-in config: baseline, tw1, embed");
  config->excludes(preset);
  cmd->add_option("--seed", s.seed, "Seed for the split and the trainers (overrides config)");
  cmd->add_option("--c", s.c, "Regularization parameter C (overrides config)");
  cmd->add_option("--scope", s.scope, "per_target or pooled (overrides config)")
      ->check(CLI::IsMember({"per_target", "pooled"}));
  cmd->add_option("--metric", s.metric, "f1_favor_against or macro_f1_all (overrides config)")
      ->check(CLI::IsMember({"f1_favor_against", "macro_f1_all"}));
  cmd->add_flag("--na", s.na, "Enable Arabic normalization");
  cmd->add_flag("--re", s.re, "Enable emoji replacement");
  cmd->add_option("--data", s.data, "Dataset CSV")->required();
  cmd->add_option("--embeddings", s.embeddings, "Embeddings JSONL (embed_logreg)");
}

ExperimentConfig resolve_config(const Shared& s) {
  ExperimentConfig cfg;
  if (!s.config_path.empty()) {
    cfg = load_config(s.config_path);
  } else if (!s.preset.empty()) {
    cfg = preset_config(s.preset);
  } else {
    throw Error(ErrorCode::kConfig, "one of --config or --preset is required");
  }
  if (s.seed) cfg.seed = *s.seed;
  if (s.c) {
    if (!(*s.c > 0.0)) throw Error(ErrorCode::kConfig, "--c must be positive");
    cfg.train.c = *s.c;
  }
  if (!s.scope.empty()) cfg.scope = s.scope == "pooled" ? Scope::kPooled : Scope::kPerTarget;
  if (!s.metric.empty()) cfg.metric = parse_headline_metric(s.metric);
  if (s.na) cfg.preprocessing.normalize_arabic = true;
  if (s.re) cfg.preprocessing.replace_emojis = true;
  return cfg;
}

std::optional<EmbeddingTable> maybe_embeddings(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_embeddings(path);
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::string render_result(const ExperimentResult& r, HeadlineMetric metric) {
  std::ostringstream out;
  for (const auto& t : r.per_target) {
    out << "== target: " << t.target << '\n' << render_text(t.report) << '\n';
  }
  out << "== all targets (pooled predictions)\n" << render_text(r.pooled) << '\n';
  out << "overall f1_favor_against  " << format_double(r.overall_f1_favor_against) << '\n'
      << "overall macro_f1_all      " << format_double(r.overall_macro_f1_all) << '\n'
      << "headline (" << headline_metric_name(metric) << ")  "
      << format_double(r.overall(metric)) << '\n';
  return out.str();
}

nlohmann::json result_json(const ExperimentResult& r) {
  nlohmann::json j;
  j["overall"] = {{"f1_favor_against", r.overall_f1_favor_against},
                  {"macro_f1_all", r.overall_macro_f1_all}};
  j["pooled"] = to_json(r.pooled);
  j["per_target"] = nlohmann::json::object();
  for (const auto& t : r.per_target) j["per_target"][t.target] = to_json(t.report);
  return j;
}

int cmd_prep(const std::string& in_path, const std::string& out_path, bool na, bool re,
             std::istream& in, std::ostream& out) {
  std::ifstream file_in;
  std::istream* src = &in;
  if (!in_path.empty()) {
    file_in.open(in_path, std::ios::binary);
    if (!file_in) throw Error(ErrorCode::kIo, "cannot open " + in_path);
    src = &file_in;
  }
  std::ofstream file_out;
  std::ostream* dst = &out;
  if (!out_path.empty()) {
    file_out.open(out_path, std::ios::binary | std::ios::trunc);
    if (!file_out) throw Error(ErrorCode::kIo, "cannot write " + out_path);
    dst = &file_out;
  }
  const PreprocessFlags flags{na, re};
  std::string line;
  size_t line_no = 0;
  while (std::getline(*src, line)) {
    ++line_no;
    try {
      *dst << preprocess(line, flags) << '\n';
    } catch (const Error& e) {
      throw Error(e.code(), (in_path.empty() ? "<stdin>" : in_path) + ":" +
                                std::to_string(line_no) + ": " + e.what());
    }
  }
  return 0;
}

int cmd_stats(const std::string& data, bool reference, std::ostream& out) {
  const auto ds = load_dataset(data);
  const auto rows = dataset_stats(ds);
  out << render_stats(rows);
  if (reference) {
    const auto notes = compare_with_reference(rows);
    if (!notes.empty()) {
      out << "\nnotes (computed counts vs. published Mawqif table):\n";
      for (const auto& n : notes) out << "  - " << n << '\n';
    }
  }
  return 0;
}

int cmd_train(const Shared& s, const std::string& out_path, const std::string& features_path,
              bool no_split, const std::string& metrics_json, std::ostream& out,
              std::ostream& err) {
  const auto cfg = resolve_config(s);
  const auto ds = load_dataset(s.data);
  const auto emb = maybe_embeddings(s.embeddings);
  const EmbeddingTable* emb_ptr = emb ? &*emb : nullptr;

  Dataset train = ds;
  std::optional<Dataset> dev;
  if (!no_split) {
    auto split = make_split(cfg, ds);
    for (const auto& w : split.warnings) err << "warning: " << w << '\n';
    train = std::move(split.train);
    if (!split.dev.empty()) dev = std::move(split.dev);
  }
  out << "training " << pipeline_name(cfg.pipeline) << " (" << scope_name(cfg.scope) << ") on "
      << train.size() << " records" << (dev ? ", dev " + std::to_string(dev->size()) : "")
      << '\n';
  const auto pipeline = fit_pipeline(cfg, train, emb_ptr);
  if (!out_path.empty()) {
    write_container_file(out_path, pipeline.to_sections());
    out << "model written to " << out_path << '\n';
  }
  if (!features_path.empty()) {
    if (cfg.pipeline != Pipeline::kTfidfLsvc) {
      throw Error(ErrorCode::kConfig, "--save-features applies to tfidf_lsvc only");
    }
    write_container_file(features_path, pipeline.feature_sections());
    out << "features written to " << features_path << '\n';
  }
  if (dev) {
    const auto result = evaluate_pipeline(pipeline, *dev, emb_ptr);
    out << "\ndev metrics\n" << render_result(result, cfg.metric);
    if (!metrics_json.empty()) write_text_file(metrics_json, result_json(result).dump(2) + "\n");
  }
  return 0;
}

bool looks_like_jsonl(const std::string& path) {
  const auto ext = fs::path(path).extension().string();
  return ext == ".jsonl" || ext == ".ndjson";
}

int cmd_predict(const std::string& model_path, const std::string& in_path,
                const std::string& emb_path, const std::string& out_path, bool scores,
                std::ostream& out) {
  const auto pipeline = TrainedPipeline::from_sections(read_container_file(model_path));
  Dataset ds;
  std::optional<EmbeddingTable> emb = maybe_embeddings(emb_path);
  if (looks_like_jsonl(in_path)) {
    if (pipeline.pipeline != Pipeline::kEmbedLogreg) {
      throw Error(ErrorCode::kInvalidArgument, "JSONL input needs an embed_logreg model");
    }
    if (pipeline.members.size() != 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "model has one model per target; pass a dataset CSV with --embeddings so "
                  "records can be routed by target");
    }
    emb = load_embeddings(in_path);
    for (const auto& id : emb->ids) ds.records.push_back({id, pipeline.members[0].target, "", "", {}});
  } else {
    ds = load_dataset(in_path, LoadOptions{.require_stance = false});
  }
  const auto predictions = predict_records(pipeline, ds, emb ? &*emb : nullptr);

  std::ostringstream csv;
  csv << "id,predicted_stance";
  const auto& labels = stance_labels();
  if (scores) {
    for (const auto& l : labels) csv << ",score_" << l;
  }
  csv << '\n';
  for (size_t i = 0; i < ds.size(); ++i) {
    const std::string& id = ds.records[i].id;
    if (id.find_first_of(",\"\r\n") != std::string::npos) {
      csv << '"';
      for (char c : id) csv << (c == '"' ? "\"\"" : std::string(1, c));
      csv << '"';
    } else {
      csv << id;
    }
    csv << ',' << predictions[i].label;
    if (scores) {
      const auto& classes = pipeline.member_for(ds.records[i].target).model.classes();
      for (const auto& l : labels) {
        csv << ',';
        for (size_t k = 0; k < classes.size(); ++k) {
          if (classes[k] == l) csv << format_double(predictions[i].scores[k]);
        }
      }
    }
    csv << '\n';
  }
  if (out_path.empty()) {
    out << csv.str();
  } else {
    write_text_file(out_path, csv.str());
  }
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data, const std::string& emb_path,
             const std::string& metric, const std::string& json_path, std::ostream& out) {
  const auto pipeline = TrainedPipeline::from_sections(read_container_file(model_path));
  const auto ds = load_dataset(data);
  const auto emb = maybe_embeddings(emb_path);
  const auto result = evaluate_pipeline(pipeline, ds, emb ? &*emb : nullptr);
  out << render_result(result, parse_headline_metric(metric));
  if (!json_path.empty()) write_text_file(json_path, result_json(result).dump(2) + "\n");
  return 0;
}

int cmd_sweep(const Shared& s, const std::string& mode, int jobs, bool full_grid,
              const std::string& format, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  const auto cfg = resolve_config(s);
  const auto ds = load_dataset(s.data);
  auto split = make_split(cfg, ds);
  for (const auto& w : split.warnings) err << "warning: " << w << '\n';
  SweepResult result;
  if (mode == "ngram") {
    auto ranges = cfg.ngram_ranges;
    if (ranges.empty()) {
      for (int n = 1; n <= 10; ++n) ranges.emplace_back(1, n);
    }
    result = run_ngram_sweep(cfg, ranges, split.train, split.dev, jobs);
  } else {
    auto grid = cfg.weight_grid;
    if (grid.empty() || full_grid) grid = default_weight_grid(cfg.features.blocks.size(), full_grid);
    result = run_weight_sweep(cfg, grid, split.train, split.dev, jobs);
  }
  const std::string table = emit_table(result, parse_table_format(format));
  if (out_path.empty()) {
    out << table;
  } else {
    write_text_file(out_path, table);
  }
  if (result.any_failed()) {
    err << "error: one or more sweep rows failed\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"stancekit: stance detection with weighted TF-IDF unions and sentence embeddings"};
  app.name("stancekit");
  app.footer(kFormatsHelp);
  app.require_subcommand(1, 1);

  // prep
  std::string prep_in, prep_out;
  bool prep_na = false, prep_re = false;
  auto* prep = app.add_subcommand("prep", "Apply preprocessing line by line (emoji replacement, then normalization)");
  prep->add_flag("--na", prep_na, "Normalize Arabic (diacritics, tatweel, alef/yeh/heh folding)");
  prep->add_flag("--re", prep_re, "Replace emoji runs with \" [EMO] \"");
  prep->add_option("--in", prep_in, "Input text file (default: stdin)");
  prep->add_option("--out", prep_out, "Output file (default: stdout)");

  // stats
  std::string stats_data;
  bool stats_no_ref = false;
  auto* stats = app.add_subcommand("stats", "Per-target record and stance counts");
  stats->add_option("--data", stats_data, "Dataset CSV")->required();
  stats->add_flag("--no-reference", stats_no_ref, "Skip the comparison with the published Mawqif counts");

  // train
  Shared train_s;
  std::string train_out, train_features, train_metrics_json;
  bool train_no_split = false;
  auto* train = app.add_subcommand("train", "Fit a pipeline; report dev metrics when a split exists");
  add_experiment_flags(train, train_s);
  train->add_option("--out", train_out, "Model file to write");
  train->add_option("--save-features", train_features, "Write the fitted feature unions here");
  train->add_flag("--no-split", train_no_split, "Train on every record (no dev evaluation)");
  train->add_option("--metrics-json", train_metrics_json, "Also write dev metrics as JSON");

  // predict
  std::string pred_model, pred_in, pred_emb, pred_out;
  bool pred_scores = false;
  auto* predict = app.add_subcommand("predict", "Predict stances for a dataset CSV or embeddings JSONL");
  predict->add_option("--model", pred_model, "Model file from `train`")->required();
  predict->add_option("--in", pred_in, "Dataset CSV (stance optional) or embeddings .jsonl")->required();
  predict->add_option("--embeddings", pred_emb, "Embeddings JSONL for CSV input");
  predict->add_option("--out", pred_out, "Output CSV (default: stdout)");
  predict->add_flag("--scores", pred_scores, "Append per-class decision scores");

  // eval
  std::string eval_model, eval_data, eval_emb, eval_json, eval_metric = "f1_favor_against";
  auto* eval = app.add_subcommand("eval", "Evaluate a model on a labeled dataset");
  eval->add_option("--model", eval_model, "Model file from `train`")->required();
  eval->add_option("--data", eval_data, "Labeled dataset CSV")->required();
  eval->add_option("--embeddings", eval_emb, "Embeddings JSONL (embed_logreg)");
  eval->add_option("--metric", eval_metric, "Headline metric")
      ->check(CLI::IsMember({"f1_favor_against", "macro_f1_all"}));
  eval->add_option("--json", eval_json, "Also write the report as JSON");

  // sweep
  Shared sweep_s;
  std::string sweep_mode, sweep_format = "text", sweep_out;
  int sweep_jobs = 1;
  bool sweep_full = false;
  auto* sweep = app.add_subcommand("sweep", "Run an n-gram range or union weight sweep");
  add_experiment_flags(sweep, sweep_s);
  sweep->add_option("--mode", sweep_mode, "ngram or weight")
      ->required()
      ->check(CLI::IsMember({"ngram", "weight"}));
  sweep->add_option("--jobs", sweep_jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  sweep->add_flag("--full-grid", sweep_full, "Weight sweep over 0.1..1.0 per block");
  sweep->add_option("--format", sweep_format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  sweep->add_option("--out", sweep_out, "Write the table here (default: stdout)");

  // export-config
  std::string export_preset, export_out;
  auto* export_cfg = app.add_subcommand("export-config", "Print a built-in experiment config as JSON");
  export_cfg->add_option("--preset", export_preset, "baseline, tw1 or embed")
      ->required()
      ->check(CLI::IsMember({"baseline", "tw1", "embed"}));
  export_cfg->add_option("--out", export_out, "Output file (default: stdout)");

  std::vector<const char*> argv;
  argv.push_back("stancekit");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*prep) return cmd_prep(prep_in, prep_out, prep_na, prep_re, in, out);
    if (*stats) return cmd_stats(stats_data, !stats_no_ref, out);
    if (*train) {
      return cmd_train(train_s, train_out, train_features, train_no_split, train_metrics_json,
                       out, err);
    }
    if (*predict) return cmd_predict(pred_model, pred_in, pred_emb, pred_out, pred_scores, out);
    if (*eval) return cmd_eval(eval_model, eval_data, eval_emb, eval_metric, eval_json, out);
    if (*sweep) {
      return cmd_sweep(sweep_s, sweep_mode, sweep_jobs, sweep_full, sweep_format, sweep_out,
                       out, err);
    }
    if (*export_cfg) {
      const std::string text = config_to_json(preset_config(export_preset)).dump(2) + "\n";
      if (export_out.empty()) {
        out << text;
      } else {
        write_text_file(export_out, text);
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "error [" << error_code_name(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace stancekit::cli
