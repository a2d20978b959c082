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

#include "stancekit/metrics.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "stancekit/error.h"

namespace stancekit {
namespace {

double ratio(uint64_t num, uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct Fraction {
  uint64_t num;
  uint64_t den;  // 0 stands for the value 0
};

// Mean of `count` fractions (missing ones count as 0), rounded once from the
// exact rational when it fits in 53 bits; else `fallback_sum / count`.
double mean_of_fractions(const std::vector<Fraction>& parts, size_t count,
                         double fallback_sum) {
  __extension__ typedef unsigned __int128 u128;
  constexpr u128 kExact = u128{1} << 53;
  u128 num = 0;
  u128 den = 1;
  for (const auto& f : parts) {
    if (f.den == 0 || f.num == 0) continue;
    const uint64_t g = std::gcd(f.num, f.den);
    const u128 n = f.num / g;
    const u128 d = f.den / g;
    const u128 l = den / std::gcd(static_cast<uint64_t>(den), static_cast<uint64_t>(d)) * d;
    num = num * (l / den) + n * (l / d);
    den = l;
    if (den >= kExact || num >= kExact) return fallback_sum / static_cast<double>(count);
  }
  den *= count;
  if (den >= kExact) return fallback_sum / static_cast<double>(count);
  const u128 g = std::gcd(static_cast<uint64_t>(num), static_cast<uint64_t>(den));
  return static_cast<double>(static_cast<uint64_t>(num / g)) /
         static_cast<double>(static_cast<uint64_t>(den / g));
}

std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

const std::vector<std::string>& stance_labels() {
  static const std::vector<std::string> labels = {kAgainst, kFavor, kNone};
  return labels;
}

uint64_t ConfusionMatrix::total() const {
  uint64_t sum = 0;
  for (const auto& row : counts) {
    for (uint64_t c : row) sum += c;
  }
  return sum;
}

ConfusionMatrix confusion(std::span<const std::string> y_true,
                          std::span<const std::string> y_pred,
                          std::span<const std::string> classes) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(y_true.size()) + " true labels vs " +
                    std::to_string(y_pred.size()) + " predictions");
  }
  if (y_true.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "nothing to evaluate");
  }
  ConfusionMatrix cm;
  cm.classes.assign(classes.begin(), classes.end());
  cm.counts.assign(classes.size(), std::vector<uint64_t>(classes.size(), 0));
  auto index_of = [&](const std::string& label) {
    auto it = std::find(cm.classes.begin(), cm.classes.end(), label);
    if (it == cm.classes.end()) {
      throw Error(ErrorCode::kUnknownLabel, "label '" + label + "' is not a known class");
    }
    return static_cast<size_t>(it - cm.classes.begin());
  };
  for (size_t t = 0; t < y_true.size(); ++t) {
    ++cm.counts[index_of(y_true[t])][index_of(y_pred[t])];
  }
  return cm;
}

const ClassScores* MetricsReport::find(const std::string& label) const {
  for (const auto& c : per_class) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.confusion = cm;
  const size_t k = cm.classes.size();
  uint64_t correct = 0;
  double f1_sum = 0.0;
  std::vector<Fraction> f1_fractions;
  for (size_t c = 0; c < k; ++c) {
    const uint64_t tp = cm.counts[c][c];
    uint64_t predicted = 0;
    uint64_t actual = 0;
    for (size_t o = 0; o < k; ++o) {
      predicted += cm.counts[o][c];
      actual += cm.counts[c][o];
    }
    ClassScores s;
    s.label = cm.classes[c];
    s.precision = ratio(tp, predicted);
    s.recall = ratio(tp, actual);
    // 2PR/(P+R) == 2tp/(predicted+actual), which stays exact in integers.
    s.f1 = ratio(2 * tp, predicted + actual);
    s.support = actual;
    correct += tp;
    f1_sum += s.f1;
    f1_fractions.push_back({2 * tp, predicted + actual});
    r.per_class.push_back(std::move(s));
  }
  r.macro_f1_all = k == 0 ? 0.0 : mean_of_fractions(f1_fractions, k, f1_sum);
  std::vector<Fraction> fa;
  double fa_sum = 0.0;
  for (const char* label : {kFavor, kAgainst}) {
    for (size_t c = 0; c < k; ++c) {
      if (cm.classes[c] == label) {
        fa.push_back(f1_fractions[c]);
        fa_sum += r.per_class[c].f1;
      }
    }
  }
  r.f1_favor_against = mean_of_fractions(fa, 2, fa_sum);
  r.accuracy = ratio(correct, cm.total());
  return r;
}

std::string_view headline_metric_name(HeadlineMetric m) {
  return m == HeadlineMetric::kF1FavorAgainst ? "f1_favor_against" : "macro_f1_all";
}

HeadlineMetric parse_headline_metric(std::string_view name) {
  if (name == "f1_favor_against") return HeadlineMetric::kF1FavorAgainst;
  if (name == "macro_f1_all") return HeadlineMetric::kMacroF1All;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown metric '" + std::string(name) +
                  "' (expected f1_favor_against or macro_f1_all)");
}

double headline(const MetricsReport& report, HeadlineMetric m) {
  return m == HeadlineMetric::kF1FavorAgainst ? report.f1_favor_against
                                              : report.macro_f1_all;
}

std::string render_text(const MetricsReport& report) {
  std::ostringstream out;
  out << "class       precision  recall     f1         support\n";
  for (const auto& c : report.per_class) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-11s %-10s %-10s %-10s %llu\n",
                  c.label.c_str(), fixed(c.precision).c_str(),
                  fixed(c.recall).c_str(), fixed(c.f1).c_str(),
                  static_cast<unsigned long long>(c.support));
    out << line;
  }
  out << "\naccuracy          " << fixed(report.accuracy) << '\n'
      << "macro_f1_all      " << fixed(report.macro_f1_all) << '\n'
      << "f1_favor_against  " << fixed(report.f1_favor_against) << '\n'
      << "\nconfusion (rows = true, cols = predicted)\n";
  out << "            ";
  for (const auto& label : report.confusion.classes) {
    char cell[32];
    std::snprintf(cell, sizeof(cell), "%-9s", label.c_str());
    out << cell;
  }
  out << '\n';
  for (size_t i = 0; i < report.confusion.classes.size(); ++i) {
    char head[32];
    std::snprintf(head, sizeof(head), "%-12s", report.confusion.classes[i].c_str());
    out << head;
    for (uint64_t c : report.confusion.counts[i]) {
      char cell[32];
      std::snprintf(cell, sizeof(cell), "%-9llu", static_cast<unsigned long long>(c));
      out << cell;
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["accuracy"] = report.accuracy;
  j["macro_f1_all"] = report.macro_f1_all;
  j["f1_favor_against"] = report.f1_favor_against;
  j["per_class"] = nlohmann::json::array();
  for (const auto& c : report.per_class) {
    j["per_class"].push_back({{"label", c.label},
                              {"precision", c.precision},
                              {"recall", c.recall},
                              {"f1", c.f1},
                              {"support", c.support}});
  }
  j["confusion"] = {{"classes", report.confusion.classes},
                    {"counts", report.confusion.counts}};
  return j;
}

}  // namespace stancekit
