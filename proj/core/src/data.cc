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

#include "stancekit/data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stancekit/error.h"
#include "stancekit/metrics.h"
#include "stancekit/utf8.h"

namespace stancekit {
namespace {

using Row = std::vector<std::string>;

struct ParsedRow {
  Row fields;
  size_t line;  // 1-based line where the row starts
};

std::vector<ParsedRow> parse_csv(std::string_view text) {
  std::vector<ParsedRow> rows;
  size_t pos = 0;
  size_t line = 1;
  const size_t n = text.size();
  while (pos < n) {
    ParsedRow row{{}, line};
    std::string field;
    bool row_done = false;
    while (!row_done) {
      field.clear();
      if (pos < n && text[pos] == '"') {
        const size_t open_line = line;
        ++pos;
        while (true) {
          if (pos >= n) {
            throw Error(ErrorCode::kFormat,
                        "unterminated quoted field starting on line " +
                            std::to_string(open_line));
          }
          const char c = text[pos++];
          if (c == '"') {
            if (pos < n && text[pos] == '"') {
              field.push_back('"');
              ++pos;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
          }
        }
        if (pos < n && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          throw Error(ErrorCode::kFormat,
                      "unexpected character after closing quote on line " +
                          std::to_string(line));
        }
      } else {
        while (pos < n && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          if (text[pos] == '"') {
            throw Error(ErrorCode::kFormat,
                        "stray quote in unquoted field on line " + std::to_string(line));
          }
          field.push_back(text[pos++]);
        }
      }
      row.fields.push_back(field);
      if (pos >= n) {
        row_done = true;
      } else if (text[pos] == ',') {
        ++pos;
      } else {
        if (text[pos] == '\r') ++pos;
        if (pos < n && text[pos] == '\n') ++pos;
        ++line;
        row_done = true;
      }
    }
    // Skip fully blank lines.
    if (!(row.fields.size() == 1 && row.fields[0].empty())) rows.push_back(std::move(row));
  }
  return rows;
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<std::string> canonical_stance(std::string_view raw) {
  const std::string v = lower_ascii(trim(raw));
  if (v == "favor") return std::string(kFavor);
  if (v == "against") return std::string(kAgainst);
  if (v == "none") return std::string(kNone);
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view raw) {
  const std::string v = lower_ascii(trim(raw));
  if (v == "train") return Split::kTrain;
  if (v == "dev") return Split::kDev;
  if (v == "test") return Split::kTest;
  return std::nullopt;
}

void write_field(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

std::string reference_key(std::string_view target) {
  const std::string t = lower_ascii(target);
  if (t.find("covid") != std::string::npos || t.find("vaccine") != std::string::npos) {
    return "COVID-19 Vaccine";
  }
  if (t.find("digital") != std::string::npos) return "Digital Transformation";
  if (t.find("women") != std::string::npos) return "Women Empowerment";
  return {};
}

std::string pad(std::string s, size_t width) {
  // Width is counted in code points so Arabic target names line up.
  size_t cps = 0;
  for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
  if (cps < width) s.append(width - cps, ' ');
  return s;
}

}  // namespace

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

std::vector<std::string> Dataset::targets() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.target).second) out.push_back(r.target);
  }
  return out;
}

Dataset Dataset::filter_target(std::string_view target) const {
  Dataset out;
  out.has_split_column = has_split_column;
  for (const auto& r : records) {
    if (r.target == target) out.records.push_back(r);
  }
  return out;
}

Dataset read_dataset(std::istream& in, const LoadOptions& options) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);
  if (auto bad = utf8::find_invalid(text)) {
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(*bad), '\n');
    throw Error(ErrorCode::kEncodingError,
                "invalid UTF-8 on line " + std::to_string(line));
  }
  auto rows = parse_csv(text);
  if (rows.empty()) throw Error(ErrorCode::kMissingColumn, "CSV has no header row");

  std::map<std::string, size_t> column;
  for (size_t c = 0; c < rows[0].fields.size(); ++c) {
    column.emplace(lower_ascii(trim(rows[0].fields[c])), c);
  }
  std::vector<std::string> missing;
  for (const char* name : {"id", "target", "text"}) {
    if (!column.count(name)) missing.emplace_back(name);
  }
  if (options.require_stance && !column.count("stance")) missing.emplace_back("stance");
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw Error(ErrorCode::kMissingColumn, "CSV header lacks column(s): " + names);
  }
  const bool has_stance = column.count("stance") > 0;
  const bool has_split = column.count("split") > 0;

  Dataset ds;
  ds.has_split_column = has_split;
  std::set<std::string> ids;
  const size_t width = rows[0].fields.size();
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "row " + std::to_string(r) + " (line " +
                              std::to_string(row.line) + ")";
    if (row.fields.size() != width) {
      throw Error(ErrorCode::kFormat, where + ": expected " + std::to_string(width) +
                                          " fields, found " +
                                          std::to_string(row.fields.size()));
    }
    StanceRecord rec;
    rec.id = row.fields[column["id"]];
    rec.target = row.fields[column["target"]];
    rec.text = row.fields[column["text"]];
    if (rec.id.empty()) throw Error(ErrorCode::kFormat, where + ": empty id");
    if (has_stance) {
      const std::string& raw = row.fields[column["stance"]];
      if (auto s = canonical_stance(raw)) {
        rec.stance = *s;
      } else if (!(raw.empty() && !options.require_stance)) {
        throw Error(ErrorCode::kBadLabel, where + ": bad stance '" + raw + "'");
      }
    }
    if (has_split) {
      const std::string& raw = row.fields[column["split"]];
      if (!trim(raw).empty()) {
        rec.split = parse_split(raw);
        if (!rec.split) {
          throw Error(ErrorCode::kBadLabel, where + ": bad split '" + raw + "'");
        }
      }
    }
    if (!ids.insert(rec.id).second) {
      throw Error(ErrorCode::kDuplicateId, where + ": duplicate id '" + rec.id + "'");
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return read_dataset(in, options);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_dataset(std::ostream& out, const Dataset& ds) {
  out << "id,target,text,stance";
  if (ds.has_split_column) out << ",split";
  out << '\n';
  for (const auto& r : ds.records) {
    write_field(out, r.id);
    out << ',';
    write_field(out, r.target);
    out << ',';
    write_field(out, r.text);
    out << ',';
    write_field(out, r.stance);
    if (ds.has_split_column) {
      out << ',';
      if (r.split) out << split_name(*r.split);
    }
    out << '\n';
  }
}

std::vector<StatsRow> dataset_stats(const Dataset& ds) {
  std::map<std::string, StatsRow> by_target;
  StatsRow all{"All"};
  for (const auto& r : ds.records) {
    auto& row = by_target[r.target];
    row.target = r.target;
    for (StatsRow* s : {&row, &all}) {
      ++s->tweets;
      if (r.stance == kFavor) ++s->favor;
      if (r.stance == kAgainst) ++s->against;
      if (r.stance == kNone) ++s->none;
    }
  }
  std::vector<StatsRow> rows;
  for (auto& [_, row] : by_target) rows.push_back(row);
  if (!rows.empty()) rows.push_back(all);
  return rows;
}

const std::vector<StatsRow>& mawqif_reference_stats() {
  static const std::vector<StatsRow> rows = {
      {"COVID-19 Vaccine", 1167, 508, 507, 152},
      {"Digital Transformation", 1145, 879, 142, 22},
      {"Women Empowerment", 1190, 761, 371, 59},
      {"All", 3502, 2154, 1020, 332},
  };
  return rows;
}

std::vector<std::string> compare_with_reference(const std::vector<StatsRow>& rows) {
  std::vector<std::string> notes;
  const auto& ref = mawqif_reference_stats();
  bool matched_any = false;
  for (const auto& row : rows) {
    if (row.target == "All") continue;
    const std::string key = reference_key(row.target);
    if (key.empty()) continue;
    matched_any = true;
    const auto it = std::find_if(ref.begin(), ref.end(),
                                 [&](const StatsRow& r) { return r.target == key; });
    auto check = [&](const char* what, uint64_t got, uint64_t want) {
      if (got != want) {
        notes.push_back(row.target + ": " + what + " = " + std::to_string(got) +
                        ", reference " + key + " = " + std::to_string(want));
      }
    };
    check("#tweets", row.tweets, it->tweets);
    check("#favor", row.favor, it->favor);
    check("#against", row.against, it->against);
    check("#none", row.none, it->none);
  }
  if (!matched_any) return notes;
  for (const auto& r : ref) {
    const uint64_t sum = r.favor + r.against + r.none;
    if (sum != r.tweets) {
      notes.push_back("reference row " + r.target + ": favor+against+none = " +
                      std::to_string(sum) + " but #tweets = " +
                      std::to_string(r.tweets));
    }
  }
  return notes;
}

std::string render_stats(const std::vector<StatsRow>& rows) {
  size_t width = 6;
  for (const auto& r : rows) {
    size_t cps = 0;
    for (unsigned char c : r.target) cps += (c & 0xC0) != 0x80;
    width = std::max(width, cps);
  }
  std::ostringstream out;
  out << pad("Target", width + 2) << "#Tweets  #Favor  #Against  #None\n";
  for (const auto& r : rows) {
    char nums[96];
    std::snprintf(nums, sizeof(nums), "%-8llu %-7llu %-9llu %llu",
                  static_cast<unsigned long long>(r.tweets),
                  static_cast<unsigned long long>(r.favor),
                  static_cast<unsigned long long>(r.against),
                  static_cast<unsigned long long>(r.none));
    out << pad(r.target, width + 2) << nums << '\n';
  }
  return out.str();
}

SplitResult stratified_split(const Dataset& ds, double dev_fraction, uint64_t seed) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dev_fraction must lie in (0,1)");
  }
  struct Stratum {
    std::string target;
    std::string stance;
    std::vector<size_t> members;
    size_t dev = 0;
    double remainder = 0.0;
  };
  std::vector<Stratum> strata;
  std::map<std::pair<std::string, std::string>, size_t> lookup;
  for (size_t i = 0; i < ds.records.size(); ++i) {
    const auto key = std::make_pair(ds.records[i].target, ds.records[i].stance);
    auto [it, inserted] = lookup.emplace(key, strata.size());
    if (inserted) strata.push_back({key.first, key.second, {}, 0, 0.0});
    strata[it->second].members.push_back(i);
  }

  const size_t n = ds.records.size();
  const auto wanted = static_cast<size_t>(std::llround(static_cast<double>(n) * dev_fraction));
  size_t assigned = 0;
  for (auto& s : strata) {
    const double quota = static_cast<double>(s.members.size()) * dev_fraction;
    s.dev = static_cast<size_t>(std::floor(quota));
    s.remainder = quota - static_cast<double>(s.dev);
    assigned += s.dev;
  }
  std::vector<size_t> by_remainder(strata.size());
  for (size_t k = 0; k < strata.size(); ++k) by_remainder[k] = k;
  std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](size_t a, size_t b) {
    return strata[a].remainder > strata[b].remainder;
  });
  for (size_t k : by_remainder) {
    if (assigned >= wanted) break;
    if (strata[k].dev < strata[k].members.size()) {
      ++strata[k].dev;
      ++assigned;
    }
  }

  SplitResult result;
  std::vector<bool> to_dev(n, false);
  std::mt19937_64 rng(seed);
  for (auto& s : strata) {
    if (s.dev > 0 && s.dev >= s.members.size()) {
      s.dev = s.members.size() - 1;
      result.warnings.push_back("stratum (" + s.target + ", " + s.stance + ") has " +
                                std::to_string(s.members.size()) +
                                " record(s); keeping one in train");
    }
    std::vector<size_t> order = s.members;
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<size_t>(rng() % i)]);
    }
    for (size_t k = 0; k < s.dev; ++k) to_dev[order[k]] = true;
  }
  result.train.has_split_column = ds.has_split_column;
  result.dev.has_split_column = ds.has_split_column;
  for (size_t i = 0; i < n; ++i) {
    (to_dev[i] ? result.dev : result.train).records.push_back(ds.records[i]);
  }
  return result;
}

ColumnSplit split_by_column(const Dataset& ds) {
  if (!ds.has_split_column) {
    throw Error(ErrorCode::kMissingColumn, "dataset has no split column");
  }
  ColumnSplit out;
  for (Dataset* d : {&out.train, &out.dev, &out.test}) d->has_split_column = true;
  for (const auto& r : ds.records) {
    if (!r.split) {
      throw Error(ErrorCode::kBadLabel, "record '" + r.id + "' has an empty split");
    }
    switch (*r.split) {
      case Split::kTrain: out.train.records.push_back(r); break;
      case Split::kDev: out.dev.records.push_back(r); break;
      case Split::kTest: out.test.records.push_back(r); break;
    }
  }
  return out;
}

const std::vector<double>* EmbeddingTable::find(const std::string& id) const {
  auto it = vectors.find(id);
  return it == vectors.end() ? nullptr : &it->second;
}

EmbeddingTable read_embeddings(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  size_t line_no = 0;
  bool have_dim = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::out_of_range& e) {
      // 406: a number literal overflowing binary64
      throw Error(e.id == 406 ? ErrorCode::kNonFiniteValue : ErrorCode::kFormat,
                  where + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("v") || !j["v"].is_array()) {
      throw Error(ErrorCode::kFormat, where + ": expected {\"id\": string, \"v\": [numbers]}");
    }
    std::vector<double> v;
    v.reserve(j["v"].size());
    for (const auto& x : j["v"]) {
      if (!x.is_number()) throw Error(ErrorCode::kFormat, where + ": non-numeric vector entry");
      const double d = x.get<double>();
      if (!std::isfinite(d)) throw Error(ErrorCode::kNonFiniteValue, where + ": non-finite value");
      v.push_back(d);
    }
    if (!have_dim) {
      table.dim = v.size();
      have_dim = true;
    } else if (v.size() != table.dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  where + ": vector length " + std::to_string(v.size()) +
                      " differs from " + std::to_string(table.dim));
    }
    auto id = j["id"].get<std::string>();
    if (table.vectors.count(id)) {
      throw Error(ErrorCode::kDuplicateId, where + ": duplicate id '" + id + "'");
    }
    table.ids.push_back(id);
    table.vectors.emplace(std::move(id), std::move(v));
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return read_embeddings(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
  for (const auto& id : table.ids) {
    nlohmann::json j = {{"id", id}, {"v", table.vectors.at(id)}};
    out << j.dump() << '\n';
  }
}

AlignedData join_embeddings(const Dataset& ds, const EmbeddingTable& emb) {
  AlignedData out;
  std::vector<std::string> missing;
  for (const auto& r : ds.records) {
    const auto* v = emb.find(r.id);
    if (!v) {
      missing.push_back(r.id);
      continue;
    }
    out.x.push_back(SparseVector::from_dense(*v));
    out.labels.push_back(r.stance);
  }
  if (!missing.empty()) {
    std::string list;
    for (size_t k = 0; k < missing.size() && k < 10; ++k) {
      list += (k ? ", " : "") + missing[k];
    }
    if (missing.size() > 10) list += ", ... (" + std::to_string(missing.size()) + " total)";
    throw Error(ErrorCode::kMissingEmbedding, "no embedding for id(s): " + list);
  }
  return out;
}

}  // namespace stancekit
