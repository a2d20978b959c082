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

#ifndef STANCEKIT_DATA_H_
#define STANCEKIT_DATA_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stancekit/sparse.h"

namespace stancekit {

enum class Split { kTrain, kDev, kTest };

std::string_view split_name(Split s);

struct StanceRecord {
  std::string id;
  std::string target;
  std::string text;
  std::string stance;  // "Favor", "Against" or "None"; empty when unlabeled
  std::optional<Split> split;

  friend bool operator==(const StanceRecord&, const StanceRecord&) = default;
};

struct Dataset {
  std::vector<StanceRecord> records;
  bool has_split_column = false;

  size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  // Distinct targets in order of first appearance.
  std::vector<std::string> targets() const;
  Dataset filter_target(std::string_view target) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct LoadOptions {
  // When false the stance column may be absent or blank (prediction input).
  bool require_stance = true;
};

// CSV with a header naming id,target,text,stance[,split] in any order.
// Comma separated, RFC 4180 quoting, UTF-8 only (a leading BOM is skipped).
// Stance values are matched case-insensitively and stored canonically.
// Errors: kMissingColumn, kBadLabel (with row), kDuplicateId,
// kEncodingError, kFormat.
Dataset read_dataset(std::istream& in, const LoadOptions& options = {});
Dataset load_dataset(const std::filesystem::path& path,
                     const LoadOptions& options = {});

// Writes the canonical CSV form: header id,target,text,stance[,split], LF
// line endings, fields quoted only when they contain , " CR or LF.
void write_dataset(std::ostream& out, const Dataset& ds);

struct StatsRow {
  std::string target;
  uint64_t tweets = 0;
  uint64_t favor = 0;
  uint64_t against = 0;
  uint64_t none = 0;

  friend bool operator==(const StatsRow&, const StatsRow&) = default;
};

// One row per target present (sorted by name) followed by an "All" row.
std::vector<StatsRow> dataset_stats(const Dataset& ds);

// Published per-target counts of the Mawqif corpus, "All" row last.
const std::vector<StatsRow>& mawqif_reference_stats();

// Compares computed rows against the published reference. Targets are
// matched by keyword (covid/vaccine, digital, women). Returns one note per
// discrepancy, including the reference table's own row-sum inconsistencies.
std::vector<std::string> compare_with_reference(const std::vector<StatsRow>& rows);

std::string render_stats(const std::vector<StatsRow>& rows);

struct SplitResult {
  Dataset train;
  Dataset dev;
  std::vector<std::string> warnings;
};

// Proportional sampling per (target, stance) stratum. The dev total is
// round(N * dev_fraction), spread over strata by largest remainder. A stratum
// that would lose all of its records to dev keeps one in train (warning).
// Both halves keep dataset order.
SplitResult stratified_split(const Dataset& ds, double dev_fraction, uint64_t seed);

struct ColumnSplit {
  Dataset train;
  Dataset dev;
  Dataset test;
};

// Honors the split column verbatim. Throws kMissingColumn if absent.
ColumnSplit split_by_column(const Dataset& ds);

struct EmbeddingTable {
  size_t dim = 0;
  std::vector<std::string> ids;  // file order
  std::unordered_map<std::string, std::vector<double>> vectors;

  const std::vector<double>* find(const std::string& id) const;
};

// JSON Lines: {"id": "...", "v": [numbers]} per line; blank lines ignored.
// Errors: kDimensionMismatch (line), kDuplicateId, kNonFiniteValue, kFormat.
EmbeddingTable read_embeddings(std::istream& in);
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void write_embeddings(std::ostream& out, const EmbeddingTable& table);

struct AlignedData {
  std::vector<SparseVector> x;
  std::vector<std::string> labels;
};

// Vectors in dataset order. Throws kMissingEmbedding listing absent ids.
AlignedData join_embeddings(const Dataset& ds, const EmbeddingTable& emb);

}  // namespace stancekit

#endif  // STANCEKIT_DATA_H_
