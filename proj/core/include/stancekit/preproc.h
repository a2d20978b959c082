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

#ifndef STANCEKIT_PREPROC_H_
#define STANCEKIT_PREPROC_H_

#include <string>
#include <string_view>
#include <vector>

namespace stancekit {

// Arabic orthographic normalization, applied code point by code point:
//
//   U+064B..U+0652  (tanween, harakat, shadda, sukun)   removed
//   U+0640          (tatweel)                            removed
//   U+0623 U+0625 U+0622 U+0671  (hamza/madda/wasla alef)  -> U+0627
//   U+0649          (alef maqsura)                       -> U+064A
//   U+0629          (ta marbuta)                         -> U+0647
//
// Everything else passes through. Idempotent. Input must be valid UTF-8.
std::string normalize_arabic(std::string_view text);

// Token inserted in place of every maximal run of emoji code points.
inline constexpr std::string_view kEmojiToken = " [EMO] ";

// True for code points in the emoji table: U+2600..U+27BF, U+1F300..U+1F5FF,
// U+1F600..U+1F64F, U+1F680..U+1F6FF, U+1F900..U+1F9FF, U+1FA70..U+1FAFF.
bool is_emoji(char32_t cp);

// Replaces each maximal run of emoji code points with kEmojiToken. Once a run
// has started, U+FE0F (emoji presentation selector) and U+200D (ZWJ) extend
// it, so "❤️" and ZWJ sequences collapse to a single token.
std::string replace_emojis(std::string_view text);

struct PreprocessFlags {
  bool normalize_arabic = false;  // "na"
  bool replace_emojis = false;    // "re"

  friend bool operator==(const PreprocessFlags&,
                         const PreprocessFlags&) = default;
};

// replace_emojis (if enabled) followed by normalize_arabic (if enabled).
std::string preprocess(std::string_view text, const PreprocessFlags& flags);

enum class AnalyzerKind { kWord, kChar, kCharWb };

std::string_view analyzer_kind_name(AnalyzerKind kind);
AnalyzerKind parse_analyzer_kind(std::string_view name);

struct AnalyzerSpec {
  AnalyzerKind kind = AnalyzerKind::kWord;
  int ngram_min = 1;
  int ngram_max = 1;
  bool lowercase = true;

  // Throws Error(kInvalidArgument) unless 1 <= ngram_min <= ngram_max.
  void validate() const;

  friend bool operator==(const AnalyzerSpec&, const AnalyzerSpec&) = default;
};

// Extracts features from `text`:
//   word    - n-grams of whitespace-delimited tokens joined by one space.
//   char    - code point n-grams over the raw string, spaces included.
//   char_wb - code point n-grams inside each word padded with one space on
//             each side. A padded word shorter than n contributes itself once.
// Grams are ordered left to right with shorter n first (per word for
// char_wb). lowercase folds ASCII and Latin-1 capitals only.
std::vector<std::string> analyze(std::string_view text,
                                 const AnalyzerSpec& spec);

}  // namespace stancekit

#endif  // STANCEKIT_PREPROC_H_
