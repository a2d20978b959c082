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

#include "stancekit/preproc.h"

#include <string>

#include "stancekit/error.h"
#include "stancekit/utf8.h"

namespace stancekit {
namespace {

bool is_arabic_diacritic(char32_t cp) { return cp >= 0x064B && cp <= 0x0652; }

constexpr char32_t kTatweel = 0x0640;
constexpr char32_t kAlef = 0x0627;
constexpr char32_t kYeh = 0x064A;
constexpr char32_t kHeh = 0x0647;

char32_t fold_arabic_letter(char32_t cp) {
  switch (cp) {
    case 0x0622:  // alef with madda above
    case 0x0623:  // alef with hamza above
    case 0x0625:  // alef with hamza below
    case 0x0671:  // alef wasla
      return kAlef;
    case 0x0649:  // alef maqsura
      return kYeh;
    case 0x0629:  // ta marbuta
      return kHeh;
    default:
      return cp;
  }
}

bool extends_emoji_run(char32_t cp) {
  return is_emoji(cp) || cp == 0xFE0F || cp == 0x200D;
}

char32_t fold_case(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

std::vector<std::u32string> split_words(const std::u32string& text) {
  std::vector<std::u32string> words;
  std::u32string current;
  for (char32_t cp : text) {
    if (utf8::is_space(cp)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(cp);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

void word_ngrams(const std::u32string& text, const AnalyzerSpec& spec,
                 std::vector<std::string>& out) {
  std::vector<std::string> tokens;
  for (const auto& w : split_words(text)) tokens.push_back(utf8::encode(w));
  const size_t count = tokens.size();
  for (size_t n = spec.ngram_min; n <= static_cast<size_t>(spec.ngram_max);
       ++n) {
    if (n > count) break;
    for (size_t start = 0; start + n <= count; ++start) {
      std::string gram = tokens[start];
      for (size_t k = 1; k < n; ++k) {
        gram.push_back(' ');
        gram += tokens[start + k];
      }
      out.push_back(std::move(gram));
    }
  }
}

void char_ngrams(const std::u32string& text, const AnalyzerSpec& spec,
                 std::vector<std::string>& out) {
  const size_t len = text.size();
  for (size_t n = spec.ngram_min; n <= static_cast<size_t>(spec.ngram_max);
       ++n) {
    if (n > len) break;
    for (size_t start = 0; start + n <= len; ++start) {
      out.push_back(utf8::encode(std::u32string_view(text).substr(start, n)));
    }
  }
}

void char_wb_ngrams(const std::u32string& text, const AnalyzerSpec& spec,
                    std::vector<std::string>& out) {
  for (const auto& word : split_words(text)) {
    std::u32string padded;
    padded.reserve(word.size() + 2);
    padded.push_back(U' ');
    padded += word;
    padded.push_back(U' ');
    const std::u32string_view view(padded);
    for (size_t n = spec.ngram_min; n <= static_cast<size_t>(spec.ngram_max);
         ++n) {
      size_t offset = 0;
      out.push_back(utf8::encode(view.substr(offset, n)));
      while (offset + n < padded.size()) {
        ++offset;
        out.push_back(utf8::encode(view.substr(offset, n)));
      }
      // A padded word no longer than n has been emitted whole; stop here.
      if (offset == 0) break;
    }
  }
}

}  // namespace

std::string normalize_arabic(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : utf8::decode(text)) {
    if (is_arabic_diacritic(cp) || cp == kTatweel) continue;
    utf8::append(out, fold_arabic_letter(cp));
  }
  return out;
}

bool is_emoji(char32_t cp) {
  return (cp >= 0x2600 && cp <= 0x27BF) ||    // misc symbols, dingbats
         (cp >= 0x1F300 && cp <= 0x1F5FF) ||  // symbols and pictographs
         (cp >= 0x1F600 && cp <= 0x1F64F) ||  // emoticons
         (cp >= 0x1F680 && cp <= 0x1F6FF) ||  // transport and map
         (cp >= 0x1F900 && cp <= 0x1F9FF) ||  // supplemental
         (cp >= 0x1FA70 && cp <= 0x1FAFF);    // extended-A
}

std::string replace_emojis(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_run = false;
  for (char32_t cp : utf8::decode(text)) {
    if (in_run && extends_emoji_run(cp)) continue;
    if (is_emoji(cp)) {
      out += kEmojiToken;
      in_run = true;
      continue;
    }
    in_run = false;
    utf8::append(out, cp);
  }
  return out;
}

std::string preprocess(std::string_view text, const PreprocessFlags& flags) {
  std::string out(text);
  if (flags.replace_emojis) out = replace_emojis(out);
  if (flags.normalize_arabic) out = normalize_arabic(out);
  return out;
}

std::string_view analyzer_kind_name(AnalyzerKind kind) {
  switch (kind) {
    case AnalyzerKind::kWord: return "word";
    case AnalyzerKind::kChar: return "char";
    case AnalyzerKind::kCharWb: return "char_wb";
  }
  return "word";
}

AnalyzerKind parse_analyzer_kind(std::string_view name) {
  if (name == "word") return AnalyzerKind::kWord;
  if (name == "char") return AnalyzerKind::kChar;
  if (name == "char_wb") return AnalyzerKind::kCharWb;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown analyzer kind '" + std::string(name) +
                  "' (expected word, char or char_wb)");
}

void AnalyzerSpec::validate() const {
  if (ngram_min < 1 || ngram_max < ngram_min) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid n-gram range (" + std::to_string(ngram_min) + "," +
                    std::to_string(ngram_max) + ")");
  }
}

std::vector<std::string> analyze(std::string_view text,
                                 const AnalyzerSpec& spec) {
  spec.validate();
  std::u32string cps = utf8::decode(text);
  if (spec.lowercase) {
    for (char32_t& cp : cps) cp = fold_case(cp);
  }
  std::vector<std::string> out;
  switch (spec.kind) {
    case AnalyzerKind::kWord: word_ngrams(cps, spec, out); break;
    case AnalyzerKind::kChar: char_ngrams(cps, spec, out); break;
    case AnalyzerKind::kCharWb: char_wb_ngrams(cps, spec, out); break;
  }
  return out;
}

}  // namespace stancekit
