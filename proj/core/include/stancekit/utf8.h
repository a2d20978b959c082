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

#ifndef STANCEKIT_UTF8_H_
#define STANCEKIT_UTF8_H_

#include <optional>
#include <string>
#include <string_view>

namespace stancekit::utf8 {

// Decodes UTF-8 into code points. Throws Error(kEncodingError) on malformed
// input, overlong forms, surrogates and values above U+10FFFF.
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view cps);
void append(std::string& out, char32_t cp);

// Byte offset of the first invalid sequence, or nullopt if `bytes` is valid.
std::optional<size_t> find_invalid(std::string_view bytes);

bool is_space(char32_t cp);

}  // namespace stancekit::utf8

#endif  // STANCEKIT_UTF8_H_
