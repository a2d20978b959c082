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

#ifndef STANCEKIT_ERROR_H_
#define STANCEKIT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace stancekit {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyCorpus,
  kEmptyVocabulary,
  kDimensionMismatch,
  kSingleClassCorpus,
  kNonFiniteFeature,
  kLengthMismatch,
  kUnknownLabel,
  kMissingColumn,
  kBadLabel,
  kDuplicateId,
  kEncodingError,
  kNonFiniteValue,
  kMissingEmbedding,
  kConfig,
  kFormat,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported as stancekit::Error. The code lets
// callers branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stancekit

#endif  // STANCEKIT_ERROR_H_
