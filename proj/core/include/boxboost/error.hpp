// Copyright 2026 The BoxBoost Authors. All Rights Reserved.
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

#ifndef BOXBOOST_ERROR_HPP_
#define BOXBOOST_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace boxboost {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kShape,              // tensor / mask dimensions disagree
  kParameter,          // argument outside its documented range
  kInvalidAnnotation,  // box outside the image, malformed record
  kParse,              // malformed PGM / JSON-lines / checkpoint
  kIo,                 // missing or unwritable file
  kConfig,             // inconsistent stage configuration
  kUsage,              // API misuse (stale forward cache, ...)
  kNumerical,          // NaN / Inf detected
  kEmptyPseudoSet,     // FFS kept nothing but training needs pseudo labels
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure carrying the byte offset of the offending input.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t byte_offset)
      : Error(ErrorKind::kParse,
              message + " (at byte " + std::to_string(byte_offset) + ")"),
        detail_(message),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }
  /// Message without the offset suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t byte_offset_;
};

}  // namespace boxboost

#endif  // BOXBOOST_ERROR_HPP_
