//
// Copyright 2026 The Sheetc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef SHEETC_COMMON_ERRORS_H_
#define SHEETC_COMMON_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sheetc {

// Root of every error the compiler and runner raise. `kind()` is a stable
// identifier used in CLI/HTTP diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define SHEETC_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

SHEETC_DEFINE_ERROR(SyntaxError)
SHEETC_DEFINE_ERROR(SchemaError)
SHEETC_DEFINE_ERROR(ValidationError)
SHEETC_DEFINE_ERROR(UnknownReference)
SHEETC_DEFINE_ERROR(CyclicComposition)
SHEETC_DEFINE_ERROR(MissingBinding)
SHEETC_DEFINE_ERROR(UnsupportedQuery)
SHEETC_DEFINE_ERROR(DialectError)
SHEETC_DEFINE_ERROR(InternalError)
SHEETC_DEFINE_ERROR(ExecutionError)
SHEETC_DEFINE_ERROR(PageOutOfRange)
SHEETC_DEFINE_ERROR(InferenceConflict)
SHEETC_DEFINE_ERROR(SchemaMismatch)
SHEETC_DEFINE_ERROR(CompileError)
SHEETC_DEFINE_ERROR(IOError)
SHEETC_DEFINE_ERROR(Cancelled)

#undef SHEETC_DEFINE_ERROR

// Formula syntax error. `offset` is a byte offset into the formula text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, size_t offset,
             std::vector<std::string> expected)
      : Error("ParseError", message),
        offset_(offset),
        expected_(std::move(expected)) {}
  size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace sheetc

#endif  // SHEETC_COMMON_ERRORS_H_
