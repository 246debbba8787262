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

#ifndef SHEETC_FORMULA_FUNCTIONS_H_
#define SHEETC_FORMULA_FUNCTIONS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sheetc/common/value.h"

namespace sheetc::formula {

enum class FunctionClass { kSingleRow, kAggregate, kWindow };

// Bit set over ScalarType (excluding kError).
using TypeMask = uint8_t;
constexpr TypeMask Mask(ScalarType t) {
  return static_cast<TypeMask>(1u << static_cast<unsigned>(t));
}
constexpr TypeMask kAnyType = Mask(ScalarType::kLogical) |
                              Mask(ScalarType::kNumber) |
                              Mask(ScalarType::kText) | Mask(ScalarType::kDate);

struct ArgSpec {
  TypeMask types = kAnyType;
  bool optional = false;
  // Repeats to absorb any remaining arguments (last spec only).
  bool variadic = false;
  // Argument must be a literal (after parameter binding).
  bool literal_only = false;
  // Non-empty: the literal must be one of these (case-insensitive).
  std::vector<std::string> allowed;
  // Arguments sharing a non-negative group must have the same type.
  int unify_group = -1;
};

struct FunctionSig {
  std::string name;
  FunctionClass cls = FunctionClass::kSingleRow;
  std::vector<ArgSpec> args;
  // Result is the type of argument `result_from_arg` when >= 0, else
  // `result`.
  ScalarType result = ScalarType::kNumber;
  int result_from_arg = -1;
  // Free-form rendering hints; the dialect tables in sqlgen are normative.
  std::string notes;
};

// Case-insensitive lookup in the built-in catalog.
const FunctionSig* LookupFunction(std::string_view name);
const std::vector<FunctionSig>& FunctionCatalog();

// Date units accepted by DateTrunc/DateDiff, normalized to singular
// lower-case ("months" -> "month").
std::optional<std::string> NormalizeDateUnit(std::string_view unit);

// Evaluates a single-row function on already evaluated arguments. SQL NULL
// semantics: most functions return NULL when any argument is NULL.
Value EvalSingleRowFunction(const FunctionSig& sig, std::span<const Value> args);

// Shared date arithmetic (boundary-crossing differences).
Date TruncateDate(Date d, std::string_view unit);
double DateDiffUnits(std::string_view unit, Date start, Date end);

// SQL LIKE with `%` and `_`, case-sensitive, no escape character.
bool LikeMatch(std::string_view text, std::string_view pattern);

// Round to `digits` decimals, halves away from zero.
double RoundHalfAway(double x, int digits);

}  // namespace sheetc::formula

#endif  // SHEETC_FORMULA_FUNCTIONS_H_
