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

#ifndef SHEETC_COMMON_VALUE_H_
#define SHEETC_COMMON_VALUE_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace sheetc {

// Scalar types of the formula language. kError is the flooding type given
// to broken formulas; at run time an Error value behaves as NULL.
enum class ScalarType { kLogical, kNumber, kText, kDate, kError };

std::string_view ScalarTypeName(ScalarType type);
std::optional<ScalarType> ParseScalarType(std::string_view name);

// Calendar date, days since 1970-01-01 (proleptic Gregorian, UTC).
struct Date {
  int32_t days = 0;
  friend auto operator<=>(const Date&, const Date&) = default;
};

struct CivilDate {
  int year;
  unsigned month;  // 1..12
  unsigned day;    // 1..31
};

Date DateFromCivil(CivilDate civil);
CivilDate CivilFromDate(Date date);
// Strict `YYYY-MM-DD`.
std::optional<Date> ParseIsoDate(std::string_view text);
std::string FormatIsoDate(Date date);

// A run-time scalar. monostate is SQL NULL.
using Value = std::variant<std::monostate, bool, double, std::string, Date>;

inline bool IsNull(const Value& v) {
  return std::holds_alternative<std::monostate>(v);
}

// Total order used for ordering and grouping: NULL sorts first, then values
// of the same alternative by natural order. Text compares byte-wise.
std::strong_ordering CompareValues(const Value& a, const Value& b);

// Grouping equality: NULL equals NULL.
inline bool SameValue(const Value& a, const Value& b) {
  return CompareValues(a, b) == std::strong_ordering::equal;
}

// Human readable rendering used by CSV/JSON output and diagnostics.
std::string ValueToString(const Value& v);

// Shortest round-trip decimal form of a double ("7", "0.25", "1e-09").
std::string FormatNumber(double d);

}  // namespace sheetc

#endif  // SHEETC_COMMON_VALUE_H_
