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

#include "sheetc/common/value.h"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace sheetc {

std::string_view ScalarTypeName(ScalarType type) {
  switch (type) {
    case ScalarType::kLogical:
      return "Logical";
    case ScalarType::kNumber:
      return "Number";
    case ScalarType::kText:
      return "Text";
    case ScalarType::kDate:
      return "Date";
    case ScalarType::kError:
      return "Error";
  }
  return "?";
}

std::optional<ScalarType> ParseScalarType(std::string_view name) {
  if (name == "Logical") return ScalarType::kLogical;
  if (name == "Number") return ScalarType::kNumber;
  if (name == "Text") return ScalarType::kText;
  if (name == "Date") return ScalarType::kDate;
  if (name == "Error") return ScalarType::kError;
  return std::nullopt;
}

// Civil-from-days and days-from-civil after H. Hinnant's algorithms.
Date DateFromCivil(CivilDate c) {
  int y = c.year - (c.month <= 2 ? 1 : 0);
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153 * (c.month + (c.month > 2 ? -3 : 9)) + 2) / 5 + c.day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return Date{static_cast<int32_t>(era * 146097 + static_cast<int>(doe) -
                                   719468)};
}

CivilDate CivilFromDate(Date date) {
  int z = date.days + 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return CivilDate{y + (m <= 2 ? 1 : 0), m, d};
}

namespace {

bool IsLeap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned DaysInMonth(int y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30,
                                       31, 31, 30, 31, 30, 31};
  return m == 2 && IsLeap(y) ? 29 : kDays[m - 1];
}

std::optional<int> ParseDigits(std::string_view s) {
  int out = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    out = out * 10 + (c - '0');
  }
  return out;
}

}  // namespace

std::optional<Date> ParseIsoDate(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    return std::nullopt;
  }
  auto y = ParseDigits(text.substr(0, 4));
  auto m = ParseDigits(text.substr(5, 2));
  auto d = ParseDigits(text.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  if (*m < 1 || *m > 12) return std::nullopt;
  if (*d < 1 || static_cast<unsigned>(*d) > DaysInMonth(*y, *m)) {
    return std::nullopt;
  }
  return DateFromCivil(
      {*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d)});
}

std::string FormatIsoDate(Date date) {
  CivilDate c = CivilFromDate(date);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", c.year, c.month, c.day);
  return buf;
}

std::strong_ordering CompareValues(const Value& a, const Value& b) {
  if (a.index() != b.index()) {
    // Mixed alternatives only meet through NULL in well-typed data; keep the
    // order total anyway.
    return a.index() <=> b.index();
  }
  switch (a.index()) {
    case 0:
      return std::strong_ordering::equal;
    case 1:
      return std::get<bool>(a) <=> std::get<bool>(b);
    case 2: {
      double x = std::get<double>(a), y = std::get<double>(b);
      if (x < y) return std::strong_ordering::less;
      if (x > y) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    }
    case 3: {
      int c = std::get<std::string>(a).compare(std::get<std::string>(b));
      return c <=> 0;
    }
    case 4:
      return std::get<Date>(a) <=> std::get<Date>(b);
  }
  return std::strong_ordering::equal;
}

std::string FormatNumber(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  if (d == 0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, res.ptr);
}

std::string ValueToString(const Value& v) {
  switch (v.index()) {
    case 0:
      return "";
    case 1:
      return std::get<bool>(v) ? "true" : "false";
    case 2:
      return FormatNumber(std::get<double>(v));
    case 3:
      return std::get<std::string>(v);
    case 4:
      return FormatIsoDate(std::get<Date>(v));
  }
  return "";
}

}  // namespace sheetc
