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

#include "sheetc/formula/functions.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "sheetc/common/errors.h"

namespace sheetc::formula {
namespace {

constexpr TypeMask kNum = Mask(ScalarType::kNumber);
constexpr TypeMask kText = Mask(ScalarType::kText);
constexpr TypeMask kDate = Mask(ScalarType::kDate);
constexpr TypeMask kLogical = Mask(ScalarType::kLogical);

const std::vector<std::string> kDateUnits = {
    "year", "years", "quarter", "quarters", "month", "months",
    "week", "weeks", "day",     "days"};
const std::vector<std::string> kTruncUnits = {"year",  "quarter",
                                              "month", "day"};

ArgSpec Arg(TypeMask types) { return ArgSpec{.types = types}; }
ArgSpec Opt(TypeMask types) { return ArgSpec{.types = types, .optional = true}; }
ArgSpec Lit(TypeMask types, bool optional = false,
            std::vector<std::string> allowed = {}) {
  return ArgSpec{.types = types,
                 .optional = optional,
                 .literal_only = true,
                 .allowed = std::move(allowed)};
}

std::vector<FunctionSig> BuildCatalog() {
  using FC = FunctionClass;
  using T = ScalarType;
  std::vector<FunctionSig> c;
  auto add = [&](std::string name, FC cls, std::vector<ArgSpec> args,
                 T result, int from_arg = -1, std::string notes = "") {
    c.push_back(FunctionSig{std::move(name), cls, std::move(args), result,
                            from_arg, std::move(notes)});
  };
  // Aggregates.
  add("Sum", FC::kAggregate, {Arg(kNum)}, T::kNumber);
  add("Avg", FC::kAggregate, {Arg(kNum)}, T::kNumber);
  add("Min", FC::kAggregate, {Arg(kAnyType)}, T::kNumber, 0);
  add("Max", FC::kAggregate, {Arg(kAnyType)}, T::kNumber, 0);
  add("Count", FC::kAggregate, {Opt(kAnyType)}, T::kNumber, -1,
      "Count() counts records, Count(x) counts non-null x");
  add("CountIf", FC::kAggregate, {Arg(kLogical)}, T::kNumber, -1,
      "COUNT(CASE WHEN c THEN 1 END)");
  add("CountDistinct", FC::kAggregate, {Arg(kAnyType)}, T::kNumber);
  // Windows; partitioning and ordering come from the resident level.
  add("Lag", FC::kWindow, {Arg(kAnyType), Lit(kNum, true)}, T::kNumber, 0);
  add("Lead", FC::kWindow, {Arg(kAnyType), Lit(kNum, true)}, T::kNumber, 0);
  add("FillDown", FC::kWindow, {Arg(kAnyType)}, T::kNumber, 0,
      "last non-null value at or before the current row");
  add("CumulativeSum", FC::kWindow, {Arg(kNum)}, T::kNumber, -1,
      "ROWS BETWEEN UNBOUNDED PRECEDING AND CURRENT ROW");
  add("MovingAverage", FC::kWindow, {Arg(kNum), Lit(kNum, true)}, T::kNumber,
      -1, "ROWS BETWEEN n PRECEDING AND CURRENT ROW, n defaults to 2");
  add("Rank", FC::kWindow,
      {Opt(kAnyType), Lit(kText, true, {"asc", "desc"})}, T::kNumber, -1,
      "RANK() ordered by the argument, or by the level ordering");
  // Single row.
  add("Round", FC::kSingleRow, {Arg(kNum), Lit(kNum, true)}, T::kNumber);
  add("Abs", FC::kSingleRow, {Arg(kNum)}, T::kNumber);
  add("DateTrunc", FC::kSingleRow, {Lit(kText, false, kTruncUnits), Arg(kDate)},
      T::kDate);
  add("DateDiff", FC::kSingleRow,
      {Lit(kText, false, kDateUnits), Arg(kDate), Arg(kDate)}, T::kNumber, -1,
      "end - start in whole unit boundaries crossed");
  add("Date", FC::kSingleRow, {Arg(kText)}, T::kDate,
      -1, "ISO-8601 text to Date, NULL when malformed");
  add("Year", FC::kSingleRow, {Arg(kDate)}, T::kNumber);
  add("Month", FC::kSingleRow, {Arg(kDate)}, T::kNumber);
  add("Upper", FC::kSingleRow, {Arg(kText)}, T::kText);
  add("Lower", FC::kSingleRow, {Arg(kText)}, T::kText);
  add("Length", FC::kSingleRow, {Arg(kText)}, T::kNumber);
  add("Like", FC::kSingleRow, {Arg(kText), Arg(kText)}, T::kLogical);
  add("IsNull", FC::kSingleRow, {Arg(kAnyType)}, T::kLogical);
  {
    ArgSpec first = Arg(kAnyType);
    first.unify_group = 0;
    ArgSpec rest = Arg(kAnyType);
    rest.unify_group = 0;
    rest.variadic = true;
    add("Coalesce", FC::kSingleRow, {first, rest}, T::kNumber, 0);
  }
  {
    ArgSpec rest = Arg(kText);
    rest.variadic = true;
    add("Concat", FC::kSingleRow, {Arg(kText), rest}, T::kText);
  }
  return c;
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool AnyNull(std::span<const Value> args) {
  return std::any_of(args.begin(), args.end(),
                     [](const Value& v) { return IsNull(v); });
}

}  // namespace

const std::vector<FunctionSig>& FunctionCatalog() {
  static const std::vector<FunctionSig> catalog = BuildCatalog();
  return catalog;
}

const FunctionSig* LookupFunction(std::string_view name) {
  for (const FunctionSig& sig : FunctionCatalog()) {
    if (EqualsIgnoreCase(sig.name, name)) return &sig;
  }
  return nullptr;
}

std::optional<std::string> NormalizeDateUnit(std::string_view unit) {
  std::string lower;
  for (char ch : unit) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (lower.size() > 1 && lower.back() == 's') lower.pop_back();
  static const char* kKnown[] = {"year", "quarter", "month", "week", "day"};
  for (const char* k : kKnown) {
    if (lower == k) return lower;
  }
  return std::nullopt;
}

Date TruncateDate(Date d, std::string_view unit) {
  CivilDate c = CivilFromDate(d);
  if (unit == "year") return DateFromCivil({c.year, 1, 1});
  if (unit == "quarter") {
    return DateFromCivil({c.year, (c.month - 1) / 3 * 3 + 1, 1});
  }
  if (unit == "month") return DateFromCivil({c.year, c.month, 1});
  if (unit == "day") return d;
  throw InternalError("unsupported DateTrunc unit " + std::string(unit));
}

double DateDiffUnits(std::string_view unit, Date start, Date end) {
  CivilDate a = CivilFromDate(start);
  CivilDate b = CivilFromDate(end);
  if (unit == "day") return end.days - start.days;
  if (unit == "week") {
    // Whole weeks elapsed, truncated toward zero.
    return static_cast<double>((end.days - start.days) / 7);
  }
  if (unit == "month") {
    return (b.year - a.year) * 12.0 + (static_cast<int>(b.month) -
                                       static_cast<int>(a.month));
  }
  if (unit == "quarter") {
    int qa = static_cast<int>(a.month - 1) / 3;
    int qb = static_cast<int>(b.month - 1) / 3;
    return (b.year - a.year) * 4.0 + (qb - qa);
  }
  if (unit == "year") return b.year - a.year;
  throw InternalError("unsupported DateDiff unit " + std::string(unit));
}

bool LikeMatch(std::string_view text, std::string_view pattern) {
  // Iterative wildcard match with backtracking on the last '%'.
  size_t t = 0, p = 0;
  size_t star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '_' || pattern[p] == text[t])) {
      ++t;
      ++p;
    } else if (p < pattern.size() && pattern[p] == '%') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '%') ++p;
  return p == pattern.size();
}

double RoundHalfAway(double x, int digits) {
  digits = std::clamp(digits, 0, 30);
  if (digits == 0 && std::fabs(x) < 9.2e18) {
    double r = std::floor(std::fabs(x) + 0.5);
    return x < 0 ? -r : r;
  }
  // Round the 16-significant-digit decimal form, which is what the embedded
  // engine's printf-based rounding observes.
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15e", std::fabs(x));
  std::string s(buf);
  size_t e = s.find('e');
  int exp10 = std::atoi(s.c_str() + e + 1);
  std::string mantissa = s.substr(0, 1) + s.substr(2, e - 2);  // 16 digits
  // Value = 0.mantissa * 10^(exp10 + 1); keep digits up to `digits`
  // decimals.
  int keep = exp10 + 1 + digits;
  if (keep < 0) return 0.0 * (x < 0 ? -1 : 1);
  if (keep >= static_cast<int>(mantissa.size())) return x;
  bool round_up = mantissa[keep] >= '5';
  std::string kept = mantissa.substr(0, keep);
  double v = kept.empty() ? 0 : std::strtod(kept.c_str(), nullptr);
  if (round_up) v += 1;
  double scaled = v * std::pow(10.0, exp10 + 1 - keep);
  // Re-parse through text to land on the nearest double.
  std::snprintf(buf, sizeof(buf), "%.*f", digits, scaled);
  double out = std::strtod(buf, nullptr);
  return x < 0 ? -out : out;
}

Value EvalSingleRowFunction(const FunctionSig& sig,
                            std::span<const Value> args) {
  const std::string& n = sig.name;
  if (n == "Coalesce") {
    for (const Value& v : args) {
      if (!IsNull(v)) return v;
    }
    return Value{};
  }
  if (n == "IsNull") return IsNull(args[0]);
  if (AnyNull(args)) return Value{};
  if (n == "Round") {
    int digits = args.size() > 1
                     ? static_cast<int>(std::get<double>(args[1]))
                     : 0;
    return RoundHalfAway(std::get<double>(args[0]), digits);
  }
  if (n == "Abs") return std::fabs(std::get<double>(args[0]));
  if (n == "DateTrunc") {
    auto unit = NormalizeDateUnit(std::get<std::string>(args[0]));
    return TruncateDate(std::get<Date>(args[1]), *unit);
  }
  if (n == "DateDiff") {
    auto unit = NormalizeDateUnit(std::get<std::string>(args[0]));
    return DateDiffUnits(*unit, std::get<Date>(args[1]),
                         std::get<Date>(args[2]));
  }
  if (n == "Date") {
    auto d = ParseIsoDate(std::get<std::string>(args[0]));
    if (!d) return Value{};
    return *d;
  }
  if (n == "Year") {
    return static_cast<double>(CivilFromDate(std::get<Date>(args[0])).year);
  }
  if (n == "Month") {
    return static_cast<double>(CivilFromDate(std::get<Date>(args[0])).month);
  }
  if (n == "Upper" || n == "Lower") {
    std::string s = std::get<std::string>(args[0]);
    for (char& ch : s) {
      if (ch >= 0) {
        ch = static_cast<char>(n == "Upper" ? std::toupper(ch)
                                            : std::tolower(ch));
      }
    }
    return s;
  }
  if (n == "Length") {
    // Characters, counting UTF-8 lead bytes.
    const std::string& s = std::get<std::string>(args[0]);
    double count = 0;
    for (unsigned char ch : s) {
      if ((ch & 0xC0) != 0x80) ++count;
    }
    return count;
  }
  if (n == "Like") {
    return LikeMatch(std::get<std::string>(args[0]),
                     std::get<std::string>(args[1]));
  }
  if (n == "Concat") {
    std::string out;
    for (const Value& v : args) out += std::get<std::string>(v);
    return out;
  }
  throw InternalError("no scalar implementation for " + n);
}

}  // namespace sheetc::formula
