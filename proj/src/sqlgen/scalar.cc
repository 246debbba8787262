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

#include <cctype>
#include <map>

#include "sheetc/common/errors.h"
#include "sheetc/formula/functions.h"
#include "sheetc/sqlgen/sqlgen.h"

namespace sheetc::sqlgen {

using formula::BinaryOp;
using formula::Expr;
using formula::TypedExpr;

namespace {

std::map<std::string, Dialect> BuildDialects() {
  std::map<std::string, Dialect> out;
  Dialect ansi;
  ansi.id = "ansi";
  ansi.supports_right_join = false;
  ansi.supports_full_join = false;
  ansi.text_dates = true;
  ansi.null_safe = NullSafeEq::kIs;
  ansi.date_type = "TEXT";
  ansi.logical_type = "INTEGER";
  out[ansi.id] = ansi;

  Dialect pg;
  pg.id = "postgres";
  pg.bool_and = "BOOL_AND";
  pg.bool_or = "BOOL_OR";
  out[pg.id] = pg;

  Dialect sf;
  sf.id = "snowflake";
  sf.has_native_datediff = true;
  sf.number_type = "DOUBLE";
  sf.text_type = "VARCHAR";
  sf.bool_and = "BOOLAND_AGG";
  sf.bool_or = "BOOLOR_AGG";
  out[sf.id] = sf;

  Dialect bq;
  bq.id = "bigquery";
  bq.has_native_datediff = true;
  bq.quote = '`';
  bq.number_type = "FLOAT64";
  bq.text_type = "STRING";
  bq.logical_type = "BOOL";
  bq.bool_and = "LOGICAL_AND";
  bq.bool_or = "LOGICAL_OR";
  out[bq.id] = bq;

  Dialect rs;
  rs.id = "redshift";
  rs.supports_semijoin_exists = false;
  rs.has_native_datediff = true;
  rs.null_safe = NullSafeEq::kExpanded;
  rs.text_type = "VARCHAR";
  rs.bool_and = "BOOL_AND";
  rs.bool_or = "BOOL_OR";
  out[rs.id] = rs;
  return out;
}

const std::map<std::string, Dialect>& Dialects() {
  static const std::map<std::string, Dialect> d = BuildDialects();
  return d;
}

std::string Quote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string Upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

class ScalarRenderer {
 public:
  ScalarRenderer(const Dialect& d, const std::function<std::string(const std::string&)>& column)
      : d_(d), column_(column) {}

  std::string Render(const TypedExpr& e) {
    if (e.is_error() && e.kind != Expr::Kind::kColumnRef) {
      return "CAST(NULL AS " + SqlTypeName(ScalarType::kError, d_) + ") /* error */";
    }
    switch (e.kind) {
      case Expr::Kind::kLiteral:
        return Literal(e.literal, e.type);
      case Expr::Kind::kColumnRef:
      case Expr::Kind::kParameterRef:
      case Expr::Kind::kLinkRef:
        return column_(e.name);
      case Expr::Kind::kUnary:
        if (e.unary_op == formula::UnaryOp::kNot) return "(NOT " + Render(e.args[0]) + ")";
        return "(-" + Render(e.args[0]) + ")";
      case Expr::Kind::kBinary:
        return Binary(e);
      case Expr::Kind::kIf: {
        std::string s = "CASE WHEN " + Render(e.args[0]) + " THEN " + Render(e.args[1]);
        if (e.args.size() == 3) s += " ELSE " + Render(e.args[2]);
        return s + " END";
      }
      case Expr::Kind::kCall:
        return Call(e);
    }
    throw InternalError("unknown expression kind");
  }

  std::string Literal(const Value& v, ScalarType type) {
    switch (v.index()) {
      case 0:
        return "CAST(NULL AS " + SqlTypeName(type, d_) + ")";
      case 1:
        return std::get<bool>(v) ? "TRUE" : "FALSE";
      case 2: {
        double x = std::get<double>(v);
        std::string s = FormatNumber(x);
        return x < 0 ? "(" + s + ")" : s;
      }
      case 3:
        return Quote(std::get<std::string>(v));
      case 4: {
        std::string s = Quote(FormatIsoDate(std::get<Date>(v)));
        return d_.text_dates ? s : "DATE " + s;
      }
    }
    return "NULL";
  }

 private:
  std::string Binary(const TypedExpr& e) {
    std::string l = Render(e.args[0]), r = Render(e.args[1]);
    switch (e.binary_op) {
      case BinaryOp::kDiv:
        return "(CAST(" + l + " AS " + d_.number_type + ") / NULLIF(" + r + ", 0))";
      case BinaryOp::kConcat:
        return "(" + l + " || " + r + ")";
      case BinaryOp::kNe:
        return "(" + l + " <> " + r + ")";
      case BinaryOp::kAnd:
        return "(" + l + " AND " + r + ")";
      case BinaryOp::kOr:
        return "(" + l + " OR " + r + ")";
      default:
        return "(" + l + " " + std::string(formula::BinaryOpSymbol(e.binary_op)) + " " + r + ")";
    }
  }

  std::string Unit(const TypedExpr& e) {
    return *formula::NormalizeDateUnit(std::get<std::string>(e.literal));
  }

  std::string Int(const std::string& s) { return "CAST(" + s + " AS INTEGER)"; }

  std::string Part(const std::string& part, const std::string& d) {
    if (d_.text_dates) {
      return Int("strftime('" + std::string(part == "YEAR" ? "%Y" : "%m") + "', " + d + ")");
    }
    return "EXTRACT(" + part + " FROM " + d + ")";
  }

  std::string DateTrunc(const std::string& unit, const std::string& d) {
    if (d_.text_dates) {
      if (unit == "year") return "date(" + d + ", 'start of year')";
      if (unit == "month") return "date(" + d + ", 'start of month')";
      if (unit == "day") return "date(" + d + ")";
      return "date(" + d + ", 'start of month', '-' || ((" + Part("MONTH", d) +
             " - 1) % 3) || ' months')";
    }
    if (d_.id == "bigquery") return "DATE_TRUNC(" + d + ", " + Upper(unit) + ")";
    return "CAST(DATE_TRUNC('" + unit + "', " + d + ") AS DATE)";
  }

  std::string DayDiff(const std::string& s, const std::string& e) {
    if (d_.text_dates) return Int("julianday(" + e + ") - julianday(" + s + ")");
    if (d_.id == "bigquery") return "DATE_DIFF(" + e + ", " + s + ", DAY)";
    if (d_.has_native_datediff) return "DATEDIFF(day, " + s + ", " + e + ")";
    return "(" + e + " - " + s + ")";
  }

  std::string DateDiff(const std::string& unit, const std::string& s, const std::string& e) {
    if (unit == "day") return DayDiff(s, e);
    if (unit == "week") {
      std::string days = DayDiff(s, e);
      if (d_.text_dates) return Int("(julianday(" + e + ") - julianday(" + s + ")) / 7");
      if (d_.id == "bigquery") return "CAST(TRUNC(" + days + " / 7) AS INT64)";
      return "TRUNC(" + days + " / 7)";
    }
    if (d_.has_native_datediff) {
      if (d_.id == "bigquery") return "DATE_DIFF(" + e + ", " + s + ", " + Upper(unit) + ")";
      return "DATEDIFF(" + unit + ", " + s + ", " + e + ")";
    }
    std::string years = "(" + Part("YEAR", e) + " - " + Part("YEAR", s) + ")";
    if (unit == "year") return years;
    if (unit == "month") {
      return "(" + years + " * 12 + (" + Part("MONTH", e) + " - " + Part("MONTH", s) + "))";
    }
    auto quarter = [&](const std::string& d) { return "((" + Part("MONTH", d) + " - 1) / 3)"; };
    if (d_.text_dates) {
      return "(" + years + " * 4 + (" + quarter(e) + " - " + quarter(s) + "))";
    }
    return "(" + years + " * 4 + (EXTRACT(QUARTER FROM " + e + ") - EXTRACT(QUARTER FROM " + s +
           ")))";
  }

  std::string Call(const TypedExpr& e) {
    const std::string& n = e.name;
    if (!e.function || e.function->cls != formula::FunctionClass::kSingleRow) {
      throw DialectError("cannot render " + n + " as a scalar expression");
    }
    std::vector<std::string> a;
    for (const TypedExpr& arg : e.args) a.push_back(Render(arg));
    if (n == "Round") {
      std::string digits = a.size() > 1 ? a[1] : "0";
      if (d_.id == "postgres" || d_.id == "redshift") {
        return "CAST(ROUND(CAST(" + a[0] + " AS NUMERIC), " + digits + ") AS " + d_.number_type + ")";
      }
      return "ROUND(" + a[0] + ", " + digits + ")";
    }
    if (n == "Abs") return "ABS(" + a[0] + ")";
    if (n == "DateTrunc") return DateTrunc(Unit(e.args[0]), a[1]);
    if (n == "DateDiff") return DateDiff(Unit(e.args[0]), a[1], a[2]);
    if (n == "Date") {
      if (d_.text_dates) return "CASE WHEN date(" + a[0] + ") = " + a[0] + " THEN " + a[0] + " END";
      if (d_.id == "bigquery") return "SAFE.PARSE_DATE('%Y-%m-%d', " + a[0] + ")";
      if (d_.id == "snowflake") return "TRY_TO_DATE(" + a[0] + ", 'YYYY-MM-DD')";
      return "CASE WHEN " + a[0] + " ~ '^[0-9]{4}-[0-9]{2}-[0-9]{2}$' THEN CAST(" + a[0] +
             " AS DATE) END";
    }
    if (n == "Year") return Part("YEAR", a[0]);
    if (n == "Month") return Part("MONTH", a[0]);
    if (n == "Upper") return "UPPER(" + a[0] + ")";
    if (n == "Lower") return "LOWER(" + a[0] + ")";
    if (n == "Length") return "LENGTH(" + a[0] + ")";
    if (n == "Like") return "(" + a[0] + " LIKE " + a[1] + ")";
    if (n == "IsNull") return "(" + a[0] + " IS NULL)";
    if (n == "Coalesce" || n == "Concat") {
      std::string sep = n == "Coalesce" ? ", " : " || ";
      std::string s;
      for (size_t i = 0; i < a.size(); ++i) s += (i ? sep : "") + a[i];
      return n == "Coalesce" ? "COALESCE(" + s + ")" : "(" + s + ")";
    }
    throw DialectError("dialect " + d_.id + " has no rendering for " + n);
  }

  const Dialect& d_;
  const std::function<std::string(const std::string&)>& column_;
};

}  // namespace

const Dialect& GetDialect(std::string_view id) {
  auto it = Dialects().find(Lower(std::string(id)));
  if (it == Dialects().end()) throw DialectError("unknown dialect `" + std::string(id) + "`");
  return it->second;
}

std::vector<std::string> DialectIds() {
  return {"ansi", "postgres", "snowflake", "bigquery", "redshift"};
}

std::string QuoteIdentifier(std::string_view name, const Dialect& d) {
  std::string out(1, d.quote);
  for (char c : name) {
    if (c == d.quote) out += c;
    out += c;
  }
  return out + d.quote;
}

std::string SqlTypeName(ScalarType type, const Dialect& d) {
  switch (type) {
    case ScalarType::kNumber:
      return d.number_type;
    case ScalarType::kDate:
      return d.date_type;
    case ScalarType::kLogical:
      return d.logical_type;
    default:
      return d.text_type;
  }
}

std::string RenderScalar(const TypedExpr& expr, const Dialect& dialect,
                         const std::function<std::string(const std::string&)>& column) {
  return ScalarRenderer(dialect, column).Render(expr);
}

}  // namespace sheetc::sqlgen
