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

#ifndef SHEETC_SQLGEN_SQLGEN_H_
#define SHEETC_SQLGEN_SQLGEN_H_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sheetc/formula/typed.h"
#include "sheetc/relalg/relalg.h"

namespace sheetc::sqlgen {

enum class NullSafeEq { kIsNotDistinctFrom, kIs, kExpanded };

struct Dialect {
  std::string id;
  bool supports_semijoin_exists = true;
  bool cte_is_optimization_barrier = false;
  bool has_native_datediff = false;
  bool supports_right_join = true;
  bool supports_full_join = true;
  // Dates are ISO text and date functions take the embedded engine's
  // strftime/julianday forms.
  bool text_dates = false;
  NullSafeEq null_safe = NullSafeEq::kIsNotDistinctFrom;
  char quote = '"';
  std::string number_type = "DOUBLE PRECISION";
  std::string text_type = "TEXT";
  std::string date_type = "DATE";
  std::string logical_type = "BOOLEAN";
  // Logical MIN/MAX spellings; empty means MIN/MAX work on booleans.
  std::string bool_and;
  std::string bool_or;
};

// "ansi", "postgres", "snowflake", "bigquery", "redshift". Throws
// DialectError for anything else.
const Dialect& GetDialect(std::string_view id);
std::vector<std::string> DialectIds();

struct RenderOptions {
  bool ctes = true;
};

struct SqlQuery {
  std::string text;
  std::vector<spec::Attribute> columns;
  int cte_count = 0;
};

SqlQuery Render(const relalg::RelPlan& plan, const Dialect& dialect,
                const RenderOptions& options = {});

// Renders a single-row scalar expression; `column` maps attribute names to
// SQL column references.
std::string RenderScalar(const formula::TypedExpr& expr, const Dialect& dialect,
                         const std::function<std::string(const std::string&)>& column);

// Nodes rendered as common table expressions: structurally identical
// subtrees reached at least twice, table scans excluded.
std::vector<const relalg::RelNode*> PlanCtes(const relalg::RelPlan& plan,
                                             const Dialect& dialect);

std::string QuoteIdentifier(std::string_view name, const Dialect& dialect);
std::string SqlTypeName(ScalarType type, const Dialect& dialect);

}  // namespace sheetc::sqlgen

#endif  // SHEETC_SQLGEN_SQLGEN_H_
