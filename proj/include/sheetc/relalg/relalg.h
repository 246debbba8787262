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

#ifndef SHEETC_RELALG_RELALG_H_
#define SHEETC_RELALG_RELALG_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sheetc/formula/typed.h"
#include "sheetc/spec/spec.h"
#include "sheetc/walg/walg.h"

namespace sheetc::relalg {

struct RelNode;
using Rel = std::shared_ptr<const RelNode>;

struct NamedExpr {
  std::string name;
  formula::TypedExpr expr;
};

struct AggItem {
  std::string name;
  std::string fn;  // Sum, Avg, Min, Max, Count, CountIf, CountDistinct
  std::optional<formula::TypedExpr> arg;  // unset for Count()
  ScalarType type = ScalarType::kNumber;
};

struct OrderKey {
  std::string attr;
  bool descending = false;
};

struct WindowItem {
  std::string name;
  // Lag, Lead, CumulativeSum, MovingAverage, Rank, RunningCount (count of
  // non-null values so far) and GroupMax (maximum over the partition).
  std::string fn;
  std::vector<formula::TypedExpr> args;
  int offset = 1;          // Lag/Lead/MovingAverage frame size
  bool rank_descending = false;
  std::vector<std::string> partition;
  std::vector<OrderKey> order;
  ScalarType type = ScalarType::kNumber;
};

struct JoinCond {
  std::string left;
  std::string right;
  bool null_safe = false;
};

// Which walg construct a join came from.
enum class JoinOrigin {
  kSource,     // joins between spec inputs
  kLink,       // key-preserving lookup into a linked input
  kAggregate,  // walg Join with the source nested under the target
  kRepeat,     // walg Join with the target nested under the source
  kAncestor,   // attaches ancestor-level attributes (keys, flattening)
};

struct RelNode {
  enum class Kind {
    kScan,       // table or SQL input
    kValues,     // one row, no attributes
    kProject,
    kSelect,
    kJoin,
    kAggregate,
    kWindow,
    kSort,
    kLimit,
  };
  enum class JoinType { kInner, kLeft, kRight, kFull, kSemi };

  Kind kind = Kind::kScan;
  std::vector<Rel> inputs;
  std::vector<spec::Attribute> schema;

  // kScan
  bool scan_sql = false;
  std::string source;  // table name or SQL text
  std::vector<std::string> source_columns;  // parallel to schema

  std::vector<NamedExpr> items;  // kProject
  formula::TypedExpr predicate;  // kSelect, optional extra join predicate

  // kJoin: output is the left schema followed by the right schema; with
  // merge_keys the right-hand condition attributes are dropped.
  JoinType join_type = JoinType::kInner;
  std::vector<JoinCond> on;
  bool merge_keys = false;
  JoinOrigin origin = JoinOrigin::kSource;
  // Annotated joins are key-preserving left joins lowered from walg.
  bool annotated = false;

  std::vector<std::string> group_by;  // kAggregate; output is keys then aggs
  std::vector<AggItem> aggs;
  std::vector<WindowItem> windows;    // kWindow; output is input then items
  std::vector<OrderKey> sort;         // kSort
  int64_t limit = -1;                 // kLimit, -1 for none
  int64_t offset = 0;

  const spec::Attribute* Find(const std::string& attr) const;
  bool Has(const std::string& attr) const { return Find(attr) != nullptr; }
};

// Builders; each computes the schema and checks references.
Rel Scan(std::string table, std::vector<spec::Attribute> schema,
         std::vector<std::string> source_columns);
Rel ScanSql(std::string sql, std::vector<spec::Attribute> schema,
            std::vector<std::string> source_columns);
Rel Values();
Rel Project(Rel input, std::vector<NamedExpr> items);
// Keeps every input attribute and appends `items`.
Rel Extend(Rel input, std::vector<NamedExpr> items);
// Keeps the named attributes in order.
Rel Keep(Rel input, const std::vector<std::string>& attrs);
Rel Select(Rel input, formula::TypedExpr predicate);
Rel Join(RelNode::JoinType type, Rel left, Rel right, std::vector<JoinCond> on,
         JoinOrigin origin, bool merge_keys, bool annotated);
Rel Aggregate(Rel input, std::vector<std::string> group_by, std::vector<AggItem> aggs);
Rel Window(Rel input, std::vector<WindowItem> windows);
Rel Sort(Rel input, std::vector<OrderKey> keys);
Rel Limit(Rel input, int64_t limit, int64_t offset);

formula::TypedExpr Ref(const spec::Attribute& attr);
formula::TypedExpr Ref(const Rel& rel, const std::string& attr);

// Output description of a compiled worksheet.
struct OutputSchema {
  std::vector<spec::Attribute> columns;  // visible columns, then annotations
  std::vector<std::string> annotated;    // columns that carry `__multi__`
};

struct RelPlan {
  Rel root;
  OutputSchema output;
};

struct LowerOptions {
  std::optional<spec::PageSpec> page;  // overrides the spec's page
  bool apply_page = true;
};

// Lowers a walg plan to a relational tree. Nested worksheet inputs are
// compiled with `nested`, which returns the plan of a resolved nested spec.
using NestedCompiler = std::function<RelPlan(const spec::ResolvedSpec&)>;
RelPlan Lower(const walg::Plan& plan, const NestedCompiler& nested,
              const LowerOptions& options = {});

struct RewriteOptions {
  bool noop_removal = true;
  bool merge_projects = true;
  bool merge_selects = true;
  bool attribute_pruning = true;
  bool join_pruning = true;
  bool sort_limit_pushdown = true;
};

RelPlan Rewrite(const RelPlan& plan, const RewriteOptions& options = {});

// Guard for moving Sort+Limit below `join`: an annotated left join whose
// left leg produces every sort key.
bool SortLimitPushdownApplies(const RelNode& join, const std::vector<OrderKey>& keys);

// Throws InternalError when a reference is not produced below it or a schema
// repeats a name.
void CheckRel(const RelPlan& plan);

// Distinct operators reachable from the root.
int OperatorCount(const RelPlan& plan);
// Joins lowered from walg Joins that aggregate into the target level.
int AggregateJoinCount(const RelPlan& plan);

std::string ExplainRel(const RelPlan& plan);

}  // namespace sheetc::relalg

#endif  // SHEETC_RELALG_RELALG_H_
