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

#ifndef SHEETC_WALG_WALG_H_
#define SHEETC_WALG_WALG_H_

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "sheetc/calc/calc_graph.h"
#include "sheetc/calc/layout.h"
#include "sheetc/formula/typed.h"

namespace sheetc::walg {

// Expressions inside ops reference attributes of the nested relation by name
// (ColumnRef with `level` = the level holding the attribute). Input
// attributes keep their "<alias>.<name>" ids and live at the base.

struct ProjectItem {
  std::string name;
  formula::TypedExpr expr;
};

struct JoinItem {
  enum class Kind {
    kAggregate,  // name := Agg(source attribute) over the nested records
    kAutoAgg,    // name := single value of `attr` or NULL, flag := multi
    kRepeat,     // name := `attr` of the enclosing record
  };
  Kind kind = Kind::kAggregate;
  std::string name;
  std::string flag;           // kAutoAgg
  std::string attr;           // kAutoAgg, kRepeat
  formula::TypedExpr expr;    // kAggregate: call over one source attribute
};

struct Op {
  enum class Kind { kProject, kJoin, kSelect };
  Kind kind = Kind::kProject;
  int level = 0;   // Project/Select level, Join target level
  int source = 0;  // Join source level
  std::vector<ProjectItem> items;
  std::vector<JoinItem> joins;
  formula::TypedExpr predicate;
  std::string filter;  // filter node name for Select
  // Set by optimization: the Join follows a Select on its source level and
  // lowering may emit an inner join instead of the propagation semijoin.
  bool elidable = false;

  bool is_aggregate_join() const { return kind == Kind::kJoin && source < level; }
  // Attributes the op produces and reads (as "name@level").
  std::vector<std::string> Produces() const;
  std::set<std::string> Reads() const;
};

struct AttrInfo {
  int level = 0;
  ScalarType type = ScalarType::kError;
};

struct Plan {
  std::shared_ptr<const calc::CalcGraph> graph;
  std::vector<Op> ops;
  std::map<std::string, AttrInfo> attrs;
  calc::OutputLayout layout;
  int totals = 0;
  // Input attributes the plan reads (ids).
  std::set<std::string> inputs;

  const spec::ValidatedSpec& spec() const { return graph->spec->validated; }
};

struct OrderOptions {
  // Greedy fusion of consecutive compatible atoms. The compiler ties this to
  // join merging.
  bool fuse = true;
};

// Decomposes every live column and filter into atomic ops and orders them
// with a modified topological sort: ready Selects first, then the lowest
// level, then declaration order.
Plan OrderOperations(std::shared_ptr<const calc::CalcGraph> graph,
                     const OrderOptions& options = {});

struct OptimizeOptions {
  bool join_merge = true;
  bool semijoin_elision = true;
};

Plan OptimizeWalg(const Plan& plan, const OptimizeOptions& options = {});

// Validity check: every read attribute is produced by an earlier op (or is an
// input attribute or grouping key). Throws InternalError.
void CheckPlan(const Plan& plan);

// Numbered op list, e.g. `3: Join L0→L1 {Sum([Sales])}`.
std::string ExplainWalg(const Plan& plan);

std::string AttrKey(const std::string& name, int level);

}  // namespace sheetc::walg

#endif  // SHEETC_WALG_WALG_H_
