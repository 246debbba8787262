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

#ifndef SHEETC_CALC_CALC_GRAPH_H_
#define SHEETC_CALC_CALC_GRAPH_H_

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "sheetc/formula/ast.h"
#include "sheetc/formula/typed.h"
#include "sheetc/spec/resolve.h"

namespace sheetc::calc {

struct Node {
  enum class Kind { kColumn, kFilter };
  Kind kind = Kind::kColumn;
  std::string name;  // column name, or "filter#<i>"
  int index = 0;     // position among the spec's columns or filters
  int level = 0;     // resident level; for filters, the predicate level
  bool hidden = false;
  formula::ExprPtr parsed;
  formula::TypedExpr expr;
  // Reference edges (node ids the expression names).
  std::set<int> refs;
  // Level-key edges: grouping keys and orderings the node's levels need.
  std::set<int> key_deps;
  bool in_cycle = false;
  bool live = true;
};

// A reference from one node's expression to a column at another level.
struct CrossRef {
  int from = 0;
  int to = 0;
  int source_level = 0;  // resident level of the referenced column
  int target_level = 0;  // level of the referencing node
};

struct CalcGraph {
  std::shared_ptr<const spec::ResolvedSpec> spec;
  std::vector<Node> nodes;  // columns in declaration order, then filters
  std::map<std::string, int> by_name;
  std::vector<formula::Diagnostic> diagnostics;
  // Visible output columns (node ids) before output ordering is applied.
  std::set<int> outputs;
  bool typed = false;

  const Node& column(const std::string& name) const;
  const Node* FindColumn(const std::string& name) const;
  int num_columns() const;
  std::vector<CrossRef> CrossRefs() const;
  // Dependencies of `id` (reference and key edges).
  std::set<int> Deps(int id) const;
};

// Parses every formula and adds reference and level-key edges. Throws
// CompileError for formula syntax errors (naming the column) and
// ValidationError for filter payloads that do not fit their column.
CalcGraph BuildGraph(std::shared_ptr<const spec::ResolvedSpec> spec);

// Replaces every node on a cycle with an Error literal and types the graph in
// dependency order. Idempotent.
void BreakCycles(CalcGraph& graph);

// Marks nodes unreachable from the outputs, filters, level orderings at or
// above the output grain and the grain's grouping keys as dead.
void EliminateDeadCode(CalcGraph& graph);

// BuildGraph + BreakCycles + (optionally) EliminateDeadCode.
CalcGraph AnalyzeSpec(std::shared_ptr<const spec::ResolvedSpec> spec,
                      bool dead_code_elimination = true);

// Levels at which window calls inside `expr` (evaluated at `level`) run.
std::set<int> WindowLevels(const formula::TypedExpr& expr, int level);

// Source level of an aggregate argument: the lowest resident level it
// references, base when it references nothing.
int SourceLevel(const formula::TypedExpr& arg);

std::string GraphToDot(const CalcGraph& graph);

}  // namespace sheetc::calc

#endif  // SHEETC_CALC_CALC_GRAPH_H_
