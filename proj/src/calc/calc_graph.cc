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

#include "sheetc/calc/calc_graph.h"

#include <algorithm>
#include <functional>
#include <sstream>

#include "sheetc/common/errors.h"
#include "sheetc/formula/functions.h"
#include "sheetc/formula/parser.h"

namespace sheetc::calc {

using formula::Expr;
using formula::ExprPtr;
using formula::FunctionClass;
using formula::TypedExpr;

const Node* CalcGraph::FindColumn(const std::string& name) const {
  auto it = by_name.find(name);
  return it == by_name.end() ? nullptr : &nodes[it->second];
}

const Node& CalcGraph::column(const std::string& name) const {
  const Node* n = FindColumn(name);
  if (!n) throw InternalError("no column " + name);
  return *n;
}

int CalcGraph::num_columns() const {
  return static_cast<int>(spec->spec().columns.size());
}

std::set<int> CalcGraph::Deps(int id) const {
  std::set<int> d = nodes[id].refs;
  d.insert(nodes[id].key_deps.begin(), nodes[id].key_deps.end());
  return d;
}

std::vector<CrossRef> CalcGraph::CrossRefs() const {
  std::vector<CrossRef> out;
  for (const Node& n : nodes) {
    int from = static_cast<int>(&n - nodes.data());
    for (int to : n.refs) {
      if (nodes[to].level != n.level) {
        out.push_back({from, to, nodes[to].level, n.level});
      }
    }
  }
  return out;
}

int SourceLevel(const TypedExpr& arg) {
  int lowest = -1;
  std::function<void(const TypedExpr&)> walk = [&](const TypedExpr& e) {
    if (e.is_ref() && !e.is_error()) {
      int l = e.ref_kind == formula::RefKind::kInput ? 0 : e.level;
      lowest = lowest < 0 ? l : std::min(lowest, l);
    }
    for (const TypedExpr& a : e.args) walk(a);
  };
  walk(arg);
  return lowest < 0 ? 0 : lowest;
}

std::set<int> WindowLevels(const TypedExpr& expr, int level) {
  std::set<int> out;
  std::function<void(const TypedExpr&, int)> walk = [&](const TypedExpr& e,
                                                        int at) {
    if (e.is_call(FunctionClass::kAggregate)) {
      int inner = at;
      if (!e.args.empty()) {
        int s = SourceLevel(e.args[0]);
        if (s < at) inner = s;
      } else if (at > 0) {
        inner = 0;
      }
      for (const TypedExpr& a : e.args) walk(a, inner);
      return;
    }
    if (e.is_call(FunctionClass::kWindow)) out.insert(at);
    for (const TypedExpr& a : e.args) walk(a, at);
  };
  walk(expr, level);
  return out;
}

namespace {

// Pre-typecheck name resolution: which column a parsed reference names.
class Names {
 public:
  explicit Names(const spec::ResolvedSpec& spec) : spec_(spec) {}

  // Column a reference inside `owner` points at, when any.
  const spec::ColumnSpec* ColumnOf(const Expr& ref, const std::string& owner) const {
    if (ref.kind != Expr::Kind::kColumnRef) return nullptr;
    if (ref.name == owner && spec_.LookupAttribute(ref.name).size() == 1) {
      return nullptr;
    }
    return spec_.spec().FindColumn(ref.name);
  }

  int LevelOf(const Expr& ref, const std::string& owner) const {
    const spec::ColumnSpec* c = ColumnOf(ref, owner);
    return c ? c->level : 0;
  }

 private:
  const spec::ResolvedSpec& spec_;
};

int ParsedSourceLevel(const Expr& arg, const Names& names, const std::string& owner) {
  int lowest = -1;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e.kind == Expr::Kind::kColumnRef || e.kind == Expr::Kind::kLinkRef) {
      int l = e.kind == Expr::Kind::kLinkRef ? 0 : names.LevelOf(e, owner);
      lowest = lowest < 0 ? l : std::min(lowest, l);
    }
    for (const ExprPtr& a : e.args) walk(*a);
  };
  walk(arg);
  return lowest < 0 ? 0 : lowest;
}

std::set<int> ParsedWindowLevels(const Expr& expr, int level, const Names& names,
                                 const std::string& owner) {
  std::set<int> out;
  std::function<void(const Expr&, int)> walk = [&](const Expr& e, int at) {
    const formula::FunctionSig* sig =
        e.kind == Expr::Kind::kCall ? formula::LookupFunction(e.name) : nullptr;
    if (sig && sig->cls == FunctionClass::kAggregate) {
      int inner = at;
      if (!e.args.empty()) {
        int s = ParsedSourceLevel(*e.args[0], names, owner);
        if (s < at) inner = s;
      } else if (at > 0) {
        inner = 0;
      }
      for (const ExprPtr& a : e.args) walk(*a, inner);
      return;
    }
    if (sig && sig->cls == FunctionClass::kWindow) out.insert(at);
    for (const ExprPtr& a : e.args) walk(*a, at);
  };
  walk(expr, level);
  return out;
}

void CollectRefs(const Expr& e, const Names& names, const std::string& owner,
                 const std::map<std::string, int>& by_name, std::set<int>& refs,
                 int& highest) {
  if (const spec::ColumnSpec* c = names.ColumnOf(e, owner)) {
    refs.insert(by_name.at(c->name));
    highest = std::max(highest, c->level);
  }
  for (const ExprPtr& a : e.args) CollectRefs(*a, names, owner, by_name, refs, highest);
}

// Lowest resident level among column references; any aggregate call makes
// the predicate use the highest level instead.
int PredicateLevel(const Expr& e, const Names& names, int highest) {
  int lowest = highest;
  bool aggregated = false;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (x.kind == Expr::Kind::kCall) {
      const formula::FunctionSig* sig = formula::LookupFunction(x.name);
      if (sig && sig->cls == formula::FunctionClass::kAggregate) aggregated = true;
    }
    if (const spec::ColumnSpec* c = names.ColumnOf(x, "")) lowest = std::min(lowest, c->level);
    for (const ExprPtr& a : x.args) walk(*a);
  };
  walk(e);
  return aggregated ? highest : lowest;
}

ExprPtr Parse(const std::string& text, const std::string& where) {
  try {
    return formula::ParseFormula(text);
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what(), e.offset(), e.expected());
  }
}

}  // namespace

CalcGraph BuildGraph(std::shared_ptr<const spec::ResolvedSpec> spec) {
  CalcGraph g;
  g.spec = spec;
  const spec::ValidatedSpec& vs = spec->validated;
  const spec::WorksheetSpec& ws = vs.spec;
  Names names(*spec);
  for (size_t i = 0; i < ws.columns.size(); ++i) {
    const spec::ColumnSpec& c = ws.columns[i];
    Node n;
    n.kind = Node::Kind::kColumn;
    n.name = c.name;
    n.index = static_cast<int>(i);
    n.level = c.level;
    n.hidden = c.hidden;
    n.parsed = Parse(c.formula, "column `" + c.name + "`");
    g.by_name[c.name] = static_cast<int>(g.nodes.size());
    g.nodes.push_back(std::move(n));
  }
  for (size_t i = 0; i < ws.filters.size(); ++i) {
    const spec::FilterSpec& f = ws.filters[i];
    Node n;
    n.kind = Node::Kind::kFilter;
    n.name = "filter#" + std::to_string(i);
    n.index = static_cast<int>(i);
    if (f.kind == spec::FilterKind::kCustomPredicate) {
      n.parsed = Parse(f.predicate, "filter " + std::to_string(i));
    } else {
      n.parsed = Expr::MakeColumnRef(f.column);
    }
    g.nodes.push_back(std::move(n));
  }

  auto key_ids = [&](int level) {
    std::set<int> ids;
    for (const std::string& k : vs.levels[level].grouping_keys) ids.insert(g.by_name.at(k));
    return ids;
  };
  for (Node& n : g.nodes) {
    std::string owner = n.kind == Node::Kind::kColumn ? n.name : "";
    int highest = 0;
    CollectRefs(*n.parsed, names, owner, g.by_name, n.refs, highest);
    if (n.kind == Node::Kind::kFilter) {
      n.level = ws.filters[n.index].kind == spec::FilterKind::kCustomPredicate
                    ? PredicateLevel(*n.parsed, names, highest)
                    : ws.FindColumn(ws.filters[n.index].column)->level;
    }
    for (int j = 1; j <= n.level; ++j) {
      auto ids = key_ids(j);
      n.key_deps.insert(ids.begin(), ids.end());
    }
    std::set<int> windows = ParsedWindowLevels(*n.parsed, n.level, names, owner);
    if (n.kind == Node::Kind::kFilter &&
        ws.filters[n.index].kind == spec::FilterKind::kTopN) {
      windows.insert(n.level);
    }
    for (int w : windows) {
      for (int j = 1; j <= std::min(w + 1, vs.totals()); ++j) {
        auto ids = key_ids(j);
        n.key_deps.insert(ids.begin(), ids.end());
      }
      for (const spec::OrderItem& item : vs.levels[w].ordering) {
        n.key_deps.insert(g.by_name.at(item.column));
      }
    }
  }
  return g;
}

namespace {

// Tarjan's strongly connected components over Deps().
std::vector<std::vector<int>> StronglyConnected(const CalcGraph& g) {
  const int n = static_cast<int>(g.nodes.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int counter = 0;
  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : g.Deps(v)) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<int> scc;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        scc.push_back(w);
      } while (w != v);
      out.push_back(std::move(scc));
    }
  };
  for (int v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }
  return out;
}

// Kahn's algorithm; ties broken by node id (declaration order).
std::vector<int> TopologicalOrder(const CalcGraph& g) {
  const int n = static_cast<int>(g.nodes.size());
  std::vector<int> pending(n, 0);
  std::vector<std::vector<int>> users(n);
  for (int v = 0; v < n; ++v) {
    for (int d : g.Deps(v)) {
      ++pending[v];
      users[d].push_back(v);
    }
  }
  std::set<int> ready;
  for (int v = 0; v < n; ++v) {
    if (pending[v] == 0) ready.insert(v);
  }
  std::vector<int> order;
  while (!ready.empty()) {
    int v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int u : users[v]) {
      if (--pending[u] == 0) ready.insert(u);
    }
  }
  if (static_cast<int>(order.size()) != n) throw InternalError("calc graph has a cycle");
  return order;
}

ExprPtr Literal(Value v) { return Expr::MakeLiteral(std::move(v)); }

ExprPtr Chain(formula::BinaryOp op, std::vector<ExprPtr> parts, bool empty) {
  if (parts.empty()) return Literal(empty);
  ExprPtr out = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) out = Expr::MakeBinary(op, out, parts[i]);
  return out;
}

// Predicate for a column-targeted filter, once the column type is known.
ExprPtr FilterPredicate(const spec::FilterSpec& f, ScalarType type, int index) {
  using formula::BinaryOp;
  std::string where = "filter " + std::to_string(index) + " on `" + f.column + "`";
  auto coerce = [&](const Value& v) {
    if (type == ScalarType::kError) return Value{};
    try {
      return spec::CoerceValue(v, type);
    } catch (const SchemaError&) {
      throw ValidationError(where + ": value " + ValueToString(v) +
                            " does not match column type " +
                            std::string(ScalarTypeName(type)));
    }
  };
  ExprPtr col = Expr::MakeColumnRef(f.column);
  std::vector<ExprPtr> parts;
  switch (f.kind) {
    case spec::FilterKind::kIncludeList:
      for (const Value& v : f.values) {
        parts.push_back(Expr::MakeBinary(BinaryOp::kEq, col, Literal(coerce(v))));
      }
      return Chain(BinaryOp::kOr, parts, false);
    case spec::FilterKind::kExcludeList:
      for (const Value& v : f.values) {
        parts.push_back(Expr::MakeBinary(BinaryOp::kNe, col, Literal(coerce(v))));
      }
      return Chain(BinaryOp::kAnd, parts, true);
    case spec::FilterKind::kRange:
      if (f.low) parts.push_back(Expr::MakeBinary(BinaryOp::kGe, col, Literal(coerce(*f.low))));
      if (f.high) parts.push_back(Expr::MakeBinary(BinaryOp::kLe, col, Literal(coerce(*f.high))));
      return Chain(BinaryOp::kAnd, parts, true);
    case spec::FilterKind::kTextMatch:
      if (type != ScalarType::kText && type != ScalarType::kError) {
        throw ValidationError(where + ": text_match needs a Text column");
      }
      return Expr::MakeCall("Like", {col, Literal(f.pattern)});
    case spec::FilterKind::kTopN: {
      ExprPtr rank = Expr::MakeCall(
          "Rank", {col, Literal(std::string(f.direction == spec::Direction::kAsc ? "asc" : "desc"))});
      return Expr::MakeBinary(BinaryOp::kLe, rank,
                              Literal(static_cast<double>(f.limit)));
    }
    case spec::FilterKind::kCustomPredicate:
      break;
  }
  throw InternalError("unexpected filter kind");
}

}  // namespace

void BreakCycles(CalcGraph& g) {
  for (const std::vector<int>& scc : StronglyConnected(g)) {
    bool cyclic = scc.size() > 1 || g.Deps(scc[0]).count(scc[0]);
    if (!cyclic) continue;
    std::string members;
    std::vector<int> sorted = scc;
    std::sort(sorted.begin(), sorted.end());
    for (int v : sorted) members += (members.empty() ? "" : ", ") + g.nodes[v].name;
    for (int v : sorted) {
      Node& n = g.nodes[v];
      n.in_cycle = true;
      n.refs.clear();
      n.key_deps.clear();
      formula::Diagnostic d;
      d.length = 0;
      d.message = "`" + n.name + "` is part of a reference cycle (" + members + ")";
      d.column = n.name;
      g.diagnostics.push_back(std::move(d));
    }
  }

  const spec::ResolvedSpec& rs = *g.spec;
  const spec::WorksheetSpec& ws = rs.spec();
  g.diagnostics.erase(
      std::remove_if(g.diagnostics.begin(), g.diagnostics.end(),
                     [](const formula::Diagnostic& d) {
                       return d.message.find("reference cycle") == std::string::npos;
                     }),
      g.diagnostics.end());
  for (int v : TopologicalOrder(g)) {
    Node& n = g.nodes[v];
    if (n.in_cycle) {
      n.expr = TypedExpr::ErrorLiteral();
      continue;
    }
    std::string owner = n.kind == Node::Kind::kColumn ? n.name : "";
    formula::Resolver resolver =
        [&](const Expr& ref) -> std::optional<formula::RefInfo> {
      formula::RefInfo info;
      if (ref.kind == Expr::Kind::kLinkRef) {
        if (ref.path.size() != 1) return std::nullopt;
        const spec::SourceAttr* a = rs.LookupAttribute(ref.path[0], ref.name);
        if (!a) return std::nullopt;
        info.kind = formula::RefKind::kInput;
        info.type = a->type;
        info.id = a->id;
        return info;
      }
      auto self_attr = rs.LookupAttribute(ref.name);
      if (ref.name != owner || self_attr.size() != 1) {
        if (const Node* c = g.FindColumn(ref.name)) {
          info.kind = formula::RefKind::kColumn;
          info.type = c->expr.type;
          info.level = c->level;
          info.id = c->name;
          return info;
        }
        for (const spec::ParameterSpec& p : ws.parameters) {
          if (p.name == ref.name) {
            info.type = p.type;
            info.bound = rs.parameters.at(p.name);
            return info;
          }
        }
      }
      if (self_attr.size() != 1) return std::nullopt;
      info.kind = formula::RefKind::kInput;
      info.type = self_attr[0]->type;
      info.id = self_attr[0]->id;
      return info;
    };
    ExprPtr source = n.parsed;
    if (n.kind == Node::Kind::kFilter &&
        ws.filters[n.index].kind != spec::FilterKind::kCustomPredicate) {
      const spec::FilterSpec& f = ws.filters[n.index];
      source = FilterPredicate(f, g.column(f.column).expr.type, n.index);
    }
    formula::TypecheckResult r = formula::Typecheck(*source, resolver);
    n.expr = formula::FoldConstants(r.expr);
    for (formula::Diagnostic& d : r.diagnostics) {
      d.column = n.name;
      g.diagnostics.push_back(std::move(d));
    }
    if (n.kind == Node::Kind::kFilter && !n.expr.is_error() &&
        n.expr.type != ScalarType::kLogical) {
      formula::Diagnostic d;
      d.length = 0;
      d.message = "filter predicate must be Logical, got " +
                  std::string(ScalarTypeName(n.expr.type));
      d.column = n.name;
      g.diagnostics.push_back(std::move(d));
      n.expr = TypedExpr::ErrorLiteral();
    }
  }
  g.typed = true;
}

void EliminateDeadCode(CalcGraph& g) {
  const spec::ValidatedSpec& vs = g.spec->validated;
  const int grain = vs.grain;
  const int totals = vs.totals();
  std::vector<int> roots;
  g.outputs.clear();
  for (const Node& n : g.nodes) {
    int id = static_cast<int>(&n - g.nodes.data());
    if (n.kind == Node::Kind::kFilter) {
      roots.push_back(id);
    } else if (!n.hidden && n.level >= grain) {
      g.outputs.insert(id);
    }
  }
  for (int l = std::max(grain, 1); l < totals; ++l) {
    for (const std::string& k : vs.levels[l].own_keys) {
      const Node& c = g.column(k);
      if (!c.hidden) g.outputs.insert(g.by_name.at(k));
    }
  }
  for (int l = grain; l < totals; ++l) {
    for (const spec::OrderItem& item : vs.levels[l].ordering) {
      roots.push_back(g.by_name.at(item.column));
    }
  }
  for (int j = 1; j <= grain && j <= totals; ++j) {
    for (const std::string& k : vs.levels[j].grouping_keys) roots.push_back(g.by_name.at(k));
  }
  roots.insert(roots.end(), g.outputs.begin(), g.outputs.end());
  for (Node& n : g.nodes) n.live = false;
  std::vector<int> stack = roots;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (g.nodes[v].live) continue;
    g.nodes[v].live = true;
    for (int d : g.Deps(v)) stack.push_back(d);
  }
}

CalcGraph AnalyzeSpec(std::shared_ptr<const spec::ResolvedSpec> spec,
                      bool dead_code_elimination) {
  CalcGraph g = BuildGraph(std::move(spec));
  BreakCycles(g);
  EliminateDeadCode(g);
  if (!dead_code_elimination) {
    for (Node& n : g.nodes) n.live = true;
  }
  return g;
}

std::string GraphToDot(const CalcGraph& g) {
  std::ostringstream out;
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  out << "digraph calc {\n  rankdir=BT;\n";
  for (const Node& n : g.nodes) {
    std::string label = n.name + " @L" + std::to_string(n.level) + "\\n" +
                        std::string(ScalarTypeName(n.expr.type));
    out << "  " << quote(n.name) << " [label=" << quote(label);
    if (n.kind == Node::Kind::kFilter) out << ", shape=diamond";
    if (!n.live) out << ", style=dashed";
    if (n.in_cycle) out << ", color=red";
    out << "];\n";
  }
  for (const Node& n : g.nodes) {
    for (int r : n.refs) {
      out << "  " << quote(n.name) << " -> " << quote(g.nodes[r].name);
      if (g.nodes[r].level != n.level) {
        out << " [label=\"L" << g.nodes[r].level << "->L" << n.level << "\"]";
      }
      out << ";\n";
    }
    for (int k : n.key_deps) {
      if (n.refs.count(k)) continue;
      out << "  " << quote(n.name) << " -> " << quote(g.nodes[k].name)
          << " [style=dotted];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace sheetc::calc
