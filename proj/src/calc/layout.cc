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

#include "sheetc/calc/layout.h"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>

#include "sheetc/common/errors.h"

namespace sheetc::calc {

using formula::Expr;
using formula::FunctionClass;
using formula::TypedExpr;

std::string AnnotationName(const std::string& column) { return "__multi__" + column; }

uint64_t Fnv1a(std::string_view data, uint64_t seed) {
  uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool HasAutoAggregation(const TypedExpr& expr, int level,
                        const std::vector<std::string>& grouping_keys) {
  if (expr.is_error()) return false;
  if (expr.is_call(FunctionClass::kAggregate)) return false;
  if (expr.is_ref()) {
    if (expr.ref_kind == formula::RefKind::kInput) return level > 0;
    return expr.level < level &&
           std::find(grouping_keys.begin(), grouping_keys.end(), expr.name) ==
               grouping_keys.end();
  }
  return std::any_of(expr.args.begin(), expr.args.end(), [&](const TypedExpr& a) {
    return HasAutoAggregation(a, level, grouping_keys);
  });
}

std::vector<std::string> Fingerprints(const CalcGraph& g) {
  std::vector<std::string> fp(g.nodes.size());
  std::vector<int> state(g.nodes.size(), 0);
  std::function<const std::string&(int)> of;
  std::function<std::string(const TypedExpr&)> canon = [&](const TypedExpr& e) {
    std::string s = "(" + std::to_string(static_cast<int>(e.kind)) + ":" +
                    std::string(ScalarTypeName(e.type));
    switch (e.kind) {
      case Expr::Kind::kLiteral:
        s += ":" + std::to_string(e.literal.index()) + ":" + ValueToString(e.literal);
        break;
      case Expr::Kind::kColumnRef:
        if (e.ref_kind == formula::RefKind::kInput) {
          s += ":I:" + e.name;
        } else if (const Node* c = g.FindColumn(e.name)) {
          s += ":C:" + of(static_cast<int>(c - g.nodes.data()));
        }
        break;
      case Expr::Kind::kBinary:
        s += ":" + std::to_string(static_cast<int>(e.binary_op));
        break;
      case Expr::Kind::kUnary:
        s += ":" + std::to_string(static_cast<int>(e.unary_op));
        break;
      default:
        s += ":" + e.name;
        break;
    }
    for (const TypedExpr& a : e.args) s += canon(a);
    return s + ")";
  };
  of = [&](int id) -> const std::string& {
    if (state[id] == 2) return fp[id];
    if (state[id] == 1) throw InternalError("fingerprint cycle at " + g.nodes[id].name);
    state[id] = 1;
    const Node& n = g.nodes[id];
    std::string text = (n.kind == Node::Kind::kColumn ? "col:" : "filter:") +
                       std::to_string(n.level) + ":" + (n.hidden ? "h" : "v") + ":" +
                       canon(n.expr);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(Fnv1a(text)));
    fp[id] = buf;
    state[id] = 2;
    return fp[id];
  };
  for (size_t i = 0; i < g.nodes.size(); ++i) of(static_cast<int>(i));
  return fp;
}

OutputLayout ComputeLayout(const CalcGraph& g) {
  const spec::ValidatedSpec& vs = g.spec->validated;
  const int totals = vs.totals();
  OutputLayout out;
  out.grain = vs.grain;
  std::set<std::string> listed;
  auto list = [&](const std::string& name) {
    if (listed.insert(name).second) out.columns.push_back(name);
  };
  for (int l = totals - 1; l >= vs.grain; --l) {
    for (const std::string& k : vs.levels[l].own_keys) {
      if (g.outputs.count(g.by_name.at(k))) list(k);
    }
    for (int id : g.outputs) {
      if (g.nodes[id].level == l) list(g.nodes[id].name);
    }
  }
  for (int id : g.outputs) {
    if (g.nodes[id].level == totals) list(g.nodes[id].name);
  }
  for (const std::string& c : out.columns) {
    const Node& n = g.column(c);
    if (HasAutoAggregation(n.expr, n.level, vs.levels[n.level].grouping_keys)) {
      out.annotated.push_back(c);
    }
  }
  std::set<std::string> sorted;
  auto sort_by = [&](const std::string& c, bool desc) {
    if (sorted.insert(c).second) out.sort.push_back({c, desc});
  };
  for (int l = totals - 1; l >= vs.grain; --l) {
    for (const spec::OrderItem& item : vs.levels[l].ordering) {
      sort_by(item.column, item.direction == spec::Direction::kDesc);
    }
    for (const std::string& k : vs.levels[l].own_keys) sort_by(k, false);
  }
  // Above the base the level keys already order grain records totally.
  if (vs.grain >= 1 && vs.grain < totals) return out;
  std::vector<std::string> fp = Fingerprints(g);
  std::vector<std::pair<std::string, std::string>> rest;
  for (const std::string& c : out.columns) {
    int id = g.by_name.at(c);
    char idx[16];
    std::snprintf(idx, sizeof(idx), "%08d", id);
    rest.emplace_back(fp[id] + idx, c);
  }
  std::sort(rest.begin(), rest.end());
  for (const auto& [_, c] : rest) sort_by(c, false);
  return out;
}

}  // namespace sheetc::calc
