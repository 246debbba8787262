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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "sheetc/common/errors.h"
#include "sheetc/sqlgen/sqlgen.h"

namespace sheetc::sqlgen {

using relalg::Rel;
using relalg::RelNode;
using Kind = RelNode::Kind;
using JT = RelNode::JoinType;

namespace {

// Structural identity of a subtree; equal keys render identical SQL.
class Keyer {
 public:
  const std::string& Key(const RelNode* n) {
    auto it = keys_.find(n);
    if (it != keys_.end()) return it->second;
    std::ostringstream out;
    out << static_cast<int>(n->kind) << '(';
    switch (n->kind) {
      case Kind::kScan:
        out << n->scan_sql << '|' << n->source;
        for (size_t i = 0; i < n->schema.size(); ++i) {
          out << '|' << n->schema[i].name << '=' << n->source_columns[i];
        }
        break;
      case Kind::kProject:
        for (const auto& it2 : n->items) out << it2.name << '=' << formula::PrintTyped(it2.expr) << ';';
        break;
      case Kind::kSelect:
        out << formula::PrintTyped(n->predicate);
        break;
      case Kind::kJoin:
        out << static_cast<int>(n->join_type) << n->merge_keys;
        for (const auto& c : n->on) out << c.left << (c.null_safe ? "<=>" : "=") << c.right << ';';
        break;
      case Kind::kAggregate:
        for (const auto& g : n->group_by) out << g << ',';
        for (const auto& a : n->aggs) {
          out << a.name << '=' << a.fn << '(' << (a.arg ? formula::PrintTyped(*a.arg) : "") << ");";
        }
        break;
      case Kind::kWindow:
        for (const auto& w : n->windows) {
          out << w.name << '=' << w.fn << w.offset << w.rank_descending << '(';
          for (const auto& a : w.args) out << formula::PrintTyped(a) << ',';
          out << ")p";
          for (const auto& p : w.partition) out << p << ',';
          out << 'o';
          for (const auto& o : w.order) out << o.attr << o.descending << ',';
          out << ';';
        }
        break;
      case Kind::kSort:
        for (const auto& o : n->sort) out << o.attr << o.descending << ',';
        break;
      case Kind::kLimit:
        out << n->limit << ',' << n->offset;
        break;
      case Kind::kValues:
        break;
    }
    for (const Rel& in : n->inputs) out << '[' << Key(in.get()) << ']';
    out << ')';
    return keys_[n] = out.str();
  }

 private:
  std::map<const RelNode*, std::string> keys_;
};

struct CtePlan {
  // Structural key of every CTE, dependencies first.
  std::vector<std::string> order;
  std::map<std::string, const RelNode*> node;
};

void Heights(const RelNode* n, std::map<const RelNode*, int>& h) {
  if (h.count(n)) return;
  int best = 0;
  for (const Rel& in : n->inputs) {
    Heights(in.get(), h);
    best = std::max(best, h[in.get()] + 1);
  }
  h[n] = best;
}

// Column renames over a table are cheaper inline than as a CTE.
bool Renaming(const RelNode* n) {
  if (n->kind != Kind::kProject || n->inputs[0]->kind != Kind::kScan) return false;
  return std::all_of(n->items.begin(), n->items.end(),
                     [](const relalg::NamedExpr& e) { return e.expr.is_ref(); });
}

CtePlan Plan(const relalg::RelPlan& plan, Keyer& keyer) {
  std::map<const RelNode*, int> height;
  Heights(plan.root.get(), height);
  // One representative node per key.
  std::map<std::string, const RelNode*> rep;
  std::map<std::string, int> key_height;
  for (const auto& [n, h] : height) {
    const std::string& k = keyer.Key(n);
    rep.emplace(k, n);
    key_height[k] = h;
  }
  std::vector<std::string> keys;
  for (const auto& [k, h] : key_height) keys.push_back(k);
  std::stable_sort(keys.begin(), keys.end(), [&](const std::string& a, const std::string& b) {
    return key_height[a] > key_height[b];
  });
  std::map<std::string, int> occ;
  occ[keyer.Key(plan.root.get())] = 1;
  std::set<std::string> ctes;
  for (const std::string& k : keys) {
    const RelNode* n = rep[k];
    int o = occ[k];
    bool cte = o >= 2 && n->kind != Kind::kScan && n->kind != Kind::kValues && !Renaming(n);
    if (cte) ctes.insert(k);
    int eff = cte ? 1 : o;
    for (const Rel& in : n->inputs) occ[keyer.Key(in.get())] += eff;
  }
  CtePlan out;
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) {
    if (ctes.count(*it)) {
      out.order.push_back(*it);
      out.node[*it] = rep[*it];
    }
  }
  return out;
}

std::string Indent(const std::string& text) {
  std::string out = "  ";
  for (size_t i = 0; i < text.size(); ++i) {
    out += text[i];
    if (text[i] == '\n' && i + 1 < text.size()) out += "  ";
  }
  return out;
}

}  // namespace

std::vector<const RelNode*> PlanCtes(const relalg::RelPlan& plan, const Dialect&) {
  Keyer keyer;
  CtePlan p = Plan(plan, keyer);
  std::vector<const RelNode*> out;
  for (const std::string& k : p.order) out.push_back(p.node[k]);
  return out;
}

namespace {

// A SELECT under construction. `scope` maps each visible attribute to the
// SQL expression that computes it over `from`.
struct Block {
  std::string from;
  std::map<std::string, std::string> scope;
  std::set<std::string> constants;
  std::vector<std::string> where;
  bool grouped = false;
  std::vector<std::string> group;
  std::vector<std::string> having;
  bool windowed = false;
  bool projected = false;
  std::string order;
  std::string limit;
};

class Renderer {
 public:
  Renderer(const Dialect& d, const RenderOptions& options, const relalg::RelPlan& plan)
      : d_(d), options_(options), plan_(plan) {
    used_.insert("__unit");
  }

  SqlQuery Run() {
    SqlQuery out;
    std::string with;
    if (options_.ctes) {
      CtePlan ctes = Plan(plan_, keyer_);
      for (const std::string& k : ctes.order) {
        const RelNode* n = ctes.node[k];
        std::string name = "q" + std::to_string(out.cte_count++);
        std::string body = Finish(Build(n, true), n->schema, false);
        with += (with.empty() ? "WITH " : ",\n") + name + " AS (\n" + Indent(body) + "\n)";
        cte_name_[k] = name;
      }
    }
    Block top = Build(plan_.root.get(), false);
    out.text = (with.empty() ? "" : with + "\n") + Finish(top, plan_.root->schema, true);
    out.columns = plan_.output.columns;
    return out;
  }

 private:
  const std::string& Id(const std::string& attr) {
    auto it = ids_.find(attr);
    if (it != ids_.end()) return it->second;
    std::string base;
    for (char c : attr) {
      base += std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_';
    }
    if (base.empty() || std::isdigit(static_cast<unsigned char>(base[0]))) base = "c_" + base;
    std::string name = base;
    for (int i = 2; used_.count(Fold(name)); ++i) name = base + "_" + std::to_string(i);
    used_.insert(Fold(name));
    return ids_[attr] = QuoteIdentifier(name, d_);
  }

  static std::string Fold(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  std::string Alias() { return "t" + std::to_string(alias_++); }

  std::string Expr(const formula::TypedExpr& e, const Block& b) {
    return RenderScalar(e, d_, [&](const std::string& name) -> std::string {
      auto it = b.scope.find(name);
      if (it == b.scope.end()) throw InternalError("sqlgen: no column for `" + name + "`");
      return it->second;
    });
  }

  const std::string& Col(const Block& b, const std::string& attr) {
    auto it = b.scope.find(attr);
    if (it == b.scope.end()) throw InternalError("sqlgen: no column for `" + attr + "`");
    return it->second;
  }

  // Table reference for `n` with every attribute as a column.
  Block Item(const RelNode* n) {
    Block b;
    std::string alias = Alias();
    auto cte = options_.ctes ? cte_name_.find(keyer_.Key(n)) : cte_name_.end();
    if (cte != cte_name_.end()) {
      b.from = cte->second + " AS " + alias;
    } else if (n->kind == Kind::kScan) {
      if (n->scan_sql) {
        b.from = "(\n" + Indent(n->source) + "\n) AS " + alias;
      } else {
        b.from = QuoteIdentifier(n->source, d_) + " AS " + alias;
      }
      for (size_t i = 0; i < n->schema.size(); ++i) {
        b.scope[n->schema[i].name] = alias + "." + QuoteIdentifier(n->source_columns[i], d_);
      }
      return b;
    } else if (n->kind == Kind::kValues) {
      b.from = "(SELECT 1 AS " + QuoteIdentifier("__unit", d_) + ") AS " + alias;
      return b;
    } else {
      Block inner = Build(n, true);
      b.from = "(\n" + Indent(Finish(inner, n->schema, false)) + "\n) AS " + alias;
    }
    for (const auto& a : n->schema) b.scope[a.name] = alias + "." + Id(a.name);
    return b;
  }

  Block Wrap(const Block& inner, const std::vector<spec::Attribute>& schema) {
    Block b;
    std::string alias = Alias();
    b.from = "(\n" + Indent(Finish(inner, schema, false)) + "\n) AS " + alias;
    for (const auto& a : schema) b.scope[a.name] = alias + "." + Id(a.name);
    return b;
  }

  bool IsCte(const RelNode* n) {
    return options_.ctes && cte_name_.count(keyer_.Key(n));
  }

  std::string OrderItem(const std::string& expr, bool desc) {
    return expr + (desc ? " DESC NULLS LAST" : " ASC NULLS FIRST");
  }

  std::string LimitText(int64_t limit, int64_t offset) {
    std::string out;
    if (limit >= 0) {
      out = "LIMIT " + std::to_string(limit);
    } else if (offset > 0) {
      if (d_.text_dates) out = "LIMIT -1";
      if (d_.id == "bigquery") out = "LIMIT 9223372036854775807";
    }
    if (offset > 0) out += (out.empty() ? "" : " ") + std::string("OFFSET ") + std::to_string(offset);
    return out;
  }

  std::string Cond(const relalg::JoinCond& c, const Block& l, const Block& r) {
    const std::string& a = Col(l, c.left);
    const std::string& b = Col(r, c.right);
    if (!c.null_safe) return a + " = " + b;
    switch (d_.null_safe) {
      case NullSafeEq::kIs:
        return a + " IS " + b;
      case NullSafeEq::kExpanded:
        return "(" + a + " = " + b + " OR (" + a + " IS NULL AND " + b + " IS NULL))";
      case NullSafeEq::kIsNotDistinctFrom:
        break;
    }
    return a + " IS NOT DISTINCT FROM " + b;
  }

  std::string Conds(const RelNode* n, const Block& l, const Block& r) {
    if (n->on.empty()) return "TRUE";
    std::string out;
    for (const auto& c : n->on) out += (out.empty() ? "" : " AND ") + Cond(c, l, r);
    return out;
  }

  std::string AggText(const relalg::AggItem& a, const Block& b) {
    std::string x = a.arg ? Expr(*a.arg, b) : "";
    bool logical = a.arg && a.arg->type == ScalarType::kLogical;
    if (a.fn == "Sum") return "SUM(" + x + ")";
    if (a.fn == "Avg") return "AVG(" + x + ")";
    if (a.fn == "Min") return (logical && !d_.bool_and.empty() ? d_.bool_and : "MIN") + "(" + x + ")";
    if (a.fn == "Max") return (logical && !d_.bool_or.empty() ? d_.bool_or : "MAX") + "(" + x + ")";
    if (a.fn == "Count") return a.arg ? "COUNT(" + x + ")" : "COUNT(*)";
    if (a.fn == "CountIf") return "COUNT(CASE WHEN " + x + " THEN 1 END)";
    if (a.fn == "CountDistinct") return "COUNT(DISTINCT " + x + ")";
    throw DialectError("no rendering for aggregate " + a.fn);
  }

  std::string WindowText(const relalg::WindowItem& w, const Block& b) {
    std::string over;
    for (size_t i = 0; i < w.partition.size(); ++i) {
      over += (i ? ", " : "PARTITION BY ") + Col(b, w.partition[i]);
    }
    std::string order;
    if (w.fn == "Rank" && !w.args.empty()) {
      order = OrderItem(Expr(w.args[0], b), w.rank_descending);
    } else if (w.fn != "GroupMax") {
      for (const auto& o : w.order) {
        order += (order.empty() ? "" : ", ") + OrderItem(Col(b, o.attr), o.descending);
      }
    }
    if (!order.empty()) over += (over.empty() ? "" : " ") + std::string("ORDER BY ") + order;
    std::string x = w.args.empty() || w.fn == "Rank" ? "" : Expr(w.args[0], b);
    std::string running = " ROWS BETWEEN UNBOUNDED PRECEDING AND CURRENT ROW";
    std::string fn;
    if (w.fn == "Lag" || w.fn == "Lead") {
      fn = (w.fn == "Lag" ? "LAG(" : "LEAD(") + x + ", " + std::to_string(w.offset) + ")";
    } else if (w.fn == "CumulativeSum") {
      fn = "SUM(" + x + ")";
      over += running;
    } else if (w.fn == "MovingAverage") {
      fn = "AVG(" + x + ")";
      over += " ROWS BETWEEN " + std::to_string(w.offset) + " PRECEDING AND CURRENT ROW";
    } else if (w.fn == "RunningCount") {
      fn = "COUNT(" + x + ")";
      over += running;
    } else if (w.fn == "Rank") {
      fn = "RANK()";
    } else if (w.fn == "GroupMax") {
      bool logical = w.type == ScalarType::kLogical && !d_.bool_or.empty();
      fn = (logical ? d_.bool_or : "MAX") + "(" + x + ")";
    } else {
      throw DialectError("no rendering for window function " + w.fn);
    }
    if (!over.empty() && over[0] == ' ') over.erase(0, 1);
    return fn + " OVER (" + over + ")";
  }

  // Rendering of `n`; `self` builds a CTE's own body instead of naming it.
  Block Build(const RelNode* n, bool self) {
    if ((!self && IsCte(n)) || n->kind == Kind::kScan || n->kind == Kind::kValues) {
      return Item(n);
    }
    const RelNode* in = n->inputs.empty() ? nullptr : n->inputs[0].get();
    switch (n->kind) {
      case Kind::kSelect: {
        Block b = Build(in, false);
        if (b.windowed || !b.order.empty() || !b.limit.empty()) b = Wrap(b, in->schema);
        (b.grouped ? b.having : b.where).push_back(Expr(n->predicate, b));
        return b;
      }
      case Kind::kProject: {
        Block b = Build(in, false);
        if (b.projected) b = Wrap(b, in->schema);
        std::map<std::string, std::string> scope;
        std::set<std::string> constants;
        for (const auto& item : n->items) {
          scope[item.name] = Expr(item.expr, b);
          if (item.expr.kind == formula::Expr::Kind::kLiteral) constants.insert(item.name);
        }
        b.scope = std::move(scope);
        b.constants = std::move(constants);
        b.projected = true;
        return b;
      }
      case Kind::kSort: {
        Block b = Build(in, false);
        if (!b.limit.empty()) b = Wrap(b, in->schema);
        std::string order;
        for (const auto& k : n->sort) {
          if (b.constants.count(k.attr)) continue;
          order += (order.empty() ? "" : ", ") + OrderItem(Col(b, k.attr), k.descending);
        }
        b.order = order;
        return b;
      }
      case Kind::kLimit: {
        Block b = Build(in, false);
        if (!b.limit.empty()) b = Wrap(b, in->schema);
        b.limit = LimitText(n->limit, n->offset);
        return b;
      }
      case Kind::kAggregate: {
        Block b = Build(in, false);
        bool constant_key = std::any_of(n->group_by.begin(), n->group_by.end(),
                                        [&](const std::string& g) { return b.constants.count(g) > 0; });
        if (b.grouped || b.windowed || !b.order.empty() || !b.limit.empty() || constant_key) {
          b = Wrap(b, in->schema);
        }
        std::map<std::string, std::string> scope;
        for (const std::string& g : n->group_by) {
          scope[g] = Col(b, g);
          b.group.push_back(scope[g]);
        }
        for (const auto& a : n->aggs) scope[a.name] = AggText(a, b);
        b.scope = std::move(scope);
        b.constants.clear();
        b.grouped = true;
        b.projected = false;
        return b;
      }
      case Kind::kWindow: {
        Block b = Build(in, false);
        if (b.grouped || b.windowed || !b.order.empty() || !b.limit.empty()) b = Wrap(b, in->schema);
        for (const auto& w : n->windows) b.scope[w.name] = WindowText(w, b);
        b.windowed = true;
        return b;
      }
      case Kind::kJoin:
        return BuildJoin(n);
      default:
        break;
    }
    throw InternalError("sqlgen: unexpected node");
  }

  // Left side of a join chain; WHERE terms commute with the joins added.
  Block JoinBase(const RelNode* n, bool allow_where) {
    Block b = Build(n, false);
    if (b.grouped || b.windowed || !b.order.empty() || !b.limit.empty() ||
        (!allow_where && !b.where.empty())) {
      b = Wrap(b, n->schema);
    }
    return b;
  }

  void Merge(Block& into, const Block& other, const RelNode* join) {
    std::set<std::string> dropped;
    if (join->merge_keys) {
      for (const auto& c : join->on) dropped.insert(c.right);
    }
    for (const auto& [k, v] : other.scope) {
      if (!dropped.count(k)) into.scope[k] = v;
    }
    for (const std::string& c : other.constants) into.constants.insert(c);
  }

  Block BuildJoin(const RelNode* n) {
    const RelNode* left = n->inputs[0].get();
    const RelNode* right = n->inputs[1].get();
    switch (n->join_type) {
      case JT::kInner:
      case JT::kLeft: {
        Block l = JoinBase(left, true);
        Block r = Item(right);
        if (n->join_type == JT::kInner && n->on.empty()) {
          l.from += "\nCROSS JOIN " + r.from;
        } else {
          l.from += std::string(n->join_type == JT::kInner ? "\nJOIN " : "\nLEFT JOIN ") + r.from +
                    " ON " + Conds(n, l, r);
        }
        Merge(l, r, n);
        return l;
      }
      case JT::kSemi: {
        Block l = JoinBase(left, true);
        Block r = Item(right);
        if (d_.supports_semijoin_exists) {
          l.where.push_back("EXISTS (SELECT 1 FROM " + r.from + " WHERE " + Conds(n, l, r) + ")");
          return l;
        }
        std::string alias = Alias();
        std::string keys;
        Block d;
        for (const auto& c : n->on) {
          keys += (keys.empty() ? "" : ", ") + Col(r, c.right) + " AS " + Id(c.right);
          d.scope[c.right] = alias + "." + Id(c.right);
        }
        l.from += "\nJOIN (SELECT DISTINCT " + keys + " FROM " + r.from + ") AS " + alias + " ON " +
                  Conds(n, l, d);
        return l;
      }
      case JT::kRight: {
        if (d_.supports_right_join) {
          Block l = JoinBase(left, false);
          Block r = Item(right);
          l.from += "\nRIGHT JOIN " + r.from + " ON " + Conds(n, l, r);
          Merge(l, r, n);
          return l;
        }
        Block r = JoinBase(right, true);
        Block l = Item(left);
        r.from += "\nLEFT JOIN " + l.from + " ON " + Conds(n, l, r);
        Block out = l;
        out.from = r.from;
        out.where = r.where;
        Merge(out, r, n);
        return out;
      }
      case JT::kFull:
        break;
    }
    if (d_.supports_full_join) {
      Block l = JoinBase(left, false);
      Block r = Item(right);
      l.from += "\nFULL JOIN " + r.from + " ON " + Conds(n, l, r);
      Merge(l, r, n);
      return l;
    }
    // LEFT JOIN plus the unmatched right rows.
    std::set<std::string> left_attrs;
    for (const auto& a : left->schema) left_attrs.insert(a.name);
    Block l1 = Item(left), r1 = Item(right);
    Block both = l1;
    both.from += "\nLEFT JOIN " + r1.from + " ON " + Conds(n, l1, r1);
    Merge(both, r1, n);
    Block l2 = Item(left), r2 = Item(right);
    Block only = r2;
    for (const auto& a : n->schema) {
      if (left_attrs.count(a.name)) {
        only.scope[a.name] = "CAST(NULL AS " + SqlTypeName(a.type, d_) + ")";
      }
    }
    only.where.push_back("NOT EXISTS (SELECT 1 FROM " + l2.from + " WHERE " + Conds(n, l2, r2) + ")");
    Block out;
    std::string alias = Alias();
    out.from = "(\n" + Indent(Finish(both, n->schema, false) + "\nUNION ALL\n" +
                              Finish(only, n->schema, false)) +
               "\n) AS " + alias;
    for (const auto& a : n->schema) out.scope[a.name] = alias + "." + Id(a.name);
    return out;
  }

  std::string Finish(const Block& b, const std::vector<spec::Attribute>& schema, bool exact) {
    std::vector<std::string> items;
    for (const auto& a : schema) {
      const std::string& expr = Col(b, a.name);
      std::string name = exact ? QuoteIdentifier(a.name, d_) : Id(a.name);
      bool bare = expr.size() > name.size() &&
                  expr.compare(expr.size() - name.size() - 1, std::string::npos, "." + name) == 0;
      items.push_back(bare ? expr : expr + " AS " + name);
    }
    if (items.empty()) {
      items.push_back(std::string(b.grouped ? "COUNT(*)" : "1") + " AS " + QuoteIdentifier("__unit", d_));
    }
    std::string out = "SELECT";
    for (size_t i = 0; i < items.size(); ++i) out += (i ? ",\n  " : "\n  ") + items[i];
    out += "\nFROM " + b.from;
    for (size_t i = 0; i < b.where.size(); ++i) out += (i ? "\n  AND " : "\nWHERE ") + b.where[i];
    for (size_t i = 0; i < b.group.size(); ++i) out += (i ? ", " : "\nGROUP BY ") + b.group[i];
    for (size_t i = 0; i < b.having.size(); ++i) out += (i ? "\n  AND " : "\nHAVING ") + b.having[i];
    if (!b.order.empty()) out += "\nORDER BY " + b.order;
    if (!b.limit.empty()) out += "\n" + b.limit;
    return out;
  }

  const Dialect& d_;
  RenderOptions options_;
  const relalg::RelPlan& plan_;
  Keyer keyer_;
  std::map<std::string, std::string> cte_name_;
  std::map<std::string, std::string> ids_;
  std::set<std::string> used_;
  int alias_ = 0;
};

}  // namespace

SqlQuery Render(const relalg::RelPlan& plan, const Dialect& dialect, const RenderOptions& options) {
  return Renderer(dialect, options, plan).Run();
}

}  // namespace sheetc::sqlgen
