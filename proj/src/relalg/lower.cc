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

#include "sheetc/calc/layout.h"
#include "sheetc/common/errors.h"
#include "sheetc/relalg/relalg.h"

namespace sheetc::relalg {

using formula::Expr;
using formula::FunctionClass;
using formula::TypedExpr;
using JT = RelNode::JoinType;

namespace {

TypedExpr Call(const std::string& name, std::vector<TypedExpr> args, ScalarType type) {
  TypedExpr e;
  e.kind = Expr::Kind::kCall;
  e.name = name;
  e.function = formula::LookupFunction(name);
  e.args = std::move(args);
  e.type = type;
  return e;
}

TypedExpr Binary(formula::BinaryOp op, TypedExpr l, TypedExpr r) {
  TypedExpr e;
  e.kind = Expr::Kind::kBinary;
  e.binary_op = op;
  e.type = formula::IsComparison(op) || op == formula::BinaryOp::kAnd ||
                   op == formula::BinaryOp::kOr
               ? ScalarType::kLogical
               : l.type;
  e.args = {std::move(l), std::move(r)};
  return e;
}

TypedExpr IfThen(TypedExpr cond, TypedExpr then) {
  TypedExpr e;
  e.kind = Expr::Kind::kIf;
  e.type = then.type;
  e.args = {std::move(cond), std::move(then)};
  return e;
}

std::vector<JoinCond> NullSafeOn(const std::vector<std::string>& keys) {
  std::vector<JoinCond> on;
  for (const std::string& k : keys) on.push_back({k, k, true});
  return on;
}

class Lowering {
 public:
  Lowering(const walg::Plan& plan, const NestedCompiler& nested, const LowerOptions& options)
      : plan_(plan),
        vs_(plan.spec()),
        rs_(*plan.graph->spec),
        nested_(nested),
        options_(options),
        totals_(vs_.totals()),
        state_(static_cast<size_t>(totals_) + 1) {
    for (const auto& [key, info] : plan.attrs) {
      std::string name = key.substr(0, key.rfind('@'));
      auto it = resident_.find(name);
      if (it == resident_.end() || info.level < it->second) resident_[name] = info.level;
    }
  }

  RelPlan Run() {
    state_[0] = SourceRelation();
    const auto& ops = plan_.ops;
    std::vector<bool> consumed(ops.size(), false);
    for (size_t i = 0; i < ops.size(); ++i) {
      if (consumed[i]) continue;
      const walg::Op& op = ops[i];
      switch (op.kind) {
        case walg::Op::Kind::kProject:
          RunProject(op);
          break;
        case walg::Op::Kind::kJoin:
          RunJoin(op, JT::kLeft);
          break;
        case walg::Op::Kind::kSelect: {
          const walg::Op* next = i + 1 < ops.size() ? &ops[i + 1] : nullptr;
          if (next && !(next->elidable && next->is_aggregate_join() && next->source == op.level)) {
            next = nullptr;
          }
          if (RunSelect(op, next)) consumed[i + 1] = true;
          break;
        }
      }
    }
    return Flatten();
  }

 private:
  int Resident(const std::string& attr) const {
    auto it = resident_.find(attr);
    return it == resident_.end() ? 0 : it->second;
  }

  const std::vector<std::string>& Keys(int level) const { return vs_.levels[level].grouping_keys; }

  Rel LoadInput(const spec::ResolvedInput& in, const std::string& scope) {
    std::vector<spec::Attribute> schema;
    std::vector<std::string> columns;
    for (const spec::Attribute& a : in.source.schema) {
      schema.push_back({scope + "." + a.name, a.type});
      columns.push_back(a.name);
    }
    switch (in.source.kind) {
      case spec::InputSource::Kind::kTable:
      case spec::InputSource::Kind::kCsv:
        return Scan(in.source.ref, schema, columns);
      case spec::InputSource::Kind::kSql:
        return ScanSql(in.source.ref, schema, columns);
      case spec::InputSource::Kind::kWorksheet: {
        RelPlan nested = nested_(*in.worksheet);
        std::vector<NamedExpr> items;
        for (size_t i = 0; i < schema.size(); ++i) {
          items.push_back({schema[i].name, Ref(nested.root, columns[i])});
        }
        return Project(nested.root, std::move(items));
      }
    }
    throw InternalError("unknown input kind");
  }

  Rel SourceRelation() {
    Rel acc = LoadInput(rs_.inputs[0], rs_.inputs[0].source.alias);
    for (const spec::ResolvedJoin& j : rs_.joins) {
      const spec::ResolvedInput& in = rs_.inputs[j.input];
      JT type = JT::kInner;
      switch (j.type) {
        case spec::JoinType::kInner:
          type = JT::kInner;
          break;
        case spec::JoinType::kLeft:
          type = JT::kLeft;
          break;
        case spec::JoinType::kRight:
          type = JT::kRight;
          break;
        case spec::JoinType::kFull:
          type = JT::kFull;
          break;
        case spec::JoinType::kSemi:
        case spec::JoinType::kAnti:
          throw UnsupportedQuery("input `" + in.source.alias + "` is " +
                                 std::string(spec::JoinTypeName(j.type)) +
                                 "-joined; semi- and anti-joins cannot be expressed");
      }
      std::vector<JoinCond> on;
      for (const auto& [l, r] : j.on) on.push_back({l, r, false});
      acc = Join(type, acc, LoadInput(in, in.source.alias), on, JoinOrigin::kSource, false, false);
    }
    for (const spec::ResolvedLink& l : rs_.links) {
      std::vector<JoinCond> on;
      for (const auto& [a, b] : l.on) on.push_back({a, b, false});
      acc = Join(JT::kLeft, acc, LoadInput(rs_.inputs[l.input], l.name), on, JoinOrigin::kLink,
                 false, false);
    }
    return acc;
  }

  Rel& Form(int level) {
    Rel& s = state_[level];
    if (s) return s;
    if (level == totals_) {
      s = Values();
      return s;
    }
    Rel lower = Form(level - 1);
    s = Aggregate(lower, Keys(level), {});
    return s;
  }

  // Adds the attributes in `needed` missing from `rel` (records of `level`)
  // by joining the ancestor levels that hold them.
  Rel Attach(Rel rel, int level, const std::vector<std::string>& needed) {
    std::map<int, std::set<std::string>> fetch;
    std::vector<std::string> work;
    for (const std::string& a : needed) {
      if (!rel->Has(a)) work.push_back(a);
    }
    std::set<std::string> queued(work.begin(), work.end());
    while (!work.empty()) {
      std::string a = work.back();
      work.pop_back();
      int r = Resident(a);
      if (r <= level) throw InternalError("attribute " + a + " is not available at level " + std::to_string(level));
      if (!fetch[r].insert(a).second) continue;
      for (const std::string& k : Keys(r)) {
        if (!rel->Has(k) && queued.insert(k).second) work.push_back(k);
      }
    }
    for (const auto& [r, attrs] : fetch) {
      Rel upper = Form(r);
      std::vector<std::string> keep = Keys(r);
      for (const std::string& a : attrs) {
        if (std::find(keep.begin(), keep.end(), a) == keep.end()) keep.push_back(a);
      }
      rel = Join(JT::kLeft, rel, Keep(upper, keep), NullSafeOn(Keys(r)), JoinOrigin::kAncestor,
                 true, true);
    }
    return rel;
  }

  std::vector<OrderKey> LevelOrder(int level) const {
    std::vector<OrderKey> order;
    std::set<std::string> seen;
    for (const spec::OrderItem& item : vs_.levels[level].ordering) {
      if (seen.insert(item.column).second) {
        order.push_back({item.column, item.direction == spec::Direction::kDesc});
      }
    }
    for (const std::string& k : vs_.levels[level].own_keys) {
      if (seen.insert(k).second) order.push_back({k, false});
    }
    return order;
  }

  static int LiteralInt(const TypedExpr& call, size_t i, int def) {
    if (call.args.size() <= i) return def;
    return static_cast<int>(std::get<double>(call.args[i].literal));
  }

  // Replaces window calls in `e` (innermost first) with attributes computed
  // by Window nodes stacked on `rel`.
  TypedExpr StageWindows(const TypedExpr& e, int level, Rel& rel) {
    TypedExpr out = e;
    for (TypedExpr& a : out.args) a = StageWindows(a, level, rel);
    if (!out.is_call(FunctionClass::kWindow)) return out;
    std::vector<std::string> partition;
    if (level < totals_) partition = Keys(level + 1);
    std::vector<OrderKey> order = LevelOrder(level);
    std::string name = "#w" + std::to_string(++windows_);
    WindowItem w;
    w.name = name;
    w.fn = out.name;
    w.partition = partition;
    w.order = order;
    w.type = out.type;
    const std::string& fn = out.name;
    if (fn == "Lag" || fn == "Lead") {
      w.args = {out.args[0]};
      w.offset = LiteralInt(out, 1, 1);
    } else if (fn == "CumulativeSum") {
      w.args = {out.args[0]};
    } else if (fn == "MovingAverage") {
      w.args = {out.args[0]};
      w.offset = LiteralInt(out, 1, 2);
    } else if (fn == "Rank") {
      if (!out.args.empty()) {
        w.args = {out.args[0]};
        if (out.args.size() > 1) {
          std::string dir = std::get<std::string>(out.args[1].literal);
          w.rank_descending = !dir.empty() && (dir[0] == 'd' || dir[0] == 'D');
        }
      }
    } else if (fn == "FillDown") {
      WindowItem run;
      run.name = name + "g";
      run.fn = "RunningCount";
      run.args = {out.args[0]};
      run.partition = partition;
      run.order = order;
      run.type = ScalarType::kNumber;
      rel = Window(rel, {run});
      w.fn = "GroupMax";
      w.args = {out.args[0]};
      w.partition.push_back(run.name);
      w.order.clear();
    } else {
      throw InternalError("cannot lower window function " + fn);
    }
    rel = Window(rel, {w});
    return Ref(rel, name);
  }

  void RunProject(const walg::Op& op) {
    Rel rel = Form(op.level);
    std::vector<NamedExpr> items;
    for (const walg::ProjectItem& item : op.items) {
      items.push_back({item.name, StageWindows(item.expr, op.level, rel)});
    }
    state_[op.level] = Extend(rel, std::move(items));
  }

  void RunJoin(const walg::Op& op, JT type) {
    Form(op.source);
    Form(op.level);
    if (op.source > op.level) {
      const int m = op.source, l = op.level;
      Rel left = Attach(state_[l], l, Keys(m));
      std::vector<NamedExpr> items;
      for (const std::string& k : Keys(m)) items.push_back({k, Ref(state_[m], k)});
      for (const walg::JoinItem& j : op.joins) items.push_back({j.name, Ref(state_[m], j.attr)});
      state_[l] = Join(JT::kLeft, left, Project(state_[m], std::move(items)), NullSafeOn(Keys(m)),
                       JoinOrigin::kRepeat, true, true);
      return;
    }
    const int s = op.source, t = op.level;
    Rel src = Attach(state_[s], s, Keys(t));
    std::vector<AggItem> aggs;
    for (const walg::JoinItem& j : op.joins) {
      if (j.kind == walg::JoinItem::Kind::kAggregate) {
        AggItem a{j.name, j.expr.name, std::nullopt, j.expr.type};
        if (!j.expr.args.empty()) a.arg = j.expr.args[0];
        aggs.push_back(std::move(a));
      } else {
        TypedExpr arg = Ref(src, j.attr);
        aggs.push_back({j.name + "#min", "Min", arg, arg.type});
        aggs.push_back({j.name + "#max", "Max", arg, arg.type});
      }
    }
    Rel agg = Aggregate(src, Keys(t), std::move(aggs));
    bool post = std::any_of(op.joins.begin(), op.joins.end(), [](const walg::JoinItem& j) {
      return j.kind == walg::JoinItem::Kind::kAutoAgg;
    });
    if (post) {
      std::vector<NamedExpr> items;
      for (const std::string& k : Keys(t)) items.push_back({k, Ref(agg, k)});
      for (const walg::JoinItem& j : op.joins) {
        if (j.kind == walg::JoinItem::Kind::kAggregate) {
          items.push_back({j.name, Ref(agg, j.name)});
          continue;
        }
        TypedExpr lo = Ref(agg, j.name + "#min"), hi = Ref(agg, j.name + "#max");
        items.push_back({j.name, IfThen(Binary(formula::BinaryOp::kEq, lo, hi), lo)});
        items.push_back({j.flag, Call("Coalesce",
                                      {Binary(formula::BinaryOp::kNe, lo, hi),
                                       TypedExpr::Literal(false, ScalarType::kLogical)},
                                      ScalarType::kLogical)});
      }
      agg = Project(agg, std::move(items));
    }
    state_[t] = Join(type, state_[t], agg, NullSafeOn(Keys(t)), JoinOrigin::kAggregate, true,
                     type == JT::kLeft);
  }

  // Filters level `p` and semijoins every other formed level below the
  // totals with its nearest already-filtered neighbour. An elidable join into
  // a formed level is run as an inner join in place of that semijoin; returns
  // whether it was.
  bool RunSelect(const walg::Op& op, const walg::Op* elidable) {
    const int p = op.level;
    Form(p);
    Rel filtered = Select(state_[p], op.predicate);
    if (p < totals_) state_[p] = filtered;
    auto semi = [&](int target, const Rel& by, int by_level) {
      const std::vector<std::string>& keys = Keys(std::max(target, by_level));
      state_[target] = Join(JT::kSemi, state_[target], Keep(by, keys), NullSafeOn(keys),
                            JoinOrigin::kSource, true, false);
    };
    Rel below = filtered;
    int below_level = p;
    for (int j = p - 1; j >= 0; --j) {
      if (!state_[j]) continue;
      semi(j, below, below_level);
      below = state_[j];
      below_level = j;
    }
    bool consumed = false;
    Rel above = filtered;
    for (int q = p + 1; q < totals_; ++q) {
      if (!state_[q]) continue;
      if (elidable && elidable->level == q) {
        RunJoin(*elidable, JT::kInner);
        consumed = true;
      } else {
        semi(q, above, q);
      }
      above = state_[q];
    }
    return consumed;
  }

  RelPlan Flatten() {
    const calc::OutputLayout& layout = plan_.layout;
    const int grain = layout.grain;
    Rel rel = Form(grain);
    std::vector<std::string> needed = layout.columns;
    for (const std::string& c : layout.annotated) needed.push_back(calc::AnnotationName(c));
    for (const calc::SortKey& k : layout.sort) needed.push_back(k.column);
    rel = Attach(rel, grain, needed);

    std::optional<spec::PageSpec> page = options_.page ? options_.page : vs_.spec.page;
    if (options_.apply_page) {
      std::vector<OrderKey> keys;
      for (const calc::SortKey& k : layout.sort) keys.push_back({k.column, k.descending});
      rel = Sort(rel, std::move(keys));
      if (page) rel = Limit(rel, page->limit, page->offset);
    }

    RelPlan out;
    for (const std::string& c : layout.columns) {
      out.output.columns.push_back(*rel->Find(c));
    }
    for (const std::string& c : layout.annotated) {
      out.output.columns.push_back({calc::AnnotationName(c), ScalarType::kLogical});
    }
    out.output.annotated = layout.annotated;
    std::vector<NamedExpr> items;
    for (const spec::Attribute& a : out.output.columns) items.push_back({a.name, Ref(rel, a.name)});
    out.root = Project(rel, std::move(items));
    return out;
  }

  const walg::Plan& plan_;
  const spec::ValidatedSpec& vs_;
  const spec::ResolvedSpec& rs_;
  const NestedCompiler& nested_;
  const LowerOptions& options_;
  const int totals_;
  std::vector<Rel> state_;
  std::map<std::string, int> resident_;
  int windows_ = 0;
};

}  // namespace

RelPlan Lower(const walg::Plan& plan, const NestedCompiler& nested, const LowerOptions& options) {
  return Lowering(plan, nested, options).Run();
}

}  // namespace sheetc::relalg
