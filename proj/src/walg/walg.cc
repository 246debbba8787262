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

#include "sheetc/walg/walg.h"

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>
#include <tuple>

#include "sheetc/common/errors.h"

namespace sheetc::walg {

using formula::Expr;
using formula::FunctionClass;
using formula::TypedExpr;

std::string AttrKey(const std::string& name, int level) {
  return name + "@" + std::to_string(level);
}

namespace {

void CollectRefs(const TypedExpr& e, std::set<std::string>& out) {
  if (e.is_ref() && !e.is_error()) out.insert(AttrKey(e.name, e.level));
  for (const TypedExpr& a : e.args) CollectRefs(a, out);
}

bool ContainsWindow(const TypedExpr& e) {
  if (e.is_call(FunctionClass::kWindow)) return true;
  return std::any_of(e.args.begin(), e.args.end(), ContainsWindow);
}

TypedExpr AttrRef(const std::string& name, ScalarType type, int level) {
  return TypedExpr::ColumnRef(name, type, level);
}

TypedExpr Call(const std::string& fn, std::vector<TypedExpr> args, ScalarType type) {
  TypedExpr e;
  e.kind = Expr::Kind::kCall;
  e.function = formula::LookupFunction(fn);
  e.name = e.function->name;
  e.type = type;
  e.args = std::move(args);
  return e;
}

TypedExpr If(TypedExpr cond, TypedExpr then, TypedExpr otherwise) {
  TypedExpr e;
  e.kind = Expr::Kind::kIf;
  e.type = then.type;
  e.args = {std::move(cond), std::move(then), std::move(otherwise)};
  return e;
}

TypedExpr Num(double v) { return TypedExpr::Literal(v, ScalarType::kNumber); }

}  // namespace

std::vector<std::string> Op::Produces() const {
  std::vector<std::string> out;
  for (const ProjectItem& p : items) out.push_back(AttrKey(p.name, level));
  for (const JoinItem& j : joins) {
    out.push_back(AttrKey(j.name, level));
    if (j.kind == JoinItem::Kind::kAutoAgg) out.push_back(AttrKey(j.flag, level));
  }
  return out;
}

std::set<std::string> Op::Reads() const {
  std::set<std::string> out;
  for (const ProjectItem& p : items) CollectRefs(p.expr, out);
  for (const JoinItem& j : joins) {
    if (j.kind == JoinItem::Kind::kAggregate) {
      CollectRefs(j.expr, out);
    } else {
      out.insert(AttrKey(j.attr, source));
    }
  }
  if (kind == Kind::kSelect) CollectRefs(predicate, out);
  return out;
}

namespace {

struct Atom {
  Op op;
  int origin = 0;  // calc node id
  int seq = 0;     // creation order
  std::set<int> deps;
};

class Builder {
 public:
  Builder(const calc::CalcGraph& g, Plan& plan)
      : g_(g), vs_(g.spec->validated), plan_(plan) {}

  void Column(int id) {
    const calc::Node& n = g_.nodes[id];
    Begin(id);
    TypedExpr r = Dec(n.expr, n.level);
    std::string target = n.name;
    if (r.is_ref() && r.level == n.level && owned_.count(AttrKey(r.name, n.level))) {
      Rename(r.name, n.level, target);
    } else {
      Project(n.level, target, r);
    }
    auto& annotated = plan_.layout.annotated;
    if (std::find(annotated.begin(), annotated.end(), n.name) != annotated.end()) {
      std::optional<TypedExpr> any;
      for (const std::string& f : flags_) {
        TypedExpr ref = AttrRef(f, ScalarType::kLogical, n.level);
        if (!any) {
          any = ref;
          continue;
        }
        TypedExpr both;
        both.kind = Expr::Kind::kBinary;
        both.binary_op = formula::BinaryOp::kOr;
        both.type = ScalarType::kLogical;
        both.args = {*any, ref};
        any = both;
      }
      Project(n.level, calc::AnnotationName(n.name),
              any ? *any : TypedExpr::Literal(false, ScalarType::kLogical));
    }
  }

  void Filter(int id) {
    const calc::Node& n = g_.nodes[id];
    Begin(id);
    TypedExpr r = Dec(n.expr, n.level);
    if (ContainsWindow(r)) {
      std::string t = Temp();
      Project(n.level, t, r);
      r = AttrRef(t, ScalarType::kLogical, n.level);
    }
    Atom a;
    a.op.kind = Op::Kind::kSelect;
    a.op.level = n.level;
    a.op.predicate = r;
    a.op.filter = n.name;
    Push(std::move(a));
  }

  std::vector<Atom>& atoms() { return atoms_; }
  const std::map<std::string, int>& producers() const { return producer_; }

 private:
  void Begin(int id) {
    origin_ = id;
    temps_ = 0;
    flags_.clear();
    owned_.clear();
  }

  std::string Temp() {
    return g_.nodes[origin_].name + "#" + std::to_string(++temps_);
  }

  void Push(Atom a) {
    a.origin = origin_;
    a.seq = static_cast<int>(atoms_.size());
    for (const std::string& p : a.op.Produces()) producer_[p] = a.seq;
    atoms_.push_back(std::move(a));
  }

  void Note(const std::string& name, int level, ScalarType type) {
    plan_.attrs[name + "@" + std::to_string(level)] = {level, type};
  }

  void Project(int level, std::string name, TypedExpr expr) {
    Atom a;
    a.op.kind = Op::Kind::kProject;
    a.op.level = level;
    Note(name, level, expr.type);
    owned_.insert(AttrKey(name, level));
    a.op.items.push_back({std::move(name), std::move(expr)});
    Push(std::move(a));
  }

  // Gives the temp produced by this node's most recent atom its final name.
  void Rename(const std::string& from, int level, const std::string& to) {
    std::string key = AttrKey(from, level);
    Atom& a = atoms_.back();
    bool renamed = false;
    if (a.origin == origin_) {
      for (ProjectItem& p : a.op.items) {
        if (p.name == from) p.name = to, renamed = true;
      }
      for (JoinItem& j : a.op.joins) {
        if (j.name == from && j.kind == JoinItem::Kind::kAggregate) {
          j.name = to, renamed = true;
        }
      }
    }
    if (!renamed) {
      Project(level, to, AttrRef(from, plan_.attrs.at(key).type, level));
      return;
    }
    plan_.attrs[AttrKey(to, level)] = plan_.attrs.at(key);
    plan_.attrs.erase(key);
    producer_.erase(key);
    producer_[AttrKey(to, level)] = a.seq;
  }

  bool IsGroupingKey(const std::string& name, int level) const {
    const auto& keys = vs_.levels[level].grouping_keys;
    return std::find(keys.begin(), keys.end(), name) != keys.end();
  }

  // Cross-level value of `attr` (resident at `from`) at `to`.
  TypedExpr Bring(const std::string& attr, ScalarType type, int from, int to) {
    std::string name = attr + "@" + std::to_string(to);
    std::string key = AttrKey(name, to);
    JoinItem item;
    item.name = name;
    item.attr = attr;
    if (from > to) {
      item.kind = JoinItem::Kind::kRepeat;
    } else {
      item.kind = JoinItem::Kind::kAutoAgg;
      item.flag = calc::AnnotationName(name);
      flags_.push_back(item.flag);
    }
    if (!producer_.count(key)) {
      Atom a;
      a.op.kind = Op::Kind::kJoin;
      a.op.source = from;
      a.op.level = to;
      Note(name, to, type);
      if (item.kind == JoinItem::Kind::kAutoAgg) Note(item.flag, to, ScalarType::kLogical);
      a.op.joins.push_back(std::move(item));
      Push(std::move(a));
    }
    return AttrRef(name, type, to);
  }

  TypedExpr Dec(const TypedExpr& e, int level) {
    if (e.is_error()) return TypedExpr::ErrorLiteral();
    if (e.kind == Expr::Kind::kLiteral) return e;
    if (e.is_ref()) {
      if (e.ref_kind == formula::RefKind::kInput) {
        plan_.inputs.insert(e.name);
        if (level == 0) return AttrRef(e.name, e.type, 0);
        return Bring(e.name, e.type, 0, level);
      }
      if (e.level == level) return AttrRef(e.name, e.type, level);
      if (e.level < level && IsGroupingKey(e.name, level)) {
        return AttrRef(e.name, e.type, level);
      }
      return Bring(e.name, e.type, e.level, level);
    }
    if (e.is_call(FunctionClass::kAggregate)) return Aggregate(e, level);
    TypedExpr out = e;
    for (TypedExpr& a : out.args) a = Dec(a, level);
    return out;
  }

  TypedExpr Aggregate(const TypedExpr& e, int level) {
    const std::string& fn = e.name;
    int source = e.args.empty() ? 0 : calc::SourceLevel(e.args[0]);
    if (source >= level) {
      if (e.args.empty()) return Num(1);
      TypedExpr arg = Dec(e.args[0], level);
      TypedExpr is_null = Call("IsNull", {arg}, ScalarType::kLogical);
      if (fn == "Count" || fn == "CountDistinct") return If(is_null, Num(0), Num(1));
      if (fn == "CountIf") return If(arg, Num(1), Num(0));
      return arg;
    }
    TypedExpr call = e;
    if (!e.args.empty()) {
      TypedExpr arg = Dec(e.args[0], source);
      if (!(arg.is_ref() && arg.level == source)) {
        std::string t = Temp();
        Project(source, t, arg);
        arg = AttrRef(t, arg.type, source);
      }
      call.args = {arg};
    }
    std::string name = Temp();
    JoinItem item;
    item.kind = JoinItem::Kind::kAggregate;
    item.name = name;
    item.expr = call;
    Atom a;
    a.op.kind = Op::Kind::kJoin;
    a.op.source = source;
    a.op.level = level;
    a.op.joins.push_back(std::move(item));
    Note(name, level, e.type);
    owned_.insert(AttrKey(name, level));
    Push(std::move(a));
    return AttrRef(name, e.type, level);
  }

  const calc::CalcGraph& g_;
  const spec::ValidatedSpec& vs_;
  Plan& plan_;
  std::vector<Atom> atoms_;
  std::map<std::string, int> producer_;
  int origin_ = 0;
  int temps_ = 0;
  std::vector<std::string> flags_;
  std::set<std::string> owned_;
};

}  // namespace

namespace {

std::pair<std::string, int> SplitKey(const std::string& key) {
  auto at = key.rfind('@');
  return {key.substr(0, at), std::stoi(key.substr(at + 1))};
}

bool OpContainsWindow(const Op& op) {
  return std::any_of(op.items.begin(), op.items.end(),
                     [](const ProjectItem& p) { return ContainsWindow(p.expr); }) ||
         ContainsWindow(op.predicate);
}

// The key attribute an op at `level` may read without producing it: a
// grouping key is produced at its resident level.
std::optional<std::string> KeySource(const spec::ValidatedSpec& vs,
                                     const std::string& name, int level) {
  const auto& keys = vs.levels[level].grouping_keys;
  if (std::find(keys.begin(), keys.end(), name) == keys.end()) return std::nullopt;
  return AttrKey(name, vs.LevelOf(name));
}

}  // namespace

Plan OrderOperations(std::shared_ptr<const calc::CalcGraph> graph,
                     const OrderOptions& options) {
  Plan plan;
  plan.graph = graph;
  const spec::ValidatedSpec& vs = graph->spec->validated;
  plan.totals = vs.totals();
  plan.layout = calc::ComputeLayout(*graph);
  Builder builder(*graph, plan);
  for (size_t id = 0; id < graph->nodes.size(); ++id) {
    const calc::Node& n = graph->nodes[id];
    if (!n.live) continue;
    if (n.kind == calc::Node::Kind::kColumn) {
      builder.Column(static_cast<int>(id));
    } else {
      builder.Filter(static_cast<int>(id));
    }
  }
  std::vector<Atom>& atoms = builder.atoms();
  const auto& producers = builder.producers();
  auto need = [&](Atom& a, const std::string& key) {
    auto it = producers.find(key);
    if (it != producers.end()) {
      if (it->second != a.seq) a.deps.insert(it->second);
      return;
    }
    auto [name, level] = SplitKey(key);
    if (level == 0 && plan.inputs.count(name)) return;
    if (auto src = KeySource(vs, name, level)) {
      auto k = producers.find(*src);
      if (k == producers.end()) throw InternalError("key " + *src + " is never produced");
      a.deps.insert(k->second);
      return;
    }
    throw InternalError("attribute " + key + " is never produced");
  };
  auto need_level = [&](Atom& a, int level) {
    for (int j = 1; j <= level; ++j) {
      for (const std::string& k : vs.levels[j].grouping_keys) {
        need(a, AttrKey(k, vs.LevelOf(k)));
      }
    }
  };
  for (Atom& a : atoms) {
    for (const std::string& key : a.op.Reads()) need(a, key);
    int top = a.op.kind == Op::Kind::kJoin ? std::max(a.op.source, a.op.level) : a.op.level;
    need_level(a, top);
    if (OpContainsWindow(a.op)) {
      int l = a.op.level;
      need_level(a, std::min(l + 1, plan.totals));
      for (const spec::OrderItem& item : vs.levels[l].ordering) {
        int r = vs.LevelOf(item.column);
        need(a, AttrKey(item.column, r == l ? l : r));
      }
    }
  }

  const int n = static_cast<int>(atoms.size());
  std::vector<int> pending(n, 0);
  std::vector<std::vector<int>> users(n);
  for (const Atom& a : atoms) {
    pending[a.seq] = static_cast<int>(a.deps.size());
    for (int d : a.deps) users[d].push_back(a.seq);
  }
  using Key = std::tuple<int, int, int, int>;
  auto key_of = [&](int i) {
    const Atom& a = atoms[i];
    return Key{a.op.kind == Op::Kind::kSelect ? 0 : 1, a.op.level, a.origin, a.seq};
  };
  std::set<Key> ready;
  for (int i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.insert(key_of(i));
  }
  std::set<int> last_members;
  while (!ready.empty()) {
    int i = std::get<3>(*ready.begin());
    ready.erase(ready.begin());
    const Atom& a = atoms[i];
    bool fused = false;
    if (options.fuse && !plan.ops.empty() && a.op.kind != Op::Kind::kSelect) {
      Op& last = plan.ops.back();
      bool compatible = last.kind == a.op.kind && last.level == a.op.level &&
                        (a.op.kind != Op::Kind::kJoin || last.source == a.op.source);
      bool independent = std::none_of(a.deps.begin(), a.deps.end(),
                                      [&](int d) { return last_members.count(d); });
      if (compatible && independent) {
        last.items.insert(last.items.end(), a.op.items.begin(), a.op.items.end());
        last.joins.insert(last.joins.end(), a.op.joins.begin(), a.op.joins.end());
        last_members.insert(i);
        fused = true;
      }
    }
    if (!fused) {
      plan.ops.push_back(a.op);
      last_members = {i};
    }
    for (int u : users[i]) {
      if (--pending[u] == 0) ready.insert(key_of(u));
    }
  }
  if (static_cast<int>(last_members.size()) > n) throw InternalError("bad ordering");
  size_t emitted = 0;
  for (const Op& op : plan.ops) {
    emitted += op.items.size() + op.joins.size() + (op.kind == Op::Kind::kSelect ? 1 : 0);
  }
  if (emitted != atoms.size()) {
    throw InternalError("walg ordering left operations with unsatisfiable dependencies");
  }
  CheckPlan(plan);
  return plan;
}

void CheckPlan(const Plan& plan) {
  const spec::ValidatedSpec& vs = plan.spec();
  std::set<std::string> produced;
  for (size_t i = 0; i < plan.ops.size(); ++i) {
    const Op& op = plan.ops[i];
    for (const std::string& key : op.Reads()) {
      if (produced.count(key)) continue;
      auto [name, level] = SplitKey(key);
      if (level == 0 && plan.inputs.count(name)) continue;
      auto src = KeySource(vs, name, level);
      if (src && produced.count(*src)) continue;
      throw InternalError("walg op " + std::to_string(i + 1) + " reads " + key +
                          " before it is produced");
    }
    for (const std::string& p : op.Produces()) {
      if (!produced.insert(p).second) {
        throw InternalError("walg attribute " + p + " produced twice");
      }
    }
  }
}

Plan OptimizeWalg(const Plan& input, const OptimizeOptions& options) {
  Plan plan = input;
  std::vector<Op>& ops = plan.ops;
  auto same_pair = [](const Op& a, const Op& b) {
    return a.kind == Op::Kind::kJoin && b.kind == Op::Kind::kJoin &&
           a.source == b.source && a.level == b.level;
  };
  if (options.join_merge) {
    for (size_t i = 0; i < ops.size(); ++i) {
      if (ops[i].kind != Op::Kind::kJoin) continue;
      size_t insert_at = i + 1;
      for (size_t j = i + 1; j < ops.size(); ++j) {
        if (ops[j].kind == Op::Kind::kSelect) break;
        if (!same_pair(ops[i], ops[j]) || j == insert_at) {
          if (j == insert_at && same_pair(ops[i], ops[j])) ++insert_at;
          continue;
        }
        std::set<std::string> between;
        for (size_t k = insert_at; k < j; ++k) {
          for (const std::string& p : ops[k].Produces()) between.insert(p);
        }
        std::set<std::string> reads = ops[j].Reads();
        bool independent = std::none_of(reads.begin(), reads.end(), [&](const std::string& r) {
          return between.count(r);
        });
        if (!independent) continue;
        Op moved = std::move(ops[j]);
        ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(j));
        ops.insert(ops.begin() + static_cast<std::ptrdiff_t>(insert_at), std::move(moved));
        ++insert_at;
      }
    }
    std::vector<Op> merged;
    for (Op& op : ops) {
      if (!merged.empty() && same_pair(merged.back(), op)) {
        Op& last = merged.back();
        last.joins.insert(last.joins.end(), op.joins.begin(), op.joins.end());
      } else {
        merged.push_back(std::move(op));
      }
    }
    ops = std::move(merged);
  }
  if (options.semijoin_elision) {
    for (size_t i = 0; i + 1 < ops.size(); ++i) {
      const Op& sel = ops[i];
      Op& next = ops[i + 1];
      if (sel.kind == Op::Kind::kSelect && next.is_aggregate_join() &&
          next.source == sel.level && next.level != plan.totals) {
        next.elidable = true;
      }
    }
  }
  CheckPlan(plan);
  return plan;
}

std::string ExplainWalg(const Plan& plan) {
  std::ostringstream out;
  for (size_t i = 0; i < plan.ops.size(); ++i) {
    const Op& op = plan.ops[i];
    out << (i + 1) << ": ";
    std::vector<std::string> parts;
    switch (op.kind) {
      case Op::Kind::kProject:
        out << "Project L" << op.level;
        for (const ProjectItem& p : op.items) {
          parts.push_back(p.name + " := " + formula::PrintTyped(p.expr));
        }
        break;
      case Op::Kind::kJoin:
        out << "Join L" << op.source << "→L" << op.level;
        for (const JoinItem& j : op.joins) {
          switch (j.kind) {
            case JoinItem::Kind::kAggregate:
              parts.push_back(j.name + " := " + formula::PrintTyped(j.expr));
              break;
            case JoinItem::Kind::kAutoAgg:
              parts.push_back(j.name + " := AutoAgg([" + j.attr + "])");
              break;
            case JoinItem::Kind::kRepeat:
              parts.push_back(j.name + " := [" + j.attr + "]");
              break;
          }
        }
        break;
      case Op::Kind::kSelect:
        out << "Select L" << op.level << " " << op.filter;
        parts.push_back(formula::PrintTyped(op.predicate));
        break;
    }
    out << " {";
    for (size_t k = 0; k < parts.size(); ++k) out << (k ? ", " : "") << parts[k];
    out << "}";
    if (op.elidable) out << " elidable";
    out << "\n";
  }
  return out.str();
}

}  // namespace sheetc::walg
