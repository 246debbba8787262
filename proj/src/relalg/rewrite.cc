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
#include <functional>
#include <map>
#include <set>

#include "sheetc/common/errors.h"
#include "sheetc/relalg/relalg.h"

namespace sheetc::relalg {

using formula::Expr;
using formula::TypedExpr;
using JT = RelNode::JoinType;

namespace {

using Memo = std::map<const RelNode*, Rel>;

Rel WithInputs(const Rel& rel, std::vector<Rel> inputs) {
  if (inputs == rel->inputs) return rel;
  auto n = std::make_shared<RelNode>(*rel);
  n->inputs = std::move(inputs);
  return n;
}

// Post-order rebuild that keeps shared subtrees shared.
// With `uses`, rebuilt nodes inherit the parent count of the node they
// replace.
Rel Transform(const Rel& rel, Memo& memo, const std::function<Rel(const Rel&)>& fn,
              std::map<const RelNode*, int>* uses = nullptr) {
  auto it = memo.find(rel.get());
  if (it != memo.end()) return it->second;
  std::vector<Rel> inputs;
  for (const Rel& in : rel->inputs) inputs.push_back(Transform(in, memo, fn, uses));
  Rel rebuilt = WithInputs(rel, std::move(inputs));
  if (uses && rebuilt != rel) (*uses)[rebuilt.get()] = (*uses)[rel.get()];
  Rel out = fn(rebuilt);
  if (uses && out != rebuilt && !uses->count(out.get())) (*uses)[out.get()] = (*uses)[rel.get()];
  memo[rel.get()] = out;
  return out;
}

void CountParents(const Rel& rel, std::map<const RelNode*, int>& uses) {
  if (uses[rel.get()]++ > 0) return;
  for (const Rel& in : rel->inputs) CountParents(in, uses);
}

void CollectRefs(const TypedExpr& e, std::map<std::string, int>& refs) {
  if (e.kind == Expr::Kind::kColumnRef && !e.is_error()) ++refs[e.name];
  for (const TypedExpr& a : e.args) CollectRefs(a, refs);
}

void CollectRefs(const TypedExpr& e, std::set<std::string>& refs) {
  if (e.kind == Expr::Kind::kColumnRef && !e.is_error()) refs.insert(e.name);
  for (const TypedExpr& a : e.args) CollectRefs(a, refs);
}

TypedExpr Substitute(const TypedExpr& e, const std::map<std::string, const TypedExpr*>& defs) {
  if (e.kind == Expr::Kind::kColumnRef && !e.is_error()) {
    auto it = defs.find(e.name);
    if (it != defs.end()) return *it->second;
  }
  TypedExpr out = e;
  for (TypedExpr& a : out.args) a = Substitute(a, defs);
  return out;
}

bool IsTrivial(const TypedExpr& e) {
  return e.kind == Expr::Kind::kColumnRef || e.kind == Expr::Kind::kLiteral;
}

bool IsTrueLiteral(const TypedExpr& e) {
  return e.kind == Expr::Kind::kLiteral && std::holds_alternative<bool>(e.literal) &&
         std::get<bool>(e.literal);
}

Rel MergeSelects(const Rel& root) {
  Memo memo;
  std::map<const RelNode*, int> uses;
  CountParents(root, uses);
  return Transform(root, memo, [&](const Rel& n) -> Rel {
    if (n->kind != RelNode::Kind::kSelect) return n;
    const Rel& child = n->inputs[0];
    if (child->kind != RelNode::Kind::kSelect || uses[child.get()] > 1) return n;
    TypedExpr both;
    both.kind = Expr::Kind::kBinary;
    both.binary_op = formula::BinaryOp::kAnd;
    both.type = ScalarType::kLogical;
    both.args = {child->predicate, n->predicate};
    return Select(child->inputs[0], both);
  }, &uses);
}

Rel MergeProjects(const Rel& root) {
  Memo memo;
  std::map<const RelNode*, int> uses;
  CountParents(root, uses);
  return Transform(root, memo, [&](const Rel& n) -> Rel {
    if (n->kind != RelNode::Kind::kProject) return n;
    const Rel& child = n->inputs[0];
    if (child->kind != RelNode::Kind::kProject) return n;
    if (uses[child.get()] > 1) return n;
    std::map<std::string, int> refs;
    for (const NamedExpr& item : n->items) CollectRefs(item.expr, refs);
    std::map<std::string, const TypedExpr*> defs;
    for (const NamedExpr& item : child->items) {
      if (!IsTrivial(item.expr) && refs[item.name] > 1) return n;
      defs[item.name] = &item.expr;
    }
    std::vector<NamedExpr> items;
    for (const NamedExpr& item : n->items) items.push_back({item.name, Substitute(item.expr, defs)});
    return Project(child->inputs[0], std::move(items));
  }, &uses);
}

bool IsIdentity(const RelNode& n) {
  const RelNode& in = *n.inputs[0];
  if (n.items.size() != in.schema.size()) return false;
  for (size_t i = 0; i < n.items.size(); ++i) {
    const NamedExpr& item = n.items[i];
    if (!item.expr.is_ref() || item.expr.name != item.name || in.schema[i].name != item.name) {
      return false;
    }
  }
  return true;
}

Rel RemoveNoops(const Rel& root) {
  Memo memo;
  return Transform(root, memo, [&](const Rel& n) -> Rel {
    switch (n->kind) {
      case RelNode::Kind::kProject:
        return IsIdentity(*n) ? n->inputs[0] : n;
      case RelNode::Kind::kSelect:
        return IsTrueLiteral(n->predicate) ? n->inputs[0] : n;
      case RelNode::Kind::kSort:
        return n->sort.empty() ? n->inputs[0] : n;
      case RelNode::Kind::kLimit:
        return n->limit < 0 && n->offset == 0 ? n->inputs[0] : n;
      default:
        return n;
    }
  });
}

bool Prunable(const RelNode& n) {
  return n.kind == RelNode::Kind::kJoin && n.join_type == JT::kLeft &&
         (n.annotated || n.origin == JoinOrigin::kLink);
}

class Pruner {
 public:
  Pruner(bool attrs, bool joins) : attrs_(attrs), joins_(joins) {}

  Rel Run(const Rel& root) {
    std::set<const RelNode*> seen;
    Order(root, seen);
    for (const auto& a : root->schema) req_[root.get()].insert(a.name);
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) Propagate(**it);
    return Build(root);
  }

 private:
  void Order(const Rel& r, std::set<const RelNode*>& seen) {
    if (!seen.insert(r.get()).second) return;
    for (const Rel& in : r->inputs) Order(in, seen);
    order_.push_back(r);
  }

  std::set<std::string> Required(const RelNode& n) const {
    if (!attrs_) {
      std::set<std::string> all;
      for (const auto& a : n.schema) all.insert(a.name);
      return all;
    }
    auto it = req_.find(&n);
    return it == req_.end() ? std::set<std::string>{} : it->second;
  }

  void Need(const Rel& child, const std::string& attr) { req_[child.get()].insert(attr); }

  void Propagate(const RelNode& n) {
    std::set<std::string> r = Required(n);
    switch (n.kind) {
      case RelNode::Kind::kScan:
      case RelNode::Kind::kValues:
        break;
      case RelNode::Kind::kProject:
        for (const NamedExpr& item : n.items) {
          if (!r.count(item.name)) continue;
          std::set<std::string> refs;
          CollectRefs(item.expr, refs);
          for (const auto& a : refs) Need(n.inputs[0], a);
        }
        break;
      case RelNode::Kind::kSelect: {
        std::set<std::string> refs;
        CollectRefs(n.predicate, refs);
        for (const auto& a : r) Need(n.inputs[0], a);
        for (const auto& a : refs) Need(n.inputs[0], a);
        break;
      }
      case RelNode::Kind::kJoin: {
        const Rel& left = n.inputs[0];
        const Rel& right = n.inputs[1];
        bool uses_right = false;
        for (const auto& a : r) {
          if (!left->Has(a)) uses_right = true;
        }
        if (joins_ && Prunable(n) && !uses_right) {
          dead_.insert(&n);
          for (const auto& a : r) Need(left, a);
          break;
        }
        for (const auto& a : r) {
          if (left->Has(a)) {
            Need(left, a);
          } else {
            Need(right, a);
          }
        }
        for (const JoinCond& c : n.on) {
          Need(left, c.left);
          Need(right, c.right);
        }
        break;
      }
      case RelNode::Kind::kAggregate:
        for (const auto& g : n.group_by) Need(n.inputs[0], g);
        for (const AggItem& a : n.aggs) {
          if (!r.count(a.name) || !a.arg) continue;
          std::set<std::string> refs;
          CollectRefs(*a.arg, refs);
          for (const auto& x : refs) Need(n.inputs[0], x);
        }
        break;
      case RelNode::Kind::kWindow: {
        const Rel& in = n.inputs[0];
        for (const auto& a : r) {
          if (in->Has(a)) Need(in, a);
        }
        for (const WindowItem& w : n.windows) {
          if (!r.count(w.name)) continue;
          std::set<std::string> refs;
          for (const TypedExpr& a : w.args) CollectRefs(a, refs);
          for (const auto& p : w.partition) refs.insert(p);
          for (const auto& k : w.order) refs.insert(k.attr);
          for (const auto& x : refs) {
            if (in->Has(x)) Need(in, x);
          }
        }
        break;
      }
      case RelNode::Kind::kSort:
        for (const auto& a : r) Need(n.inputs[0], a);
        for (const auto& k : n.sort) Need(n.inputs[0], k.attr);
        break;
      case RelNode::Kind::kLimit:
        for (const auto& a : r) Need(n.inputs[0], a);
        break;
    }
  }

  Rel Build(const Rel& n) {
    auto it = memo_.find(n.get());
    if (it != memo_.end()) return it->second;
    Rel out = BuildNode(n);
    memo_[n.get()] = out;
    return out;
  }

  Rel BuildNode(const Rel& n) {
    std::set<std::string> r = Required(*n);
    switch (n->kind) {
      case RelNode::Kind::kScan: {
        std::vector<spec::Attribute> schema;
        std::vector<std::string> cols;
        for (size_t i = 0; i < n->schema.size(); ++i) {
          if (!r.count(n->schema[i].name)) continue;
          schema.push_back(n->schema[i]);
          cols.push_back(n->source_columns[i]);
        }
        return n->scan_sql ? ScanSql(n->source, schema, cols) : Scan(n->source, schema, cols);
      }
      case RelNode::Kind::kValues:
        return n;
      case RelNode::Kind::kProject: {
        std::vector<NamedExpr> items;
        for (const NamedExpr& item : n->items) {
          if (r.count(item.name)) items.push_back(item);
        }
        return Project(Build(n->inputs[0]), std::move(items));
      }
      case RelNode::Kind::kSelect:
        return Select(Build(n->inputs[0]), n->predicate);
      case RelNode::Kind::kJoin:
        if (dead_.count(n.get())) return Build(n->inputs[0]);
        return Join(n->join_type, Build(n->inputs[0]), Build(n->inputs[1]), n->on, n->origin,
                    n->merge_keys, n->annotated);
      case RelNode::Kind::kAggregate: {
        std::vector<AggItem> aggs;
        for (const AggItem& a : n->aggs) {
          if (r.count(a.name)) aggs.push_back(a);
        }
        return Aggregate(Build(n->inputs[0]), n->group_by, std::move(aggs));
      }
      case RelNode::Kind::kWindow: {
        std::vector<WindowItem> windows;
        for (const WindowItem& w : n->windows) {
          if (r.count(w.name)) windows.push_back(w);
        }
        Rel in = Build(n->inputs[0]);
        return windows.empty() ? in : Window(in, std::move(windows));
      }
      case RelNode::Kind::kSort:
        return Sort(Build(n->inputs[0]), n->sort);
      case RelNode::Kind::kLimit:
        return Limit(Build(n->inputs[0]), n->limit, n->offset);
    }
    throw InternalError("unknown node kind");
  }

  bool attrs_, joins_;
  std::vector<Rel> order_;
  std::map<const RelNode*, std::set<std::string>> req_;
  std::set<const RelNode*> dead_;
  Memo memo_;
};

Rel PushLimit(const Rel& limit) {
  const Rel& sort = limit->inputs[0];
  if (sort->kind != RelNode::Kind::kSort) return limit;
  const Rel& join = sort->inputs[0];
  if (!SortLimitPushdownApplies(*join, sort->sort)) return limit;
  Rel inner = PushLimit(Limit(Sort(join->inputs[0], sort->sort), limit->limit, limit->offset));
  return Sort(WithInputs(join, {inner, join->inputs[1]}), sort->sort);
}

Rel PushdownSortLimit(const Rel& root) {
  Memo memo;
  return Transform(root, memo, [](const Rel& n) -> Rel {
    if (n->kind != RelNode::Kind::kLimit) return n;
    return PushLimit(n);
  });
}

}  // namespace

bool SortLimitPushdownApplies(const RelNode& join, const std::vector<OrderKey>& keys) {
  if (join.kind != RelNode::Kind::kJoin || join.join_type != JT::kLeft || !join.annotated) {
    return false;
  }
  const RelNode& left = *join.inputs[0];
  return std::all_of(keys.begin(), keys.end(),
                     [&](const OrderKey& k) { return left.Has(k.attr); });
}

RelPlan Rewrite(const RelPlan& plan, const RewriteOptions& options) {
  Rel root = plan.root;
  if (options.merge_selects) root = MergeSelects(root);
  if (options.attribute_pruning || options.join_pruning) {
    root = Pruner(options.attribute_pruning, options.join_pruning).Run(root);
  }
  if (options.merge_projects) root = MergeProjects(root);
  if (options.noop_removal) root = RemoveNoops(root);
  if (options.sort_limit_pushdown) root = PushdownSortLimit(root);
  RelPlan out{root, plan.output};
  CheckRel(out);
  return out;
}

}  // namespace sheetc::relalg
