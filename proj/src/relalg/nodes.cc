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

#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "sheetc/common/errors.h"
#include "sheetc/relalg/relalg.h"

namespace sheetc::relalg {

using formula::Expr;
using formula::TypedExpr;

const spec::Attribute* RelNode::Find(const std::string& attr) const {
  for (const spec::Attribute& a : schema) {
    if (a.name == attr) return &a;
  }
  return nullptr;
}

namespace {

ScalarType Visible(ScalarType t) { return t == ScalarType::kError ? ScalarType::kText : t; }

void CheckRefs(const TypedExpr& e, const RelNode& input, const char* where) {
  if (e.kind == Expr::Kind::kColumnRef && !e.is_error() && !input.Has(e.name)) {
    throw InternalError(std::string(where) + " references missing attribute " + e.name);
  }
  for (const TypedExpr& a : e.args) CheckRefs(a, input, where);
}

void CheckUnique(const std::vector<spec::Attribute>& schema) {
  std::set<std::string> seen;
  for (const auto& a : schema) {
    if (!seen.insert(a.name).second) throw InternalError("duplicate attribute " + a.name);
  }
}

std::shared_ptr<RelNode> Make(RelNode::Kind kind, std::vector<Rel> inputs) {
  auto n = std::make_shared<RelNode>();
  n->kind = kind;
  n->inputs = std::move(inputs);
  return n;
}

const spec::Attribute& Need(const RelNode& rel, const std::string& attr, const char* where) {
  const spec::Attribute* a = rel.Find(attr);
  if (!a) throw InternalError(std::string(where) + " references missing attribute " + attr);
  return *a;
}

}  // namespace

Rel Scan(std::string table, std::vector<spec::Attribute> schema,
         std::vector<std::string> source_columns) {
  auto n = Make(RelNode::Kind::kScan, {});
  n->source = std::move(table);
  n->schema = std::move(schema);
  n->source_columns = std::move(source_columns);
  CheckUnique(n->schema);
  return n;
}

Rel ScanSql(std::string sql, std::vector<spec::Attribute> schema,
            std::vector<std::string> source_columns) {
  auto n = Make(RelNode::Kind::kScan, {});
  n->scan_sql = true;
  n->source = std::move(sql);
  n->schema = std::move(schema);
  n->source_columns = std::move(source_columns);
  CheckUnique(n->schema);
  return n;
}

Rel Values() { return Make(RelNode::Kind::kValues, {}); }

Rel Project(Rel input, std::vector<NamedExpr> items) {
  auto n = Make(RelNode::Kind::kProject, {input});
  for (const NamedExpr& item : items) {
    CheckRefs(item.expr, *input, "Project");
    n->schema.push_back({item.name, Visible(item.expr.type)});
  }
  n->items = std::move(items);
  CheckUnique(n->schema);
  return n;
}

TypedExpr Ref(const spec::Attribute& attr) {
  return TypedExpr::ColumnRef(attr.name, attr.type, 0);
}

TypedExpr Ref(const Rel& rel, const std::string& attr) {
  return Ref(Need(*rel, attr, "Ref"));
}

Rel Extend(Rel input, std::vector<NamedExpr> items) {
  std::vector<NamedExpr> all;
  for (const spec::Attribute& a : input->schema) all.push_back({a.name, Ref(a)});
  for (NamedExpr& item : items) all.push_back(std::move(item));
  return Project(std::move(input), std::move(all));
}

Rel Keep(Rel input, const std::vector<std::string>& attrs) {
  std::vector<NamedExpr> items;
  for (const std::string& a : attrs) items.push_back({a, Ref(input, a)});
  return Project(std::move(input), std::move(items));
}

Rel Select(Rel input, TypedExpr predicate) {
  CheckRefs(predicate, *input, "Select");
  auto n = Make(RelNode::Kind::kSelect, {input});
  n->schema = input->schema;
  n->predicate = std::move(predicate);
  return n;
}

Rel Join(RelNode::JoinType type, Rel left, Rel right, std::vector<JoinCond> on,
         JoinOrigin origin, bool merge_keys, bool annotated) {
  auto n = Make(RelNode::Kind::kJoin, {left, right});
  std::set<std::string> dropped;
  for (const JoinCond& c : on) {
    const auto& l = Need(*left, c.left, "Join");
    const auto& r = Need(*right, c.right, "Join");
    if (l.type != r.type) throw InternalError("join condition on different types: " + c.left);
    if (merge_keys) dropped.insert(c.right);
  }
  n->schema = left->schema;
  if (type != RelNode::JoinType::kSemi) {
    for (const auto& a : right->schema) {
      if (!dropped.count(a.name)) n->schema.push_back(a);
    }
  }
  CheckUnique(n->schema);
  n->join_type = type;
  n->on = std::move(on);
  n->origin = origin;
  n->merge_keys = merge_keys;
  n->annotated = annotated;
  return n;
}

Rel Aggregate(Rel input, std::vector<std::string> group_by, std::vector<AggItem> aggs) {
  auto n = Make(RelNode::Kind::kAggregate, {input});
  for (const std::string& g : group_by) n->schema.push_back(Need(*input, g, "Aggregate"));
  for (const AggItem& a : aggs) {
    if (a.arg) CheckRefs(*a.arg, *input, "Aggregate");
    n->schema.push_back({a.name, a.type});
  }
  CheckUnique(n->schema);
  n->group_by = std::move(group_by);
  n->aggs = std::move(aggs);
  return n;
}

Rel Window(Rel input, std::vector<WindowItem> windows) {
  auto n = Make(RelNode::Kind::kWindow, {input});
  n->schema = input->schema;
  for (const WindowItem& w : windows) {
    for (const TypedExpr& a : w.args) CheckRefs(a, *input, "Window");
    for (const std::string& p : w.partition) Need(*input, p, "Window");
    for (const OrderKey& k : w.order) Need(*input, k.attr, "Window");
    n->schema.push_back({w.name, Visible(w.type)});
  }
  CheckUnique(n->schema);
  n->windows = std::move(windows);
  return n;
}

Rel Sort(Rel input, std::vector<OrderKey> keys) {
  for (const OrderKey& k : keys) Need(*input, k.attr, "Sort");
  auto n = Make(RelNode::Kind::kSort, {input});
  n->schema = input->schema;
  n->sort = std::move(keys);
  return n;
}

Rel Limit(Rel input, int64_t limit, int64_t offset) {
  auto n = Make(RelNode::Kind::kLimit, {input});
  n->schema = input->schema;
  n->limit = limit;
  n->offset = offset;
  return n;
}

namespace {

void Visit(const Rel& rel, std::set<const RelNode*>& seen, const std::function<void(const RelNode&)>& fn) {
  if (!seen.insert(rel.get()).second) return;
  for (const Rel& in : rel->inputs) Visit(in, seen, fn);
  fn(*rel);
}

void CheckNode(const RelNode& n) {
  CheckUnique(n.schema);
  switch (n.kind) {
    case RelNode::Kind::kProject:
      for (const NamedExpr& item : n.items) CheckRefs(item.expr, *n.inputs[0], "Project");
      break;
    case RelNode::Kind::kSelect:
      CheckRefs(n.predicate, *n.inputs[0], "Select");
      break;
    case RelNode::Kind::kJoin:
      for (const JoinCond& c : n.on) {
        Need(*n.inputs[0], c.left, "Join");
        Need(*n.inputs[1], c.right, "Join");
      }
      break;
    case RelNode::Kind::kAggregate:
      for (const std::string& g : n.group_by) Need(*n.inputs[0], g, "Aggregate");
      for (const AggItem& a : n.aggs) {
        if (a.arg) CheckRefs(*a.arg, *n.inputs[0], "Aggregate");
      }
      break;
    case RelNode::Kind::kWindow:
      for (const WindowItem& w : n.windows) {
        for (const TypedExpr& a : w.args) CheckRefs(a, *n.inputs[0], "Window");
      }
      break;
    case RelNode::Kind::kSort:
      for (const OrderKey& k : n.sort) Need(*n.inputs[0], k.attr, "Sort");
      break;
    default:
      break;
  }
}

}  // namespace

void CheckRel(const RelPlan& plan) {
  if (!plan.root) throw InternalError("plan has no root");
  std::set<const RelNode*> seen;
  Visit(plan.root, seen, CheckNode);
  for (const spec::Attribute& a : plan.output.columns) {
    if (!plan.root->Has(a.name)) throw InternalError("root does not produce " + a.name);
  }
  if (plan.root->schema.size() != plan.output.columns.size()) {
    throw InternalError("root schema does not match the output schema");
  }
}

int OperatorCount(const RelPlan& plan) {
  std::set<const RelNode*> seen;
  int count = 0;
  Visit(plan.root, seen, [&](const RelNode&) { ++count; });
  return count;
}

int AggregateJoinCount(const RelPlan& plan) {
  std::set<const RelNode*> seen;
  int count = 0;
  Visit(plan.root, seen, [&](const RelNode& n) {
    if (n.kind == RelNode::Kind::kJoin && n.origin == JoinOrigin::kAggregate) ++count;
  });
  return count;
}

namespace {

const char* JoinTypeText(RelNode::JoinType t) {
  switch (t) {
    case RelNode::JoinType::kInner:
      return "inner";
    case RelNode::JoinType::kLeft:
      return "left";
    case RelNode::JoinType::kRight:
      return "right";
    case RelNode::JoinType::kFull:
      return "full";
    case RelNode::JoinType::kSemi:
      return "semi";
  }
  return "?";
}

const char* OriginText(JoinOrigin o) {
  switch (o) {
    case JoinOrigin::kSource:
      return "source";
    case JoinOrigin::kLink:
      return "link";
    case JoinOrigin::kAggregate:
      return "aggregate";
    case JoinOrigin::kRepeat:
      return "repeat";
    case JoinOrigin::kAncestor:
      return "ancestor";
  }
  return "?";
}

std::string Names(const std::vector<spec::Attribute>& schema) {
  std::string s;
  for (const auto& a : schema) s += (s.empty() ? "" : ", ") + a.name;
  return s;
}

std::string OrderText(const std::vector<OrderKey>& keys) {
  std::string s;
  for (const auto& k : keys) s += (s.empty() ? "" : ", ") + k.attr + (k.descending ? " desc" : "");
  return s;
}

std::string Describe(const RelNode& n) {
  std::ostringstream out;
  switch (n.kind) {
    case RelNode::Kind::kScan:
      out << (n.scan_sql ? "ScanSql" : "Scan " + n.source) << " [" << Names(n.schema) << "]";
      break;
    case RelNode::Kind::kValues:
      out << "Values";
      break;
    case RelNode::Kind::kProject: {
      out << "Project {";
      bool first = true;
      for (const NamedExpr& item : n.items) {
        if (!first) out << ", ";
        first = false;
        std::string e = formula::PrintTyped(item.expr);
        if (item.expr.is_ref() && item.expr.name == item.name) {
          out << item.name;
        } else {
          out << item.name << " := " << e;
        }
      }
      out << "}";
      break;
    }
    case RelNode::Kind::kSelect:
      out << "Select " << formula::PrintTyped(n.predicate);
      break;
    case RelNode::Kind::kJoin: {
      out << "Join " << JoinTypeText(n.join_type) << " " << OriginText(n.origin);
      if (n.annotated) out << " annotated";
      out << " on [";
      for (size_t i = 0; i < n.on.size(); ++i) {
        if (i) out << ", ";
        out << n.on[i].left << (n.on[i].null_safe ? " <=> " : " = ") << n.on[i].right;
      }
      out << "]";
      break;
    }
    case RelNode::Kind::kAggregate: {
      out << "Aggregate by [";
      for (size_t i = 0; i < n.group_by.size(); ++i) out << (i ? ", " : "") << n.group_by[i];
      out << "] {";
      for (size_t i = 0; i < n.aggs.size(); ++i) {
        const AggItem& a = n.aggs[i];
        out << (i ? ", " : "") << a.name << " := " << a.fn << "("
            << (a.arg ? formula::PrintTyped(*a.arg) : "") << ")";
      }
      out << "}";
      break;
    }
    case RelNode::Kind::kWindow: {
      out << "Window {";
      for (size_t i = 0; i < n.windows.size(); ++i) {
        const WindowItem& w = n.windows[i];
        out << (i ? ", " : "") << w.name << " := " << w.fn << "(";
        for (size_t j = 0; j < w.args.size(); ++j) out << (j ? ", " : "") << formula::PrintTyped(w.args[j]);
        out << ") over (";
        for (size_t j = 0; j < w.partition.size(); ++j) out << (j ? ", " : "") << w.partition[j];
        out << " | " << OrderText(w.order) << ")";
      }
      out << "}";
      break;
    }
    case RelNode::Kind::kSort:
      out << "Sort [" << OrderText(n.sort) << "]";
      break;
    case RelNode::Kind::kLimit:
      out << "Limit " << n.limit << " offset " << n.offset;
      break;
  }
  return out.str();
}

void Print(const Rel& rel, int depth, std::map<const RelNode*, int>& ids,
           const std::map<const RelNode*, int>& uses, std::ostringstream& out) {
  std::string indent(static_cast<size_t>(depth) * 2, ' ');
  auto it = ids.find(rel.get());
  if (it != ids.end()) {
    out << indent << "-> #" << it->second << "\n";
    return;
  }
  out << indent;
  if (uses.at(rel.get()) > 1) {
    int id = static_cast<int>(ids.size()) + 1;
    ids[rel.get()] = id;
    out << "#" << id << " ";
  }
  out << Describe(*rel) << "\n";
  for (const Rel& in : rel->inputs) Print(in, depth + 1, ids, uses, out);
}

void CountUses(const Rel& rel, std::map<const RelNode*, int>& uses) {
  if (uses[rel.get()]++ > 0) return;
  for (const Rel& in : rel->inputs) CountUses(in, uses);
}

}  // namespace

std::string ExplainRel(const RelPlan& plan) {
  std::map<const RelNode*, int> uses, ids;
  CountUses(plan.root, uses);
  std::ostringstream out;
  Print(plan.root, 0, ids, uses, out);
  out << "operators: " << OperatorCount(plan) << "\n";
  out << "aggregate joins: " << AggregateJoinCount(plan) << "\n";
  return out.str();
}

}  // namespace sheetc::relalg
