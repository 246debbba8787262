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

#include "sheetc/oracle/oracle.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "sheetc/calc/calc_graph.h"
#include "sheetc/common/errors.h"

namespace sheetc::oracle {

using formula::Expr;
using formula::FunctionClass;
using formula::TypedExpr;

int Table::ColumnIndex(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

bool Matches(const Value& a, const Value& b) {
  return !IsNull(a) && !IsNull(b) && CompareValues(a, b) == 0;
}

struct KeyLess {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
    for (size_t i = 0; i < a.size(); ++i) {
      auto c = CompareValues(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return false;
  }
};

// Ascending puts NULL first, descending puts it last.
int OrderCompare(const Value& a, const Value& b, bool descending) {
  auto c = CompareValues(a, b);
  int r = c < 0 ? -1 : (c > 0 ? 1 : 0);
  return descending ? -r : r;
}

}  // namespace

Table SourceRelation(const spec::ResolvedSpec& spec, const DataFn& data) {
  auto load = [&](const spec::ResolvedInput& in, const std::string& scope) {
    Table raw;
    if (in.worksheet) {
      raw = Run(in.worksheet, data, false);
    } else {
      raw = data(in);
    }
    Table t;
    std::vector<int> idx;
    for (const spec::Attribute& a : in.source.schema) {
      int i = raw.ColumnIndex(a.name);
      if (i < 0) throw ExecutionError("input `" + in.source.alias + "` has no column " + a.name);
      idx.push_back(i);
      t.columns.push_back({scope + "." + a.name, a.type});
    }
    for (const auto& row : raw.rows) {
      std::vector<Value> out;
      for (int i : idx) out.push_back(row[i]);
      t.rows.push_back(std::move(out));
    }
    return t;
  };

  Table acc = load(spec.inputs[0], spec.inputs[0].source.alias);
  auto join = [&](const Table& right, const std::vector<std::pair<std::string, std::string>>& on,
                  spec::JoinType type) {
    std::vector<std::pair<int, int>> cols;
    for (const auto& [l, r] : on) cols.emplace_back(acc.ColumnIndex(l), right.ColumnIndex(r));
    Table out;
    out.columns = acc.columns;
    out.columns.insert(out.columns.end(), right.columns.begin(), right.columns.end());
    std::vector<bool> right_matched(right.rows.size(), false);
    for (const auto& lrow : acc.rows) {
      bool matched = false;
      for (size_t j = 0; j < right.rows.size(); ++j) {
        const auto& rrow = right.rows[j];
        bool ok = std::all_of(cols.begin(), cols.end(), [&](const std::pair<int, int>& c) {
          return Matches(lrow[c.first], rrow[c.second]);
        });
        if (!ok) continue;
        matched = true;
        right_matched[j] = true;
        std::vector<Value> row = lrow;
        row.insert(row.end(), rrow.begin(), rrow.end());
        out.rows.push_back(std::move(row));
      }
      if (!matched && (type == spec::JoinType::kLeft || type == spec::JoinType::kFull)) {
        std::vector<Value> row = lrow;
        row.resize(out.columns.size());
        out.rows.push_back(std::move(row));
      }
    }
    if (type == spec::JoinType::kRight || type == spec::JoinType::kFull) {
      for (size_t j = 0; j < right.rows.size(); ++j) {
        if (right_matched[j]) continue;
        std::vector<Value> row(acc.columns.size());
        row.insert(row.end(), right.rows[j].begin(), right.rows[j].end());
        out.rows.push_back(std::move(row));
      }
    }
    acc = std::move(out);
  };
  for (const spec::ResolvedJoin& j : spec.joins) {
    const spec::ResolvedInput& in = spec.inputs[j.input];
    if (j.type == spec::JoinType::kSemi || j.type == spec::JoinType::kAnti) {
      throw UnsupportedQuery("semi- and anti-joins are not supported (input `" +
                             in.source.alias + "`)");
    }
    join(load(in, in.source.alias), j.on, j.type);
  }
  for (const spec::ResolvedLink& l : spec.links) {
    join(load(spec.inputs[l.input], l.name), l.on, spec::JoinType::kLeft);
  }
  return acc;
}

namespace {

class Interpreter {
 public:
  Interpreter(const walg::Plan& plan, NestedRelation& nr)
      : plan_(plan), vs_(plan.spec()), nr_(nr), totals_(vs_.totals()) {}

  void Form(int level) {
    LevelData& ld = nr_.levels[level];
    if (ld.formed) return;
    Form(level - 1);
    LevelData& lower = nr_.levels[level - 1];
    if (level == totals_) {
      Record total;
      for (size_t i = 0; i < lower.records.size(); ++i) {
        if (!lower.records[i].alive) continue;
        lower.records[i].parent = 0;
        total.children.push_back(static_cast<int>(i));
      }
      ld.records.push_back(std::move(total));
      ld.formed = true;
      return;
    }
    const std::vector<std::string>& keys = vs_.levels[level].grouping_keys;
    std::map<std::vector<Value>, int, KeyLess> groups;
    for (size_t i = 0; i < lower.records.size(); ++i) {
      Record& r = lower.records[i];
      if (!r.alive) continue;
      std::vector<Value> key;
      for (const std::string& k : keys) key.push_back(Get(r, k));
      auto [it, inserted] = groups.emplace(key, static_cast<int>(ld.records.size()));
      if (inserted) {
        Record group;
        for (size_t k = 0; k < keys.size(); ++k) group.attrs[keys[k]] = key[k];
        ld.records.push_back(std::move(group));
      }
      r.parent = it->second;
      ld.records[it->second].children.push_back(static_cast<int>(i));
    }
    ld.formed = true;
  }

  void Run(const walg::Op& op) {
    switch (op.kind) {
      case walg::Op::Kind::kProject:
        RunProject(op);
        break;
      case walg::Op::Kind::kJoin:
        RunJoin(op);
        break;
      case walg::Op::Kind::kSelect:
        RunSelect(op);
        break;
    }
  }

  int Ancestor(int level, int rec, int target) const {
    while (level < target) {
      rec = nr_.levels[level].records[rec].parent;
      ++level;
      if (rec < 0) throw InternalError("record without parent");
    }
    return rec;
  }

 private:
  static Value Get(const Record& r, const std::string& name) {
    auto it = r.attrs.find(name);
    return it == r.attrs.end() ? Value{} : it->second;
  }

  class Ctx : public formula::EvalContext {
   public:
    Ctx(const Record& r, int index,
        const std::map<const TypedExpr*, std::vector<Value>>* windows)
        : r_(r), index_(index), windows_(windows) {}
    Value Ref(const TypedExpr& ref) const override { return Get(r_, ref.name); }
    Value Special(const TypedExpr& call) const override {
      if (windows_) {
        auto it = windows_->find(&call);
        if (it != windows_->end()) return it->second[index_];
      }
      return formula::EvalContext::Special(call);
    }

   private:
    const Record& r_;
    int index_;
    const std::map<const TypedExpr*, std::vector<Value>>* windows_;
  };

  static void WindowNodes(const TypedExpr& e, std::vector<const TypedExpr*>& out) {
    for (const TypedExpr& a : e.args) WindowNodes(a, out);
    if (e.is_call(FunctionClass::kWindow)) out.push_back(&e);
  }

  // Alive records of `level` split by parent, each in level order.
  std::vector<std::vector<int>> Partitions(int level) {
    LevelData& ld = nr_.levels[level];
    std::vector<std::vector<int>> parts;
    std::map<int, size_t> by_parent;
    for (size_t i = 0; i < ld.records.size(); ++i) {
      if (!ld.records[i].alive) continue;
      int p = level == totals_ ? 0 : ld.records[i].parent;
      auto [it, inserted] = by_parent.emplace(p, parts.size());
      if (inserted) parts.emplace_back();
      parts[it->second].push_back(static_cast<int>(i));
    }
    for (auto& part : parts) {
      std::stable_sort(part.begin(), part.end(),
                       [&](int a, int b) { return CompareOrder(level, a, b) < 0; });
    }
    return parts;
  }

  // Level ordering followed by the level's own keys ascending.
  int CompareOrder(int level, int a, int b) const {
    const LevelData& ld = nr_.levels[level];
    for (const spec::OrderItem& item : vs_.levels[level].ordering) {
      int c = OrderCompare(Get(ld.records[a], item.column), Get(ld.records[b], item.column),
                           item.direction == spec::Direction::kDesc);
      if (c != 0) return c;
    }
    for (const std::string& k : vs_.levels[level].own_keys) {
      int c = OrderCompare(Get(ld.records[a], k), Get(ld.records[b], k), false);
      if (c != 0) return c;
    }
    return 0;
  }

  std::vector<Value> Window(const TypedExpr& call, int level,
                            const std::map<const TypedExpr*, std::vector<Value>>& inner) {
    LevelData& ld = nr_.levels[level];
    std::vector<Value> out(ld.records.size());
    auto arg = [&](size_t i, int rec) {
      Ctx ctx(ld.records[rec], rec, &inner);
      return formula::Evaluate(call.args[i], ctx);
    };
    auto literal_int = [&](size_t i, int def) {
      if (call.args.size() <= i) return def;
      return static_cast<int>(std::get<double>(call.args[i].literal));
    };
    const std::string& fn = call.name;
    for (const std::vector<int>& part : Partitions(level)) {
      const int n = static_cast<int>(part.size());
      std::vector<Value> x(n);
      if (!call.args.empty() && fn != "Rank") {
        for (int i = 0; i < n; ++i) x[i] = arg(0, part[i]);
      }
      for (int i = 0; i < n; ++i) {
        Value v;
        if (fn == "Lag" || fn == "Lead") {
          int off = literal_int(1, 1);
          int j = fn == "Lag" ? i - off : i + off;
          if (j >= 0 && j < n) v = x[j];
        } else if (fn == "FillDown") {
          for (int j = i; j >= 0; --j) {
            if (!IsNull(x[j])) {
              v = x[j];
              break;
            }
          }
        } else if (fn == "CumulativeSum" || fn == "MovingAverage") {
          int from = fn == "CumulativeSum" ? 0 : std::max(0, i - literal_int(1, 2));
          double sum = 0;
          int count = 0;
          for (int j = from; j <= i; ++j) {
            if (IsNull(x[j])) continue;
            sum += std::get<double>(x[j]);
            ++count;
          }
          if (count > 0) v = fn == "CumulativeSum" ? sum : sum / count;
        } else if (fn == "Rank") {
          v = static_cast<double>(i + 1);
        } else {
          throw InternalError("oracle: unknown window function " + fn);
        }
        out[part[i]] = v;
      }
      if (fn == "Rank") {
        // Peers under the rank ordering share the lowest position.
        bool by_arg = !call.args.empty();
        bool desc = false;
        if (call.args.size() > 1) {
          std::string dir = std::get<std::string>(call.args[1].literal);
          desc = !dir.empty() && std::tolower(static_cast<unsigned char>(dir[0])) == 'd';
        }
        std::vector<Value> keys(n);
        if (by_arg) {
          for (int i = 0; i < n; ++i) keys[i] = arg(0, part[i]);
        }
        for (int i = 0; i < n; ++i) {
          int before = 0;
          for (int j = 0; j < n; ++j) {
            int c = by_arg ? OrderCompare(keys[j], keys[i], desc) : CompareOrder(level, part[j], part[i]);
            if (c < 0) ++before;
          }
          out[part[i]] = static_cast<double>(before + 1);
        }
      }
    }
    return out;
  }

  void RunProject(const walg::Op& op) {
    const int level = op.level;
    Form(level);
    LevelData& ld = nr_.levels[level];
    for (const walg::ProjectItem& item : op.items) {
      std::vector<const TypedExpr*> windows;
      WindowNodes(item.expr, windows);
      if (!windows.empty()) Form(std::min(level + 1, totals_));
      std::map<const TypedExpr*, std::vector<Value>> computed;
      for (const TypedExpr* w : windows) computed[w] = Window(*w, level, computed);
      std::vector<Value> values(ld.records.size());
      for (size_t i = 0; i < ld.records.size(); ++i) {
        if (!ld.records[i].alive) continue;
        Ctx ctx(ld.records[i], static_cast<int>(i), &computed);
        values[i] = formula::Evaluate(item.expr, ctx);
      }
      for (size_t i = 0; i < ld.records.size(); ++i) {
        if (ld.records[i].alive) ld.records[i].attrs[item.name] = values[i];
      }
    }
  }

  void Descendants(int level, int rec, int target, std::vector<int>& out) const {
    const Record& r = nr_.levels[level].records[rec];
    if (!r.alive) return;
    if (level == target) {
      out.push_back(rec);
      return;
    }
    for (int c : r.children) Descendants(level - 1, c, target, out);
  }

  static Value Aggregate(const TypedExpr& call, const std::vector<const Record*>& rows) {
    const std::string& fn = call.name;
    if (call.args.empty()) return static_cast<double>(rows.size());
    std::vector<Value> vals;
    for (const Record* r : rows) {
      Ctx ctx(*r, 0, nullptr);
      Value v = formula::Evaluate(call.args[0], ctx);
      if (!IsNull(v)) vals.push_back(std::move(v));
    }
    if (fn == "Count") return static_cast<double>(vals.size());
    if (fn == "CountIf") {
      return static_cast<double>(std::count_if(vals.begin(), vals.end(), [](const Value& v) {
        return std::get<bool>(v);
      }));
    }
    if (fn == "CountDistinct") {
      std::sort(vals.begin(), vals.end(),
                [](const Value& a, const Value& b) { return CompareValues(a, b) < 0; });
      auto end = std::unique(vals.begin(), vals.end(), [](const Value& a, const Value& b) {
        return CompareValues(a, b) == 0;
      });
      return static_cast<double>(end - vals.begin());
    }
    if (vals.empty()) return Value{};
    if (fn == "Sum" || fn == "Avg") {
      double s = 0;
      for (const Value& v : vals) s += std::get<double>(v);
      return fn == "Sum" ? s : s / static_cast<double>(vals.size());
    }
    if (fn == "Min" || fn == "Max") {
      Value best = vals[0];
      for (const Value& v : vals) {
        auto c = CompareValues(v, best);
        if ((fn == "Min" && c < 0) || (fn == "Max" && c > 0)) best = v;
      }
      return best;
    }
    throw InternalError("oracle: unknown aggregate " + fn);
  }

  void RunJoin(const walg::Op& op) {
    Form(std::max(op.source, op.level));
    LevelData& target = nr_.levels[op.level];
    LevelData& source = nr_.levels[op.source];
    for (size_t t = 0; t < target.records.size(); ++t) {
      Record& rec = target.records[t];
      if (!rec.alive) continue;
      if (op.source > op.level) {
        const Record& up = nr_.levels[op.source].records[Ancestor(op.level, static_cast<int>(t), op.source)];
        for (const walg::JoinItem& j : op.joins) rec.attrs[j.name] = Get(up, j.attr);
        continue;
      }
      std::vector<int> idx;
      Descendants(op.level, static_cast<int>(t), op.source, idx);
      std::vector<const Record*> rows;
      for (int i : idx) rows.push_back(&source.records[i]);
      for (const walg::JoinItem& j : op.joins) {
        if (j.kind == walg::JoinItem::Kind::kAggregate) {
          rec.attrs[j.name] = Aggregate(j.expr, rows);
          continue;
        }
        std::optional<Value> lo, hi;
        for (const Record* r : rows) {
          Value v = Get(*r, j.attr);
          if (IsNull(v)) continue;
          if (!lo || CompareValues(v, *lo) < 0) lo = v;
          if (!hi || CompareValues(v, *hi) > 0) hi = v;
        }
        bool multi = lo && CompareValues(*lo, *hi) != 0;
        rec.attrs[j.name] = lo && !multi ? *lo : Value{};
        rec.attrs[j.flag] = multi;
      }
    }
  }

  void RunSelect(const walg::Op& op) {
    const int p = op.level;
    Form(p);
    LevelData& ld = nr_.levels[p];
    for (Record& r : ld.records) {
      if (!r.alive) continue;
      Ctx ctx(r, 0, nullptr);
      Value v = formula::Evaluate(op.predicate, ctx);
      bool keep = !IsNull(v) && std::get<bool>(v);
      if (keep) continue;
      if (p == totals_) {
        for (int c : r.children) nr_.levels[p - 1].records[c].alive = false;
      } else {
        r.alive = false;
      }
    }
    int start = p == totals_ ? p - 2 : p - 1;
    for (int d = start; d >= 0; --d) {
      for (Record& r : nr_.levels[d].records) {
        if (r.alive && r.parent >= 0 && !nr_.levels[d + 1].records[r.parent].alive) {
          r.alive = false;
        }
      }
    }
    for (int q = p + 1; q < totals_; ++q) {
      LevelData& up = nr_.levels[q];
      if (!up.formed) break;
      for (Record& r : up.records) {
        if (!r.alive) continue;
        r.alive = std::any_of(r.children.begin(), r.children.end(), [&](int c) {
          return nr_.levels[q - 1].records[c].alive;
        });
      }
    }
  }

  const walg::Plan& plan_;
  const spec::ValidatedSpec& vs_;
  NestedRelation& nr_;
  const int totals_;
};

}  // namespace

NestedRelation Evaluate(const walg::Plan& plan, const Table& source) {
  NestedRelation nr;
  nr.spec = plan.graph->spec;
  nr.levels.resize(plan.totals + 1);
  LevelData& base = nr.levels[0];
  base.formed = true;
  for (const auto& row : source.rows) {
    Record r;
    for (size_t i = 0; i < source.columns.size(); ++i) r.attrs[source.columns[i].name] = row[i];
    base.records.push_back(std::move(r));
  }
  Interpreter interp(plan, nr);
  for (const walg::Op& op : plan.ops) interp.Run(op);
  return nr;
}

Table Flatten(NestedRelation& nested, const walg::Plan& plan,
              const std::optional<spec::PageSpec>& page) {
  Interpreter interp(plan, nested);
  interp.Form(plan.totals);
  const int grain = plan.layout.grain;
  const calc::CalcGraph& graph = *plan.graph;

  struct Source {
    std::string attr;
    int level;
  };
  auto locate = [&](const std::string& column) {
    const calc::Node& n = graph.column(column);
    return Source{column, std::max(n.level, grain)};
  };
  auto cell = [&](const Source& s, int rec) -> Value {
    const Record& r = nested.levels[s.level].records[interp.Ancestor(grain, rec, s.level)];
    auto it = r.attrs.find(s.attr);
    return it == r.attrs.end() ? Value{} : it->second;
  };

  Table out;
  std::vector<Source> sources;
  for (const std::string& c : plan.layout.columns) {
    ScalarType t = graph.column(c).expr.type;
    out.columns.push_back({c, t == ScalarType::kError ? ScalarType::kText : t});
    sources.push_back(locate(c));
  }
  for (const std::string& c : plan.layout.annotated) {
    out.columns.push_back({calc::AnnotationName(c), ScalarType::kLogical});
    Source s = locate(c);
    s.attr = calc::AnnotationName(c);
    sources.push_back(s);
  }
  std::vector<Source> sort_sources;
  for (const calc::SortKey& k : plan.layout.sort) sort_sources.push_back(locate(k.column));

  struct Row {
    std::vector<Value> sort;
    std::vector<Value> cells;
  };
  std::vector<Row> rows;
  const LevelData& ld = nested.levels[grain];
  for (size_t i = 0; i < ld.records.size(); ++i) {
    if (!ld.records[i].alive) continue;
    Row row;
    for (const Source& s : sort_sources) row.sort.push_back(cell(s, static_cast<int>(i)));
    for (const Source& s : sources) row.cells.push_back(cell(s, static_cast<int>(i)));
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    for (size_t k = 0; k < plan.layout.sort.size(); ++k) {
      int c = OrderCompare(a.sort[k], b.sort[k], plan.layout.sort[k].descending);
      if (c != 0) return c < 0;
    }
    return false;
  });
  size_t begin = 0, end = rows.size();
  if (page) {
    begin = std::min<size_t>(rows.size(), static_cast<size_t>(page->offset));
    end = std::min<size_t>(rows.size(), begin + static_cast<size_t>(page->limit));
  }
  for (size_t i = begin; i < end; ++i) out.rows.push_back(std::move(rows[i].cells));
  return out;
}

Table Run(std::shared_ptr<const spec::ResolvedSpec> spec, const DataFn& data, bool apply_page) {
  auto graph = std::make_shared<const calc::CalcGraph>(calc::AnalyzeSpec(spec));
  walg::Plan plan = walg::OrderOperations(graph);
  Table source = SourceRelation(*spec, data);
  NestedRelation nested = Evaluate(plan, source);
  std::optional<spec::PageSpec> page;
  if (apply_page) page = spec->spec().page;
  return Flatten(nested, plan, page);
}

namespace {

// Numbers are compared at 12 significant digits so that rows differing only
// by rounding noise sort alike.
int CanonicalCompare(const Value& a, const Value& b) {
  if (std::holds_alternative<double>(a) && std::holds_alternative<double>(b)) {
    double x = std::get<double>(a), y = std::get<double>(b);
    double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
    if (std::fabs(x - y) <= 1e-12 * scale) return 0;
    return x < y ? -1 : 1;
  }
  return OrderCompare(a, b, false);
}

bool CellsEqual(const Value& a, const Value& b) {
  if (std::holds_alternative<double>(a) && std::holds_alternative<double>(b)) {
    double x = std::get<double>(a), y = std::get<double>(b);
    if (x == y) return true;
    return std::fabs(x - y) <= 1e-9 * std::max({1.0, std::fabs(x), std::fabs(y)});
  }
  return a.index() == b.index() && SameValue(a, b);
}

std::vector<std::vector<Value>> Canonical(const Table& t) {
  auto rows = t.rows;
  std::sort(rows.begin(), rows.end(), [](const std::vector<Value>& a, const std::vector<Value>& b) {
    for (size_t i = 0; i < a.size(); ++i) {
      int c = CanonicalCompare(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return false;
  });
  return rows;
}

}  // namespace

Report Compare(const Table& expected, const Table& actual) {
  std::vector<std::string> en, an;
  for (const auto& c : expected.columns) en.push_back(c.name);
  for (const auto& c : actual.columns) an.push_back(c.name);
  if (en != an) {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
      return s;
    };
    throw SchemaMismatch("columns differ: expected (" + join(en) + "), got (" + join(an) + ")");
  }
  Report report;
  if (expected.rows.size() != actual.rows.size()) {
    report.ok = false;
    report.summary = "row count " + std::to_string(actual.rows.size()) + ", expected " +
                     std::to_string(expected.rows.size());
  }
  auto e = Canonical(expected), a = Canonical(actual);
  size_t bad = 0;
  for (size_t r = 0; r < std::min(e.size(), a.size()); ++r) {
    for (size_t c = 0; c < en.size(); ++c) {
      if (CellsEqual(e[r][c], a[r][c])) continue;
      ++bad;
      if (report.mismatches.size() < 10) {
        report.mismatches.push_back({r, en[c], ValueToString(e[r][c]), ValueToString(a[r][c])});
      }
    }
  }
  if (bad > 0) {
    report.ok = false;
    if (!report.summary.empty()) report.summary += "; ";
    report.summary += std::to_string(bad) + " mismatched cell(s)";
  }
  if (report.ok) report.summary = std::to_string(e.size()) + " row(s) match";
  return report;
}

}  // namespace sheetc::oracle
