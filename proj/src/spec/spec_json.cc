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
#include <set>

#include "sheetc/common/errors.h"
#include "sheetc/spec/spec.h"

namespace sheetc::spec {

using Json = nlohmann::ordered_json;

const ColumnSpec* WorksheetSpec::FindColumn(std::string_view name) const {
  for (const ColumnSpec& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string_view FilterKindName(FilterKind kind) {
  switch (kind) {
    case FilterKind::kIncludeList:
      return "include_list";
    case FilterKind::kExcludeList:
      return "exclude_list";
    case FilterKind::kRange:
      return "range";
    case FilterKind::kTextMatch:
      return "text_match";
    case FilterKind::kTopN:
      return "top_n";
    case FilterKind::kCustomPredicate:
      return "custom_predicate";
  }
  return "?";
}

std::string_view JoinTypeName(JoinType type) {
  switch (type) {
    case JoinType::kInner:
      return "inner";
    case JoinType::kLeft:
      return "left";
    case JoinType::kRight:
      return "right";
    case JoinType::kFull:
      return "full";
    case JoinType::kSemi:
      return "semi";
    case JoinType::kAnti:
      return "anti";
  }
  return "?";
}

Value ValueFromJsonUntyped(const Json& v) {
  if (v.is_null()) return Value{};
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw SchemaError("expected a scalar value, got " + v.dump());
}

Value ValueFromJson(const Json& v, ScalarType type) {
  if (v.is_null()) return Value{};
  switch (type) {
    case ScalarType::kLogical:
      if (v.is_boolean()) return v.get<bool>();
      break;
    case ScalarType::kNumber:
      if (v.is_number()) return v.get<double>();
      break;
    case ScalarType::kText:
      if (v.is_string()) return v.get<std::string>();
      break;
    case ScalarType::kDate:
      if (v.is_string()) {
        if (auto d = ParseIsoDate(v.get<std::string>())) return *d;
      }
      break;
    case ScalarType::kError:
      break;
  }
  throw SchemaError("value " + v.dump() + " is not a valid " +
                    std::string(ScalarTypeName(type)));
}

Json ValueToJson(const Value& v) {
  switch (v.index()) {
    case 1:
      return std::get<bool>(v);
    case 2:
      return std::get<double>(v);
    case 3:
      return std::get<std::string>(v);
    case 4:
      return FormatIsoDate(std::get<Date>(v));
    default:
      return nullptr;
  }
}

namespace {

// Field access with the JSON path kept for error messages.
class Obj {
 public:
  Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw SchemaError(path_ + ": expected an object");
  }

  void Allow(std::initializer_list<std::string_view> fields) const {
    for (const auto& [k, _] : j_.items()) {
      if (std::find(fields.begin(), fields.end(), k) == fields.end()) {
        throw SchemaError(path_ + ": unknown field `" + k + "`");
      }
    }
  }

  bool Has(const std::string& f) const { return j_.contains(f); }
  const Json& Raw(const std::string& f) const { return j_.at(f); }
  std::string Path(const std::string& f) const { return path_ + "." + f; }

  const Json& Need(const std::string& f) const {
    if (!Has(f)) throw SchemaError(path_ + ": missing field `" + f + "`");
    return j_.at(f);
  }

  std::string String(const std::string& f) const {
    const Json& v = Need(f);
    if (!v.is_string()) throw SchemaError(Path(f) + ": expected a string");
    return v.get<std::string>();
  }
  std::string String(const std::string& f, std::string def) const {
    return Has(f) ? String(f) : def;
  }
  bool Bool(const std::string& f, bool def) const {
    if (!Has(f)) return def;
    if (!Raw(f).is_boolean()) throw SchemaError(Path(f) + ": expected a bool");
    return Raw(f).get<bool>();
  }
  int64_t Int(const std::string& f) const {
    const Json& v = Need(f);
    if (!v.is_number_integer() || v.get<int64_t>() < 0) {
      throw SchemaError(Path(f) + ": expected a non-negative integer");
    }
    return v.get<int64_t>();
  }
  const Json& Array(const std::string& f) const {
    const Json& v = Need(f);
    if (!v.is_array()) throw SchemaError(Path(f) + ": expected an array");
    return v;
  }
  std::vector<std::string> Strings(const std::string& f) const {
    std::vector<std::string> out;
    if (!Has(f)) return out;
    for (const Json& s : Array(f)) {
      if (!s.is_string()) throw SchemaError(Path(f) + ": expected strings");
      out.push_back(s.get<std::string>());
    }
    return out;
  }
  const std::string& path() const { return path_; }

 private:
  const Json& j_;
  std::string path_;
};

ScalarType TypeField(const Obj& o, const std::string& f) {
  std::string name = o.String(f);
  auto t = ParseScalarType(name);
  if (!t || *t == ScalarType::kError) {
    throw SchemaError(o.Path(f) + ": unknown type `" + name + "`");
  }
  return *t;
}

Direction DirectionField(const Obj& o, const std::string& f, Direction def) {
  if (!o.Has(f)) return def;
  std::string d = o.String(f);
  if (d == "asc") return Direction::kAsc;
  if (d == "desc") return Direction::kDesc;
  throw SchemaError(o.Path(f) + ": expected `asc` or `desc`");
}

InputSource ParseInput(const Json& j, const std::string& path) {
  Obj o(j, path);
  o.Allow({"alias", "table", "sql", "worksheet", "csv", "schema", "bindings",
           "primary_key", "unique_keys"});
  InputSource in;
  in.alias = o.String("alias");
  int kinds = o.Has("sql") + o.Has("worksheet") +
              (o.Has("table") && !o.Has("csv") ? 1 : 0) + o.Has("csv");
  if (kinds != 1) {
    throw SchemaError(path +
                      ": exactly one of `table`, `sql`, `worksheet`, `csv` "
                      "is required");
  }
  if (o.Has("sql")) {
    in.kind = InputSource::Kind::kSql;
    in.ref = o.String("sql");
  } else if (o.Has("worksheet")) {
    in.kind = InputSource::Kind::kWorksheet;
    in.ref = o.String("worksheet");
  } else if (o.Has("csv")) {
    in.kind = InputSource::Kind::kCsv;
    in.csv_path = o.String("csv");
    in.ref = o.String("table", in.alias);
  } else {
    in.ref = o.String("table");
  }
  if (o.Has("schema")) {
    size_t i = 0;
    for (const Json& a : o.Array("schema")) {
      Obj ao(a, o.Path("schema") + "[" + std::to_string(i++) + "]");
      ao.Allow({"name", "type"});
      in.schema.push_back({ao.String("name"), TypeField(ao, "type")});
    }
  }
  if (in.kind == InputSource::Kind::kSql && in.schema.empty()) {
    throw SchemaError(path + ": `sql` inputs need a `schema`");
  }
  in.primary_key = o.Strings("primary_key");
  if (o.Has("unique_keys")) {
    for (const Json& k : o.Array("unique_keys")) {
      std::vector<std::string> key;
      if (!k.is_array()) throw SchemaError(o.Path("unique_keys") + ": expected arrays");
      for (const Json& s : k) key.push_back(s.get<std::string>());
      in.unique_keys.push_back(std::move(key));
    }
  }
  if (o.Has("bindings")) {
    if (in.kind != InputSource::Kind::kWorksheet) {
      throw SchemaError(path + ": `bindings` only applies to worksheet inputs");
    }
    const Json& b = o.Raw("bindings");
    if (!b.is_object()) throw SchemaError(o.Path("bindings") + ": expected an object");
    for (const auto& [k, v] : b.items()) {
      in.bindings[k] = ValueFromJsonUntyped(v);
    }
  }
  return in;
}

JoinSpec ParseJoin(const Json& j, const std::string& path) {
  Obj o(j, path);
  o.Allow({"input", "type", "on"});
  JoinSpec js;
  js.input = o.String("input");
  std::string t = o.String("type", "inner");
  if (t == "inner") {
    js.type = JoinType::kInner;
  } else if (t == "left") {
    js.type = JoinType::kLeft;
  } else if (t == "right") {
    js.type = JoinType::kRight;
  } else if (t == "full") {
    js.type = JoinType::kFull;
  } else if (t == "semi") {
    js.type = JoinType::kSemi;
  } else if (t == "anti") {
    js.type = JoinType::kAnti;
  } else {
    throw SchemaError(o.Path("type") + ": unknown join type `" + t + "`");
  }
  for (const Json& pair : o.Array("on")) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
        !pair[1].is_string()) {
      throw SchemaError(o.Path("on") + ": expected [left, right] pairs");
    }
    js.on.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
  }
  if (js.on.empty()) throw SchemaError(o.Path("on") + ": must not be empty");
  return js;
}

LinkSpec ParseLink(const Json& j, const std::string& path) {
  Obj o(j, path);
  o.Allow({"name", "input", "local_keys", "remote_keys"});
  LinkSpec l;
  l.name = o.String("name");
  l.input = o.String("input");
  l.local_keys = o.Strings("local_keys");
  l.remote_keys = o.Strings("remote_keys");
  if (l.local_keys.empty() || l.local_keys.size() != l.remote_keys.size()) {
    throw SchemaError(path + ": `local_keys` and `remote_keys` must be "
                             "non-empty and of equal length");
  }
  return l;
}

LevelSpec ParseLevel(const Json& j, const std::string& path) {
  Obj o(j, path);
  o.Allow({"keys", "ordering", "collapsed"});
  LevelSpec l;
  l.keys = o.Strings("keys");
  l.collapsed = o.Bool("collapsed", false);
  if (o.Has("ordering")) {
    size_t i = 0;
    for (const Json& item : o.Array("ordering")) {
      Obj io(item, o.Path("ordering") + "[" + std::to_string(i++) + "]");
      io.Allow({"column", "direction"});
      l.ordering.push_back(
          {io.String("column"), DirectionField(io, "direction", Direction::kAsc)});
    }
  }
  return l;
}

ColumnSpec ParseColumn(const std::string& name, const Json& j,
                       const std::string& path) {
  Obj o(j, path);
  o.Allow({"formula", "level", "hidden", "format"});
  ColumnSpec c;
  c.name = name;
  c.formula = o.String("formula");
  c.level = static_cast<int>(o.Int("level"));
  c.hidden = o.Bool("hidden", false);
  c.format = o.String("format", "");
  return c;
}

FilterSpec ParseFilter(const Json& j, const std::string& path) {
  Obj o(j, path);
  std::string kind = o.String("kind");
  FilterSpec f;
  if (kind == "include_list" || kind == "exclude_list") {
    o.Allow({"kind", "column", "values"});
    f.kind = kind == "include_list" ? FilterKind::kIncludeList
                                    : FilterKind::kExcludeList;
    for (const Json& v : o.Array("values")) {
      f.values.push_back(ValueFromJsonUntyped(v));
    }
  } else if (kind == "range") {
    o.Allow({"kind", "column", "low", "high"});
    f.kind = FilterKind::kRange;
    if (o.Has("low") && !o.Raw("low").is_null()) {
      f.low = ValueFromJsonUntyped(o.Raw("low"));
    }
    if (o.Has("high") && !o.Raw("high").is_null()) {
      f.high = ValueFromJsonUntyped(o.Raw("high"));
    }
  } else if (kind == "text_match") {
    o.Allow({"kind", "column", "pattern"});
    f.kind = FilterKind::kTextMatch;
    f.pattern = o.String("pattern");
  } else if (kind == "top_n") {
    o.Allow({"kind", "column", "limit", "direction"});
    f.kind = FilterKind::kTopN;
    f.limit = o.Int("limit");
    f.direction = DirectionField(o, "direction", Direction::kDesc);
  } else if (kind == "custom_predicate") {
    o.Allow({"kind", "predicate"});
    f.kind = FilterKind::kCustomPredicate;
    f.predicate = o.String("predicate");
    return f;
  } else {
    throw SchemaError(o.Path("kind") + ": unknown filter kind `" + kind + "`");
  }
  f.column = o.String("column");
  return f;
}

}  // namespace

WorksheetSpec SpecFromJson(const Json& doc) {
  Obj o(doc, "$");
  o.Allow({"inputs", "joins", "links", "levels", "columns", "filters",
           "parameters", "page"});
  WorksheetSpec spec;
  size_t i = 0;
  for (const Json& in : o.Array("inputs")) {
    spec.inputs.push_back(ParseInput(in, "$.inputs[" + std::to_string(i++) + "]"));
  }
  if (spec.inputs.empty()) throw SchemaError("$.inputs: must not be empty");
  if (o.Has("joins")) {
    i = 0;
    for (const Json& j : o.Array("joins")) {
      spec.joins.push_back(ParseJoin(j, "$.joins[" + std::to_string(i++) + "]"));
    }
  }
  if (o.Has("links")) {
    i = 0;
    for (const Json& l : o.Array("links")) {
      spec.links.push_back(ParseLink(l, "$.links[" + std::to_string(i++) + "]"));
    }
  }
  i = 0;
  for (const Json& l : o.Array("levels")) {
    spec.levels.push_back(ParseLevel(l, "$.levels[" + std::to_string(i++) + "]"));
  }
  const Json& cols = o.Need("columns");
  if (!cols.is_object()) throw SchemaError("$.columns: expected an object");
  for (const auto& [name, c] : cols.items()) {
    spec.columns.push_back(ParseColumn(name, c, "$.columns." + name));
  }
  if (o.Has("filters")) {
    i = 0;
    for (const Json& f : o.Array("filters")) {
      spec.filters.push_back(
          ParseFilter(f, "$.filters[" + std::to_string(i++) + "]"));
    }
  }
  if (o.Has("parameters")) {
    const Json& ps = o.Raw("parameters");
    if (!ps.is_object()) throw SchemaError("$.parameters: expected an object");
    for (const auto& [name, p] : ps.items()) {
      Obj po(p, "$.parameters." + name);
      po.Allow({"type", "default"});
      ParameterSpec param;
      param.name = name;
      param.type = TypeField(po, "type");
      if (po.Has("default")) {
        param.default_value = ValueFromJson(po.Raw("default"), param.type);
      }
      spec.parameters.push_back(std::move(param));
    }
  }
  if (o.Has("page")) {
    Obj po(o.Raw("page"), "$.page");
    po.Allow({"limit", "offset"});
    PageSpec page;
    page.limit = po.Int("limit");
    page.offset = po.Has("offset") ? po.Int("offset") : 0;
    spec.page = page;
  }
  auto need_column = [&](const std::string& name, const std::string& where) {
    if (!spec.FindColumn(name)) {
      throw SchemaError(where + ": unknown column `" + name + "`");
    }
  };
  for (size_t l = 0; l < spec.levels.size(); ++l) {
    std::string where = "$.levels[" + std::to_string(l) + "]";
    for (const std::string& k : spec.levels[l].keys) need_column(k, where + ".keys");
    for (const OrderItem& item : spec.levels[l].ordering) {
      need_column(item.column, where + ".ordering");
    }
  }
  for (size_t f = 0; f < spec.filters.size(); ++f) {
    if (spec.filters[f].kind != FilterKind::kCustomPredicate) {
      need_column(spec.filters[f].column,
                  "$.filters[" + std::to_string(f) + "].column");
    }
  }
  return spec;
}

WorksheetSpec ParseSpec(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(e.what());
  }
  return SpecFromJson(doc);
}

namespace {

std::string_view DirectionName(Direction d) {
  return d == Direction::kAsc ? "asc" : "desc";
}

}  // namespace

Json SpecToJson(const WorksheetSpec& spec) {
  Json doc = Json::object();
  Json inputs = Json::array();
  for (const InputSource& in : spec.inputs) {
    Json j = Json::object();
    j["alias"] = in.alias;
    switch (in.kind) {
      case InputSource::Kind::kTable:
        j["table"] = in.ref;
        break;
      case InputSource::Kind::kSql:
        j["sql"] = in.ref;
        break;
      case InputSource::Kind::kWorksheet:
        j["worksheet"] = in.ref;
        break;
      case InputSource::Kind::kCsv:
        j["csv"] = in.csv_path;
        j["table"] = in.ref;
        break;
    }
    if (!in.schema.empty()) {
      Json schema = Json::array();
      for (const Attribute& a : in.schema) {
        schema.push_back({{"name", a.name}, {"type", ScalarTypeName(a.type)}});
      }
      j["schema"] = schema;
    }
    if (!in.primary_key.empty()) j["primary_key"] = in.primary_key;
    if (!in.unique_keys.empty()) j["unique_keys"] = in.unique_keys;
    if (!in.bindings.empty()) {
      Json b = Json::object();
      for (const auto& [k, v] : in.bindings) b[k] = ValueToJson(v);
      j["bindings"] = b;
    }
    inputs.push_back(j);
  }
  doc["inputs"] = inputs;
  if (!spec.joins.empty()) {
    Json joins = Json::array();
    for (const JoinSpec& js : spec.joins) {
      Json on = Json::array();
      for (const auto& [l, r] : js.on) on.push_back({l, r});
      joins.push_back(
          {{"input", js.input}, {"type", JoinTypeName(js.type)}, {"on", on}});
    }
    doc["joins"] = joins;
  }
  if (!spec.links.empty()) {
    Json links = Json::array();
    for (const LinkSpec& l : spec.links) {
      links.push_back({{"name", l.name},
                       {"input", l.input},
                       {"local_keys", l.local_keys},
                       {"remote_keys", l.remote_keys}});
    }
    doc["links"] = links;
  }
  Json levels = Json::array();
  for (const LevelSpec& l : spec.levels) {
    Json j = Json::object();
    j["keys"] = l.keys;
    if (!l.ordering.empty()) {
      Json ord = Json::array();
      for (const OrderItem& item : l.ordering) {
        ord.push_back(
            {{"column", item.column}, {"direction", DirectionName(item.direction)}});
      }
      j["ordering"] = ord;
    }
    if (l.collapsed) j["collapsed"] = true;
    levels.push_back(j);
  }
  doc["levels"] = levels;
  Json cols = Json::object();
  for (const ColumnSpec& c : spec.columns) {
    Json j = Json::object();
    j["formula"] = c.formula;
    j["level"] = c.level;
    if (c.hidden) j["hidden"] = true;
    if (!c.format.empty()) j["format"] = c.format;
    cols[c.name] = j;
  }
  doc["columns"] = cols;
  if (!spec.filters.empty()) {
    Json filters = Json::array();
    for (const FilterSpec& f : spec.filters) {
      Json j = Json::object();
      j["kind"] = FilterKindName(f.kind);
      switch (f.kind) {
        case FilterKind::kIncludeList:
        case FilterKind::kExcludeList: {
          j["column"] = f.column;
          Json vals = Json::array();
          for (const Value& v : f.values) vals.push_back(ValueToJson(v));
          j["values"] = vals;
          break;
        }
        case FilterKind::kRange:
          j["column"] = f.column;
          if (f.low) j["low"] = ValueToJson(*f.low);
          if (f.high) j["high"] = ValueToJson(*f.high);
          break;
        case FilterKind::kTextMatch:
          j["column"] = f.column;
          j["pattern"] = f.pattern;
          break;
        case FilterKind::kTopN:
          j["column"] = f.column;
          j["limit"] = f.limit;
          j["direction"] = DirectionName(f.direction);
          break;
        case FilterKind::kCustomPredicate:
          j["predicate"] = f.predicate;
          break;
      }
      filters.push_back(j);
    }
    doc["filters"] = filters;
  }
  if (!spec.parameters.empty()) {
    Json ps = Json::object();
    for (const ParameterSpec& p : spec.parameters) {
      Json j = {{"type", ScalarTypeName(p.type)}};
      if (p.default_value) j["default"] = ValueToJson(*p.default_value);
      ps[p.name] = j;
    }
    doc["parameters"] = ps;
  }
  if (spec.page) {
    doc["page"] = {{"limit", spec.page->limit}, {"offset", spec.page->offset}};
  }
  return doc;
}

std::string SerializeSpec(const WorksheetSpec& spec) {
  return SpecToJson(spec).dump(2);
}

}  // namespace sheetc::spec
