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

#include "sheetc/oracle/fixture.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sheetc/common/errors.h"
#include "sheetc/spec/spec.h"

namespace sheetc::oracle {

using Json = nlohmann::ordered_json;

bool Fixture::HasTag(const std::string& tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

Table TableFromJson(const Json& doc, const std::vector<spec::Attribute>& columns) {
  Table t;
  t.columns = columns;
  for (const Json& row : doc.at("rows")) {
    if (row.size() != columns.size()) throw SchemaError("fixture row has the wrong width");
    std::vector<Value> out;
    for (size_t i = 0; i < columns.size(); ++i) {
      out.push_back(spec::ValueFromJson(row[i], columns[i].type));
    }
    t.rows.push_back(std::move(out));
  }
  return t;
}

Json TableToJson(const Table& table) {
  Json doc;
  doc["columns"] = Json::array();
  for (const auto& c : table.columns) doc["columns"].push_back(c.name);
  doc["rows"] = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::array();
    for (const Value& v : row) r.push_back(spec::ValueToJson(v));
    doc["rows"].push_back(std::move(r));
  }
  return doc;
}

Fixture FixtureFromJson(const Json& doc) {
  Fixture f;
  f.name = doc.value("name", "");
  f.description = doc.value("description", "");
  if (doc.contains("tags")) f.tags = doc.at("tags").get<std::vector<std::string>>();
  Json catalog = {{"tables", Json::array()}, {"worksheets", doc.value("worksheets", Json::array())}};
  if (doc.contains("tables")) {
    for (const auto& [name, t] : doc.at("tables").items()) {
      Json info = {{"name", name}, {"columns", t.at("columns")}};
      if (t.contains("primary_key")) info["primary_key"] = t.at("primary_key");
      if (t.contains("unique_keys")) info["unique_keys"] = t.at("unique_keys");
      catalog["tables"].push_back(info);
    }
  }
  f.catalog = spec::Catalog::FromJson(catalog);
  for (const auto& [name, info] : f.catalog.tables()) {
    f.tables[name] = TableFromJson(doc.at("tables").at(name), info.columns);
  }
  f.spec_json = doc.at("spec");
  f.spec = spec::SpecFromJson(f.spec_json);
  if (doc.contains("bindings")) {
    for (const auto& [k, v] : doc.at("bindings").items()) {
      f.bindings[k] = spec::ValueFromJsonUntyped(v);
    }
  }
  if (doc.contains("expected")) {
    const Json& e = doc.at("expected");
    Table t;
    for (const Json& c : e.at("columns")) t.columns.push_back({c.get<std::string>(), ScalarType::kText});
    for (const Json& row : e.at("rows")) {
      std::vector<Value> out;
      for (const Json& v : row) out.push_back(spec::ValueFromJsonUntyped(v));
      t.rows.push_back(std::move(out));
    }
    f.expected = std::move(t);
  }
  return f;
}

Fixture LoadFixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot read fixture " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    Fixture f = FixtureFromJson(Json::parse(ss.str()));
    if (f.name.empty()) f.name = std::filesystem::path(path).stem().string();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw SyntaxError("fixture " + path + ": " + e.what());
  }
}

std::vector<Fixture> LoadFixtures(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Fixture> out;
  for (const auto& p : paths) out.push_back(LoadFixture(p));
  return out;
}

Table Retype(const Table& table, const std::vector<spec::Attribute>& columns) {
  Table out;
  out.columns = table.columns;
  for (auto& c : out.columns) {
    for (const auto& want : columns) {
      if (want.name == c.name) c.type = want.type;
    }
  }
  for (const auto& row : table.rows) {
    std::vector<Value> r;
    for (size_t i = 0; i < row.size() && i < out.columns.size(); ++i) {
      r.push_back(spec::CoerceValue(row[i], out.columns[i].type));
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

DataFn TableData(const std::map<std::string, Table>& tables) {
  return [tables](const spec::ResolvedInput& in) {
    const std::string& name = in.source.kind == spec::InputSource::Kind::kSql
                                  ? in.source.alias
                                  : in.source.ref;
    auto it = tables.find(name);
    if (it == tables.end()) throw ExecutionError("no data for input " + name);
    return it->second;
  };
}

}  // namespace sheetc::oracle
