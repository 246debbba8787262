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

#ifndef SHEETC_ORACLE_FIXTURE_H_
#define SHEETC_ORACLE_FIXTURE_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sheetc/oracle/oracle.h"
#include "sheetc/spec/resolve.h"

namespace sheetc::oracle {

// A self-contained test case:
//   {"name", "description", "tags": [...],
//    "tables": {"<name>": {"columns": [{"name", "type"}], "primary_key",
//                          "unique_keys", "rows": [[...]]}},
//    "worksheets": [{"id", "spec"}],
//    "spec": {...}, "bindings": {...},
//    "expected": {"columns": [...], "rows": [[...]]}}
struct Fixture {
  std::string name;
  std::string description;
  std::vector<std::string> tags;
  spec::Catalog catalog;
  std::map<std::string, Table> tables;
  spec::WorksheetSpec spec;
  nlohmann::ordered_json spec_json;
  std::map<std::string, Value> bindings;
  std::optional<Table> expected;

  bool HasTag(const std::string& tag) const;
};

Fixture FixtureFromJson(const nlohmann::ordered_json& doc);
Fixture LoadFixture(const std::string& path);
// Every *.json under `dir`, sorted by file name.
std::vector<Fixture> LoadFixtures(const std::string& dir);

Table TableFromJson(const nlohmann::ordered_json& doc,
                    const std::vector<spec::Attribute>& columns);
nlohmann::ordered_json TableToJson(const Table& table);

// Expected tables are untyped; this retypes their cells to `columns`.
Table Retype(const Table& table, const std::vector<spec::Attribute>& columns);

// Serves table inputs from `tables`. A SQL input is served from the table
// named after its alias, which holds the query's precomputed result.
DataFn TableData(const std::map<std::string, Table>& tables);

}  // namespace sheetc::oracle

#endif  // SHEETC_ORACLE_FIXTURE_H_
