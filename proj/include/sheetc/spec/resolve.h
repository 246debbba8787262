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

#ifndef SHEETC_SPEC_RESOLVE_H_
#define SHEETC_SPEC_RESOLVE_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sheetc/spec/spec.h"

namespace sheetc::spec {

struct TableInfo {
  std::string name;
  std::vector<Attribute> columns;
  std::vector<std::string> primary_key;
  std::vector<std::vector<std::string>> unique_keys;
};

// Tables and stored worksheets visible to a spec.
//   {"tables": [{"name", "columns": [{"name", "type"}], "primary_key",
//                "unique_keys"}],
//    "worksheets": [{"id", "spec"}]}
class Catalog {
 public:
  static Catalog FromJson(const nlohmann::ordered_json& doc);
  static Catalog Load(const std::string& path);

  void AddTable(TableInfo table);
  void AddWorksheet(const std::string& id, WorksheetSpec spec);
  const TableInfo* FindTable(const std::string& name) const;
  const WorksheetSpec* FindWorksheet(const std::string& id) const;
  const std::map<std::string, TableInfo>& tables() const { return tables_; }

 private:
  std::map<std::string, TableInfo> tables_;
  std::map<std::string, WorksheetSpec> worksheets_;
};

struct LevelInfo {
  std::vector<std::string> own_keys;
  // Own keys plus the keys of every higher level, highest level first.
  std::vector<std::string> cumulative_keys;
  // The cumulative keys resident strictly below this level: the attributes
  // that identify one record of the level.
  std::vector<std::string> grouping_keys;
  // Defaults to own keys ascending.
  std::vector<OrderItem> ordering;
  bool collapsed = false;
};

struct ValidatedSpec {
  WorksheetSpec spec;
  std::vector<LevelInfo> levels;
  // Lowest un-collapsed level: the grain of the output.
  int grain = 0;

  int totals() const { return static_cast<int>(levels.size()) - 1; }
  int LevelOf(const std::string& column) const;
};

ValidatedSpec ValidateSpec(const WorksheetSpec& spec);

// One attribute of the source relation the base level ranges over.
struct SourceAttr {
  std::string id;     // "<alias>.<name>", unique
  std::string scope;  // input alias or link name
  std::string name;
  ScalarType type = ScalarType::kText;
};

struct ResolvedSpec;

struct ResolvedInput {
  InputSource source;  // schema filled in
  std::shared_ptr<const ResolvedSpec> worksheet;
  // Column names of the input unique on every row, if known.
  std::vector<std::vector<std::string>> unique_keys;
};

struct ResolvedJoin {
  JoinType type = JoinType::kInner;
  int input = 0;  // index into ResolvedSpec::inputs
  // (left attribute id, right attribute id)
  std::vector<std::pair<std::string, std::string>> on;
};

struct ResolvedLink {
  std::string name;
  int input = 0;
  std::vector<std::pair<std::string, std::string>> on;
};

struct ResolvedSpec {
  std::string id;  // catalog id for nested worksheets, empty for the root
  ValidatedSpec validated;
  std::vector<ResolvedInput> inputs;
  std::vector<ResolvedJoin> joins;
  std::vector<ResolvedLink> links;
  std::vector<SourceAttr> attributes;
  std::map<std::string, Value> parameters;

  const WorksheetSpec& spec() const { return validated.spec; }
  const SourceAttr* FindAttribute(const std::string& id) const;
  // Unqualified lookup over the primary and joined inputs.
  std::vector<const SourceAttr*> LookupAttribute(const std::string& name) const;
  // Qualified lookup: scope is an input alias or a link name.
  const SourceAttr* LookupAttribute(const std::string& scope,
                                    const std::string& name) const;
};

// Visible output schema of a nested worksheet, supplied by the compiler so
// that resolution does not depend on it.
struct OutputInfo {
  std::vector<Attribute> columns;
  std::vector<std::vector<std::string>> unique_keys;
};
using OutputSchemaFn = std::function<OutputInfo(const ResolvedSpec&)>;

ResolvedSpec ResolveInputs(const ValidatedSpec& spec, const Catalog& catalog,
                           const std::map<std::string, Value>& bindings,
                           const OutputSchemaFn& output_schema,
                           const std::string& root_id = "");

// Coerces an untyped JSON-sourced value to `type`; throws SchemaError.
Value CoerceValue(const Value& v, ScalarType type);

}  // namespace sheetc::spec

#endif  // SHEETC_SPEC_RESOLVE_H_
