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

#ifndef SHEETC_SPEC_SPEC_H_
#define SHEETC_SPEC_SPEC_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sheetc/common/value.h"

namespace sheetc::spec {

struct Attribute {
  std::string name;
  ScalarType type = ScalarType::kText;
};

struct InputSource {
  enum class Kind { kTable, kSql, kWorksheet, kCsv };
  std::string alias;
  Kind kind = Kind::kTable;
  // Table name (kTable, kCsv), SQL text (kSql) or worksheet id (kWorksheet).
  std::string ref;
  // kCsv only: file path, loaded into table `ref`.
  std::string csv_path;
  // Declared schema; required for kSql, filled from the catalog otherwise.
  std::vector<Attribute> schema;
  std::vector<std::string> primary_key;
  std::vector<std::vector<std::string>> unique_keys;
  // kWorksheet only: parameter bindings for the nested worksheet.
  std::map<std::string, Value> bindings;
};

// kSemi and kAnti parse but are rejected by the compiler.
enum class JoinType { kInner, kLeft, kRight, kFull, kSemi, kAnti };

struct JoinSpec {
  std::string input;  // alias of a non-primary input
  JoinType type = JoinType::kInner;
  // (left attribute, right attribute); the left side may be qualified as
  // "alias/attr" when ambiguous.
  std::vector<std::pair<std::string, std::string>> on;
};

struct LinkSpec {
  std::string name;
  std::string input;  // alias of a non-primary, non-joined input
  std::vector<std::string> local_keys;
  std::vector<std::string> remote_keys;
};

enum class Direction { kAsc, kDesc };

struct OrderItem {
  std::string column;
  Direction direction = Direction::kAsc;
};

struct LevelSpec {
  std::vector<std::string> keys;
  std::vector<OrderItem> ordering;
  bool collapsed = false;
};

struct ColumnSpec {
  std::string name;
  std::string formula;
  int level = 0;
  bool hidden = false;
  std::string format;
};

enum class FilterKind {
  kIncludeList,
  kExcludeList,
  kRange,
  kTextMatch,
  kTopN,
  kCustomPredicate,
};

struct FilterSpec {
  FilterKind kind = FilterKind::kIncludeList;
  std::string column;     // every kind except kCustomPredicate
  std::string predicate;  // kCustomPredicate
  std::vector<Value> values;
  std::optional<Value> low;
  std::optional<Value> high;
  std::string pattern;
  int64_t limit = 0;
  Direction direction = Direction::kDesc;
};

struct ParameterSpec {
  std::string name;
  ScalarType type = ScalarType::kNumber;
  std::optional<Value> default_value;
};

struct PageSpec {
  int64_t limit = 1000;
  int64_t offset = 0;
};

struct WorksheetSpec {
  std::vector<InputSource> inputs;
  std::vector<JoinSpec> joins;
  std::vector<LinkSpec> links;
  std::vector<LevelSpec> levels;
  // Declaration order is significant.
  std::vector<ColumnSpec> columns;
  std::vector<FilterSpec> filters;
  std::vector<ParameterSpec> parameters;
  std::optional<PageSpec> page;

  const ColumnSpec* FindColumn(std::string_view name) const;
  int totals() const { return static_cast<int>(levels.size()) - 1; }
};

std::string_view FilterKindName(FilterKind kind);
std::string_view JoinTypeName(JoinType type);

// Throws SyntaxError on malformed JSON and SchemaError on structural problems.
WorksheetSpec ParseSpec(std::string_view json_text);
WorksheetSpec SpecFromJson(const nlohmann::ordered_json& doc);
nlohmann::ordered_json SpecToJson(const WorksheetSpec& spec);
std::string SerializeSpec(const WorksheetSpec& spec);

// Value <-> JSON with a declared type (Dates travel as ISO strings).
Value ValueFromJson(const nlohmann::ordered_json& v, ScalarType type);
Value ValueFromJsonUntyped(const nlohmann::ordered_json& v);
nlohmann::ordered_json ValueToJson(const Value& v);

}  // namespace sheetc::spec

#endif  // SHEETC_SPEC_SPEC_H_
