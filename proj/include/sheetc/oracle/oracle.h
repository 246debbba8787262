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

#ifndef SHEETC_ORACLE_ORACLE_H_
#define SHEETC_ORACLE_ORACLE_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sheetc/common/value.h"
#include "sheetc/spec/resolve.h"
#include "sheetc/walg/walg.h"

namespace sheetc::oracle {

// Flat, row-major result or input table.
struct Table {
  std::vector<spec::Attribute> columns;
  std::vector<std::vector<Value>> rows;

  int ColumnIndex(const std::string& name) const;
};

// Raw rows of a table, SQL or CSV input. Worksheet inputs are evaluated by
// the oracle itself.
using DataFn = std::function<Table(const spec::ResolvedInput& input)>;

struct Record {
  std::map<std::string, Value> attrs;
  int parent = -1;
  std::vector<int> children;
  bool alive = true;
};

struct LevelData {
  bool formed = false;
  std::vector<Record> records;
};

// One nesting depth per worksheet level. Level 0 holds the source rows.
struct NestedRelation {
  std::shared_ptr<const spec::ResolvedSpec> spec;
  std::vector<LevelData> levels;
};

// Joins the primary input with the joined and linked inputs.
Table SourceRelation(const spec::ResolvedSpec& spec, const DataFn& data);

// Interprets the ops of `plan` literally over the nested relation built from
// `source`.
NestedRelation Evaluate(const walg::Plan& plan, const Table& source);

// One row per live record of the grain level, sorted by the layout's sort
// keys; `page` restricts the rows when set.
Table Flatten(NestedRelation& nested, const walg::Plan& plan,
              const std::optional<spec::PageSpec>& page);

// Full pipeline over an unoptimized plan built from the spec.
Table Run(std::shared_ptr<const spec::ResolvedSpec> spec, const DataFn& data,
          bool apply_page = true);

struct Mismatch {
  size_t row = 0;
  std::string column;
  std::string expected;
  std::string actual;
};

struct Report {
  bool ok = true;
  std::string summary;
  std::vector<Mismatch> mismatches;  // first 10
};

// Canonical sort of both tables by every column, then cell-wise comparison
// (Numbers with relative tolerance 1e-9). Throws SchemaMismatch when the
// column names differ.
Report Compare(const Table& expected, const Table& actual);

}  // namespace sheetc::oracle

#endif  // SHEETC_ORACLE_ORACLE_H_
