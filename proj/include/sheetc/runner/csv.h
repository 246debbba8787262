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

#ifndef SHEETC_RUNNER_CSV_H_
#define SHEETC_RUNNER_CSV_H_

#include <string>
#include <vector>

#include "sheetc/oracle/oracle.h"
#include "sheetc/runner/sqlite_db.h"

namespace sheetc::runner {

// RFC 4180 records. Throws IOError naming the line of a ragged or
// unterminated record.
std::vector<std::vector<std::string>> ParseCsv(const std::string& text);

// Header plus typed rows. Each column is Number when every non-empty cell
// parses as a number, else Date when every one is ISO `YYYY-MM-DD`, else
// Text. Empty cells are NULL. A declared type that the cells do not fit
// throws InferenceConflict naming the column.
oracle::Table CsvToTable(const std::string& text,
                         const std::vector<spec::Attribute>& declared = {});

// Reads `path`, creates table `name` and returns its schema.
spec::TableInfo LoadCsv(Database& db, const std::string& path, const std::string& name,
                        const std::vector<spec::Attribute>& declared = {});

}  // namespace sheetc::runner

#endif  // SHEETC_RUNNER_CSV_H_
