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

#ifndef SHEETC_RUNNER_SQLITE_DB_H_
#define SHEETC_RUNNER_SQLITE_DB_H_

#include <atomic>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "sheetc/oracle/oracle.h"
#include "sheetc/spec/spec.h"

struct sqlite3;

namespace sheetc::runner {

// SQLite connection executing ansi-dialect SQL. Numbers are stored as REAL,
// Dates as ISO text and Logicals as 0/1.
class Database {
 public:
  explicit Database(const std::string& path = ":memory:");
  ~Database();
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;

  // Replaces table `name` with the rows of `table`.
  void LoadTable(const std::string& name, const oracle::Table& table);
  // Rows of `sql` converted to the given column types. Throws Cancelled when
  // interrupted or `cancel` becomes true, ExecutionError for engine errors.
  oracle::Table Query(const std::string& sql, const std::vector<spec::Attribute>& columns,
                      const std::atomic<bool>* cancel = nullptr);
  void Exec(const std::string& sql);
  // Aborts the statement running on another thread, if any.
  void Interrupt();

  // Whether `sql` prepares as exactly one statement with an empty tail.
  bool IsSingleStatement(const std::string& sql, std::string* error = nullptr);

  // Tables in the database with column types inferred from declared types.
  spec::Catalog ReadCatalog();

 private:
  sqlite3* db_ = nullptr;
  std::mutex mu_;
};

// Catalog entries and data for fixture-style tables.
void LoadTables(Database& db, const std::map<std::string, oracle::Table>& tables);

}  // namespace sheetc::runner

#endif  // SHEETC_RUNNER_SQLITE_DB_H_
