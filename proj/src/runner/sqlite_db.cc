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

#include "sheetc/runner/sqlite_db.h"

#include <sqlite3.h>

#include <cctype>

#include "sheetc/common/errors.h"

namespace sheetc::runner {

namespace {

std::string DeclaredType(ScalarType t) {
  switch (t) {
    case ScalarType::kNumber:
      return "REAL";
    case ScalarType::kDate:
      return "DATE TEXT";
    case ScalarType::kLogical:
      return "LOGICAL INT";
    default:
      return "TEXT";
  }
}

ScalarType FromDeclared(std::string decl) {
  for (char& c : decl) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (decl.rfind("DATE", 0) == 0) return ScalarType::kDate;
  if (decl.rfind("LOGICAL", 0) == 0 || decl.rfind("BOOL", 0) == 0) return ScalarType::kLogical;
  for (const char* n : {"REAL", "INT", "NUM", "DOUB", "FLOA", "DEC"}) {
    if (decl.find(n) != std::string::npos) return ScalarType::kNumber;
  }
  return ScalarType::kText;
}

std::string Quote(const std::string& name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Stmt {
  sqlite3_stmt* s = nullptr;
  ~Stmt() { sqlite3_finalize(s); }
};

Value ReadCell(sqlite3_stmt* s, int i, ScalarType type) {
  int t = sqlite3_column_type(s, i);
  if (t == SQLITE_NULL) return Value{};
  switch (type) {
    case ScalarType::kNumber:
      if (t == SQLITE_TEXT) throw ExecutionError("text value in a Number column");
      return sqlite3_column_double(s, i);
    case ScalarType::kLogical:
      return sqlite3_column_int64(s, i) != 0;
    case ScalarType::kDate: {
      std::string text(reinterpret_cast<const char*>(sqlite3_column_text(s, i)));
      auto d = ParseIsoDate(text);
      if (!d) throw ExecutionError("not a date: " + text);
      return *d;
    }
    default:
      return std::string(reinterpret_cast<const char*>(sqlite3_column_text(s, i)));
  }
}

}  // namespace

Database::Database(const std::string& path) {
  if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    db_ = nullptr;
    throw IOError("cannot open database " + path + ": " + msg);
  }
  Exec("PRAGMA case_sensitive_like = ON");
}

Database::~Database() { sqlite3_close(db_); }

void Database::Exec(const std::string& sql) {
  std::lock_guard<std::mutex> lock(mu_);
  char* err = nullptr;
  if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw ExecutionError(msg);
  }
}

void Database::LoadTable(const std::string& name, const oracle::Table& table) {
  std::string cols;
  for (const auto& c : table.columns) {
    cols += (cols.empty() ? "" : ", ") + Quote(c.name) + " " + DeclaredType(c.type);
  }
  Exec("DROP TABLE IF EXISTS " + Quote(name));
  Exec("CREATE TABLE " + Quote(name) + " (" + cols + ")");
  std::string marks;
  for (size_t i = 0; i < table.columns.size(); ++i) marks += i ? ", ?" : "?";
  std::lock_guard<std::mutex> lock(mu_);
  sqlite3_exec(db_, "BEGIN", nullptr, nullptr, nullptr);
  Stmt st;
  std::string sql = "INSERT INTO " + Quote(name) + " VALUES (" + marks + ")";
  if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &st.s, nullptr) != SQLITE_OK) {
    throw ExecutionError(sqlite3_errmsg(db_));
  }
  for (const auto& row : table.rows) {
    sqlite3_reset(st.s);
    for (size_t i = 0; i < row.size(); ++i) {
      int k = static_cast<int>(i) + 1;
      const Value& v = row[i];
      switch (v.index()) {
        case 0:
          sqlite3_bind_null(st.s, k);
          break;
        case 1:
          sqlite3_bind_int(st.s, k, std::get<bool>(v) ? 1 : 0);
          break;
        case 2:
          sqlite3_bind_double(st.s, k, std::get<double>(v));
          break;
        case 3:
          sqlite3_bind_text(st.s, k, std::get<std::string>(v).c_str(), -1, SQLITE_TRANSIENT);
          break;
        case 4:
          sqlite3_bind_text(st.s, k, FormatIsoDate(std::get<Date>(v)).c_str(), -1,
                            SQLITE_TRANSIENT);
          break;
      }
    }
    if (sqlite3_step(st.s) != SQLITE_DONE) throw ExecutionError(sqlite3_errmsg(db_));
  }
  sqlite3_exec(db_, "COMMIT", nullptr, nullptr, nullptr);
}

oracle::Table Database::Query(const std::string& sql, const std::vector<spec::Attribute>& columns,
                              const std::atomic<bool>* cancel) {
  std::lock_guard<std::mutex> lock(mu_);
  if (cancel && cancel->load()) throw Cancelled("query cancelled");
  struct Handler {
    sqlite3* db;
    ~Handler() { sqlite3_progress_handler(db, 0, nullptr, nullptr); }
  } handler{db_};
  if (cancel) {
    sqlite3_progress_handler(
        db_, 1000,
        [](void* flag) { return static_cast<const std::atomic<bool>*>(flag)->load() ? 1 : 0; },
        const_cast<std::atomic<bool>*>(cancel));
  }
  Stmt st;
  if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &st.s, nullptr) != SQLITE_OK) {
    throw ExecutionError(sqlite3_errmsg(db_));
  }
  int n = sqlite3_column_count(st.s);
  if (n != static_cast<int>(columns.size())) {
    throw ExecutionError("query returned " + std::to_string(n) + " columns, expected " +
                         std::to_string(columns.size()));
  }
  oracle::Table out;
  out.columns = columns;
  while (true) {
    int rc = sqlite3_step(st.s);
    if (rc == SQLITE_DONE) break;
    if (rc == SQLITE_INTERRUPT || (cancel && cancel->load())) throw Cancelled("query cancelled");
    if (rc != SQLITE_ROW) throw ExecutionError(sqlite3_errmsg(db_));
    std::vector<Value> row;
    row.reserve(columns.size());
    for (int i = 0; i < n; ++i) row.push_back(ReadCell(st.s, i, columns[i].type));
    out.rows.push_back(std::move(row));
  }
  return out;
}

void Database::Interrupt() { sqlite3_interrupt(db_); }

bool Database::IsSingleStatement(const std::string& sql, std::string* error) {
  std::lock_guard<std::mutex> lock(mu_);
  Stmt st;
  const char* tail = nullptr;
  if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &st.s, &tail) != SQLITE_OK) {
    if (error) *error = sqlite3_errmsg(db_);
    return false;
  }
  if (!st.s) {
    if (error) *error = "no statement";
    return false;
  }
  while (tail && std::isspace(static_cast<unsigned char>(*tail))) ++tail;
  if (tail && *tail) {
    if (error) *error = "trailing text after the statement";
    return false;
  }
  return true;
}

spec::Catalog Database::ReadCatalog() {
  spec::Catalog catalog;
  std::vector<std::string> names;
  {
    oracle::Table t = Query("SELECT name FROM sqlite_master WHERE type = 'table' ORDER BY name",
                            {{"name", ScalarType::kText}});
    for (const auto& r : t.rows) names.push_back(std::get<std::string>(r[0]));
  }
  for (const std::string& name : names) {
    oracle::Table cols = Query("SELECT name, type FROM pragma_table_info(" +
                                   std::string("'") + name + "') ORDER BY cid",
                               {{"name", ScalarType::kText}, {"type", ScalarType::kText}});
    spec::TableInfo info;
    info.name = name;
    for (const auto& r : cols.rows) {
      std::string decl = IsNull(r[1]) ? "" : std::get<std::string>(r[1]);
      info.columns.push_back({std::get<std::string>(r[0]), FromDeclared(decl)});
    }
    catalog.AddTable(std::move(info));
  }
  return catalog;
}

void LoadTables(Database& db, const std::map<std::string, oracle::Table>& tables) {
  for (const auto& [name, table] : tables) db.LoadTable(name, table);
}

}  // namespace sheetc::runner
