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

#include "sheetc/runner/csv.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sheetc/common/errors.h"

namespace sheetc::runner {

std::vector<std::vector<std::string>> ParseCsv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, in_record = false;
  int line = 1, record_line = 1;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    if (!out.empty() && record.size() != out[0].size()) {
      throw IOError("line " + std::to_string(record_line) + ": expected " +
                    std::to_string(out[0].size()) + " fields, got " +
                    std::to_string(record.size()));
    }
    out.push_back(std::move(record));
    record.clear();
    in_record = false;
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (!in_record) {
      in_record = true;
      record_line = line;
    }
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      if (record.empty() && field.empty()) {
        in_record = false;
      } else {
        end_record();
      }
      ++line;
    } else {
      field += c;
    }
  }
  if (quoted) throw IOError("line " + std::to_string(record_line) + ": unterminated quoted field");
  if (in_record) end_record();
  return out;
}

namespace {

bool IsNumber(const std::string& s) {
  if (s.empty() || std::isspace(static_cast<unsigned char>(s[0]))) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool Fits(ScalarType t, const std::string& cell) {
  switch (t) {
    case ScalarType::kNumber:
      return IsNumber(cell);
    case ScalarType::kDate:
      return ParseIsoDate(cell).has_value();
    case ScalarType::kLogical:
      return cell == "true" || cell == "false" || cell == "TRUE" || cell == "FALSE";
    default:
      return true;
  }
}

Value Convert(ScalarType t, const std::string& cell) {
  if (cell.empty()) return Value{};
  switch (t) {
    case ScalarType::kNumber:
      return std::strtod(cell.c_str(), nullptr);
    case ScalarType::kDate:
      return *ParseIsoDate(cell);
    case ScalarType::kLogical:
      return cell == "true" || cell == "TRUE";
    default:
      return cell;
  }
}

}  // namespace

oracle::Table CsvToTable(const std::string& text, const std::vector<spec::Attribute>& declared) {
  auto records = ParseCsv(text);
  if (records.empty()) throw IOError("CSV has no header row");
  oracle::Table out;
  const auto& header = records[0];
  for (size_t c = 0; c < header.size(); ++c) {
    const spec::Attribute* decl = nullptr;
    for (const auto& a : declared) {
      if (a.name == header[c]) decl = &a;
    }
    bool any = false, numbers = true, dates = true;
    for (size_t r = 1; r < records.size(); ++r) {
      const std::string& cell = records[r][c];
      if (cell.empty()) continue;
      any = true;
      numbers = numbers && IsNumber(cell);
      dates = dates && ParseIsoDate(cell).has_value();
      if (decl && !Fits(decl->type, cell)) {
        throw InferenceConflict("column `" + header[c] + "` is declared " +
                                std::string(ScalarTypeName(decl->type)) + " but row " +
                                std::to_string(r + 1) + " holds \"" + cell + "\"");
      }
    }
    ScalarType t = !any ? ScalarType::kText
                        : numbers ? ScalarType::kNumber
                                  : dates ? ScalarType::kDate : ScalarType::kText;
    if (decl) t = decl->type;
    out.columns.push_back({header[c], t});
  }
  for (size_t r = 1; r < records.size(); ++r) {
    std::vector<Value> row;
    for (size_t c = 0; c < header.size(); ++c) row.push_back(Convert(out.columns[c].type, records[r][c]));
    out.rows.push_back(std::move(row));
  }
  return out;
}

spec::TableInfo LoadCsv(Database& db, const std::string& path, const std::string& name,
                        const std::vector<spec::Attribute>& declared) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  oracle::Table t = CsvToTable(buf.str(), declared);
  db.LoadTable(name, t);
  spec::TableInfo info;
  info.name = name;
  info.columns = t.columns;
  return info;
}

}  // namespace sheetc::runner
