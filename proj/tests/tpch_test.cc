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
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "sheetc/bench/tpch.h"
#include "sheetc/common/errors.h"
#include "sheetc/compiler/compiler.h"
#include "sheetc/compiler/resolve.h"
#include "sheetc/oracle/fixture.h"
#include "sheetc/runner/engine.h"
#include "sheetc/spec/spec.h"

namespace sheetc {
namespace {

namespace fs = std::filesystem;

struct Query {
  std::string name;
  std::string expect;
  spec::WorksheetSpec spec;
};

std::vector<Query> LoadQueries() {
  std::vector<Query> out;
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(std::string(SHEETC_SOURCE_DIR) + "/fixtures/tpch")) {
    paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const fs::path& p : paths) {
    auto doc = nlohmann::ordered_json::parse(std::ifstream(p));
    out.push_back({doc.at("name"), doc.at("expect"), spec::SpecFromJson(doc.at("spec"))});
  }
  return out;
}

TEST(Tpch, QueriesMatchOracleOrAreRejected) {
  auto tables = bench::GenerateTpch(3000);
  runner::Database db;
  runner::LoadTables(db, tables);
  spec::Catalog catalog = db.ReadCatalog();
  int compiled = 0;
  for (const Query& q : LoadQueries()) {
    SCOPED_TRACE(q.name);
    if (q.expect == "unsupported") {
      EXPECT_THROW(Compile(Resolve(q.spec, catalog, {})), UnsupportedQuery);
      continue;
    }
    auto resolved = Resolve(q.spec, catalog, {});
    Compiled c = Compile(resolved);
    ++compiled;
    std::string err;
    EXPECT_TRUE(db.IsSingleStatement(c.sql.text, &err)) << err;
    oracle::Table expected = oracle::Run(resolved, oracle::TableData(tables));
    oracle::Table actual = runner::Execute(db, c);
    EXPECT_FALSE(expected.rows.empty());
    oracle::Report r = oracle::Compare(expected, actual);
    EXPECT_TRUE(r.ok) << r.summary << "\n" << c.sql.text;
  }
  EXPECT_EQ(compiled, 4);
}

TEST(Tpch, GeneratorIsDeterministic) {
  auto a = bench::GenerateTpch(50, 7), b = bench::GenerateTpch(50, 7);
  ASSERT_EQ(a.at("lineitem").rows.size(), b.at("lineitem").rows.size());
  for (size_t i = 0; i < a.at("lineitem").rows.size(); ++i) {
    EXPECT_TRUE(a.at("lineitem").rows[i] == b.at("lineitem").rows[i]);
  }
}

}  // namespace
}  // namespace sheetc
