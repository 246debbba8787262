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

#include "sheetc/common/errors.h"
#include "sheetc/compiler/compiler.h"
#include "sheetc/compiler/resolve.h"
#include "sheetc/oracle/fixture.h"
#include "sheetc/runner/engine.h"

namespace sheetc {
namespace {

const std::string kCorpus = std::string(SHEETC_SOURCE_DIR) + "/fixtures/corpus";

std::string Describe(const oracle::Report& r) {
  std::string s = r.summary;
  for (const oracle::Mismatch& m : r.mismatches) {
    s += "\n  row " + std::to_string(m.row) + " " + m.column + ": expected " + m.expected +
         ", got " + m.actual;
  }
  return s;
}

TEST(EngineTest, CorpusMatchesOracle) {
  for (const oracle::Fixture& f : oracle::LoadFixtures(kCorpus)) {
    SCOPED_TRACE(f.name);
    auto spec = Resolve(f.spec, f.catalog, f.bindings);
    oracle::Table expected = oracle::Run(spec, oracle::TableData(f.tables));
    runner::Database db;
    runner::LoadTables(db, f.tables);
    Compiled c = Compile(spec);
    oracle::Table actual;
    try {
      actual = runner::Execute(db, c);
    } catch (const Error& e) {
      ADD_FAILURE() << e.what() << "\n" << c.sql.text;
      continue;
    }
    oracle::Report r = oracle::Compare(expected, actual);
    EXPECT_TRUE(r.ok) << Describe(r) << "\n" << c.sql.text;
  }
}

}  // namespace
}  // namespace sheetc
