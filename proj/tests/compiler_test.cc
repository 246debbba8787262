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

#include "sheetc/calc/calc_graph.h"
#include "sheetc/common/errors.h"
#include "sheetc/compiler/compiler.h"
#include "sheetc/compiler/resolve.h"
#include "sheetc/oracle/fixture.h"
#include "sheetc/spec/spec.h"

namespace sheetc {
namespace {

using Json = nlohmann::ordered_json;

spec::Catalog SalesCatalog() {
  return spec::Catalog::FromJson(Json::parse(R"j({"tables": [{"name": "sales", "columns": [
      {"name": "region", "type": "Text"}, {"name": "product", "type": "Text"},
      {"name": "units", "type": "Number"}, {"name": "day", "type": "Date"}]},
    {"name": "regions", "columns": [{"name": "code", "type": "Text"},
      {"name": "boss", "type": "Text"}], "unique_keys": [["code"]]}]})j"));
}

Json Base() {
  return Json::parse(R"j({
    "inputs": [{"alias": "s", "table": "sales"}],
    "levels": [{"keys": []}, {"keys": ["region"]}, {"keys": []}],
    "columns": {"region": {"formula": "[s/region]", "level": 0},
                "units": {"formula": "[units]", "level": 0},
                "total": {"formula": "Sum([units])", "level": 1}}})j");
}

Compiled CompileJson(const Json& j, CompileOptions options = {},
                     std::map<std::string, Value> bindings = {}) {
  return Compile(Resolve(spec::SpecFromJson(j), SalesCatalog(), bindings), options);
}

TEST(SpecTest, RejectsMalformedDocuments) {
  Json j = Base();
  j["colums"] = Json::object();
  EXPECT_THROW(spec::SpecFromJson(j), SchemaError);
  j = Base();
  j["levels"][1]["keys"].push_back("nope");
  EXPECT_THROW(CompileJson(j), Error);
  j = Base();
  j["levels"][2]["keys"] = {"region"};
  EXPECT_THROW(CompileJson(j), ValidationError);
  j = Base();
  j["filters"] = {{{"kind", "range"}, {"column", "missing"}, {"low", 1}}};
  EXPECT_THROW(spec::SpecFromJson(j), SchemaError);
  j = Base();
  j["inputs"][0]["table"] = "nowhere";
  EXPECT_THROW(CompileJson(j), UnknownReference);
}

TEST(SpecTest, LinksNeedUniqueRemoteKeys) {
  Json j = Base();
  j["inputs"].push_back({{"alias", "r"}, {"table", "regions"}});
  j["links"] = {{{"name", "R"}, {"input", "r"}, {"local_keys", {"region"}},
                 {"remote_keys", {"boss"}}}};
  EXPECT_THROW(CompileJson(j), Error);
  j["links"][0]["remote_keys"] = {"code"};
  j["columns"]["boss"] = {{"formula", "[R/boss]"}, {"level", 0}};
  EXPECT_NO_THROW(CompileJson(j));
}

TEST(SpecTest, ParametersNeedABindingOrDefault) {
  Json j = Base();
  j["parameters"] = {{"floor", {{"type", "Number"}}}};
  j["columns"]["big"] = {{"formula", "[units] > [floor]"}, {"level", 0}};
  EXPECT_THROW(CompileJson(j), MissingBinding);
  Compiled c = CompileJson(j, {}, {{"floor", 3.0}});
  EXPECT_NE(c.sql.text.find("> 3"), std::string::npos) << c.sql.text;
}

TEST(CalcGraphTest, CyclesBecomeErrors) {
  Json j = Base();
  j["columns"]["a"] = {{"formula", "[b] + 1"}, {"level", 0}};
  j["columns"]["b"] = {{"formula", "[a] + 1"}, {"level", 0}};
  j["columns"]["c"] = {{"formula", "[a] + [units]"}, {"level", 0}};
  Compiled c = CompileJson(j);
  EXPECT_TRUE(c.graph->column("a").in_cycle);
  EXPECT_TRUE(c.graph->column("b").in_cycle);
  EXPECT_FALSE(c.graph->column("c").in_cycle);
  EXPECT_TRUE(c.graph->column("c").expr.is_error());
  EXPECT_FALSE(c.graph->column("total").expr.is_error());
  EXPECT_EQ(c.diagnostics.size(), 2u);
}

TEST(CalcGraphTest, DeadCodeKeepsFilterInputs) {
  Json j = Base();
  j["columns"]["unused"] = {{"formula", "[units] * 2"}, {"level", 0}, {"hidden", true}};
  j["columns"]["gate"] = {{"formula", "[units] + 1"}, {"level", 0}, {"hidden", true}};
  j["filters"] = {{{"kind", "range"}, {"column", "gate"}, {"low", 2}}};
  Compiled c = CompileJson(j);
  EXPECT_FALSE(c.graph->column("unused").live);
  EXPECT_TRUE(c.graph->column("gate").live);
  EXPECT_EQ(c.sql.text.find("\"unused\""), std::string::npos);
  CompileOptions keep;
  keep.dead_code_elimination = false;
  EXPECT_TRUE(CompileJson(j, keep).graph->column("unused").live);
  EXPECT_NE(GraphToDot(*c.graph).find("digraph"), std::string::npos);
}

TEST(WalgTest, FilterPrecedesLaterAggregates) {
  oracle::Fixture f =
      oracle::LoadFixture(std::string(SHEETC_SOURCE_DIR) + "/fixtures/corpus/07_filter_propagation.json");
  Compiled c = Compile(Resolve(f.spec, f.catalog, f.bindings));
  std::string w = walg::ExplainWalg(c.walg);
  size_t select = w.find("Select L1");
  ASSERT_NE(select, std::string::npos) << w;
  EXPECT_LT(w.find("product_rev := Sum"), select);
  EXPECT_GT(w.find("category_rev := Sum"), select);
  EXPECT_GT(w.find("grand := Sum"), select);
}

TEST(WalgTest, MergeFusesSameLevelJoins) {
  Json j = Base();
  j["columns"]["hi"] = {{"formula", "Max([units])"}, {"level", 1}};
  j["columns"]["lo"] = {{"formula", "Min([units])"}, {"level", 1}};
  auto joins = [](const walg::Plan& p) {
    int n = 0;
    for (const walg::Op& op : p.ops) n += op.kind == walg::Op::Kind::kJoin;
    return n;
  };
  EXPECT_EQ(joins(CompileJson(j).walg), 1);
  CompileOptions off;
  off.walg.join_merge = false;
  EXPECT_EQ(joins(CompileJson(j, off).walg), 3);
}

TEST(RelalgTest, ExplainCountsOperators) {
  Compiled c = CompileJson(Base());
  int ops = relalg::OperatorCount(c.rel);
  EXPECT_GT(ops, 2);
  std::string text = relalg::ExplainRel(c.rel);
  EXPECT_NE(text.find("operators: " + std::to_string(ops)), std::string::npos) << text;
  EXPECT_EQ(relalg::AggregateJoinCount(c.rel), 1);
}

TEST(RelalgTest, UnsupportedJoinTypes) {
  for (const char* type : {"semi", "anti"}) {
    Json j = Base();
    j["inputs"].push_back({{"alias", "r"}, {"table", "regions"}});
    j["joins"] = {{{"input", "r"}, {"type", type}, {"on", Json::array({Json::array({"region", "code"})})}}};
    EXPECT_THROW(CompileJson(j), UnsupportedQuery) << type;
  }
}

Json Joined(const char* type) {
  Json j = Base();
  j["inputs"].push_back({{"alias", "r"}, {"table", "regions"}});
  j["joins"] = {{{"input", "r"}, {"type", type}, {"on", Json::array({Json::array({"region", "code"})})}}};
  j["columns"]["region"]["formula"] = "Coalesce([s/region], [code])";
  return j;
}

TEST(SqlgenTest, JoinsFollowDialectSupport) {
  CompileOptions pg;
  pg.dialect = "postgres";
  EXPECT_NE(CompileJson(Joined("right"), pg).sql.text.find("RIGHT JOIN"), std::string::npos);
  EXPECT_NE(CompileJson(Joined("full"), pg).sql.text.find("FULL JOIN"), std::string::npos);
  std::string ansi_right = CompileJson(Joined("right")).sql.text;
  EXPECT_EQ(ansi_right.find("RIGHT JOIN"), std::string::npos);
  std::string ansi_full = CompileJson(Joined("full")).sql.text;
  EXPECT_NE(ansi_full.find("UNION ALL"), std::string::npos);
  EXPECT_NE(ansi_full.find("NOT EXISTS"), std::string::npos);
}

TEST(SqlgenTest, NullSafeKeyEquality) {
  auto text = [](const char* d) {
    CompileOptions o;
    o.dialect = d;
    return CompileJson(Base(), o).sql.text;
  };
  EXPECT_NE(text("ansi").find(" IS "), std::string::npos);
  EXPECT_NE(text("postgres").find("IS NOT DISTINCT FROM"), std::string::npos);
  EXPECT_NE(text("redshift").find("IS NULL AND"), std::string::npos);
  EXPECT_NE(text("bigquery").find("`region`"), std::string::npos);
}

TEST(SqlgenTest, DateFunctionsPerDialect) {
  Json j = Base();
  j["columns"]["m"] = {{"formula", "DateTrunc(\"month\", [day])"}, {"level", 0}};
  j["columns"]["age"] = {{"formula", "DateDiff(\"month\", [day], Date(\"2024-06-01\"))"}, {"level", 0}};
  CompileOptions o;
  EXPECT_NE(CompileJson(j, o).sql.text.find("date("), std::string::npos);
  o.dialect = "bigquery";
  std::string bq = CompileJson(j, o).sql.text;
  EXPECT_NE(bq.find("DATE_TRUNC("), std::string::npos);
  EXPECT_NE(bq.find("DATE_DIFF("), std::string::npos);
  o.dialect = "snowflake";
  EXPECT_NE(CompileJson(j, o).sql.text.find("DATEDIFF("), std::string::npos);
}

TEST(SqlgenTest, CtesCanBeTurnedOff) {
  oracle::Fixture f =
      oracle::LoadFixture(std::string(SHEETC_SOURCE_DIR) + "/fixtures/corpus/02_cohort.json");
  auto spec = Resolve(f.spec, f.catalog, f.bindings);
  Compiled with = Compile(spec);
  CompileOptions no;
  no.ctes = false;
  Compiled without = Compile(spec, no);
  EXPECT_GT(with.sql.cte_count, 0);
  EXPECT_EQ(with.sql.text.rfind("WITH ", 0), 0u);
  EXPECT_EQ(without.sql.cte_count, 0);
  EXPECT_EQ(without.sql.text.find("WITH "), std::string::npos);
}

}  // namespace
}  // namespace sheetc
