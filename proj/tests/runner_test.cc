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

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include "httplib.h"
#include "sheetc/common/errors.h"
#include "sheetc/runner/csv.h"
#include "sheetc/runner/http.h"
#include "sheetc/runner/service.h"

namespace sheetc::runner {
namespace {

using Json = nlohmann::ordered_json;

TEST(Csv, ParsesQuotedFields) {
  auto rows = ParseCsv("a,b\n\"x,1\",\"say \"\"hi\"\"\"\n\n\"multi\nline\",2\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "x,1");
  EXPECT_EQ(rows[1][1], "say \"hi\"");
  EXPECT_EQ(rows[2][0], "multi\nline");
}

TEST(Csv, RaggedRowNamesLine) {
  try {
    ParseCsv("a,b\n1,2\n3\n");
    FAIL();
  } catch (const IOError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ParseCsv("a\n\"open\n"), IOError);
}

TEST(Csv, InfersColumnTypes) {
  oracle::Table t = CsvToTable("n,d,s\n1.5,2024-01-02,x\n,2024-02-30,\n-3,,7\n");
  ASSERT_EQ(t.columns.size(), 3u);
  EXPECT_EQ(t.columns[0].type, ScalarType::kNumber);
  EXPECT_EQ(t.columns[2].type, ScalarType::kText);
  EXPECT_TRUE(IsNull(t.rows[1][0]));
  EXPECT_EQ(std::get<std::string>(t.rows[2][2]), "7");
  oracle::Table only = CsvToTable("a,b\n");
  EXPECT_EQ(only.columns[1].type, ScalarType::kText);
  EXPECT_TRUE(only.rows.empty());
}

TEST(Csv, DeclaredMismatchIsInferenceConflict) {
  try {
    CsvToTable("a,b\n1,x\n", {{"b", ScalarType::kNumber}});
    FAIL();
  } catch (const InferenceConflict& e) {
    EXPECT_NE(std::string(e.what()).find("b"), std::string::npos);
  }
  oracle::Table t = CsvToTable("a\n1\n", {{"a", ScalarType::kText}});
  EXPECT_EQ(t.columns[0].type, ScalarType::kText);
}

TEST(Csv, LoadsIntoDatabase) {
  auto path = std::filesystem::temp_directory_path() / "sheetc_runner_test.csv";
  std::ofstream(path) << "k,v\na,1\nb,2\n";
  Database db;
  spec::TableInfo info = LoadCsv(db, path.string(), "t");
  EXPECT_EQ(info.columns.size(), 2u);
  oracle::Table r = db.Query("SELECT SUM(v) FROM t", {{"s", ScalarType::kNumber}});
  EXPECT_EQ(std::get<double>(r.rows[0][0]), 3.0);
  std::filesystem::remove(path);
}

oracle::Table Numbers(int n) {
  oracle::Table t;
  t.columns = {{"g", ScalarType::kText}, {"x", ScalarType::kNumber}};
  for (int i = 0; i < n; ++i) {
    t.rows.push_back({std::string(i % 2 ? "odd" : "even"), static_cast<double>(i)});
  }
  return t;
}

std::shared_ptr<Database> NumbersDb(int n) {
  auto db = std::make_shared<Database>();
  db->LoadTable("nums", Numbers(n));
  return db;
}

Json GroupSpec(const std::string& sum_name, const std::string& count_name, bool swap) {
  Json cols = Json::object();
  cols["g"] = {{"formula", "[g]"}, {"level", 0}};
  if (swap) {
    cols[count_name] = {{"formula", "Count()"}, {"level", 1}};
    cols[sum_name] = {{"formula", "Sum([x])"}, {"level", 1}};
  } else {
    cols[sum_name] = {{"formula", "Sum([x])"}, {"level", 1}};
    cols[count_name] = {{"formula", "Count()"}, {"level", 1}};
  }
  return {{"inputs", {{{"alias", "n"}, {"table", "nums"}}}},
          {"levels", {{{"keys", Json::array()}, {"collapsed", true}},
                      {{"keys", {"g"}}},
                      {{"keys", Json::array()}}}},
          {"columns", cols}};
}

TEST(Service, CacheHitsSurviveRenamingAndReordering) {
  auto db = NumbersDb(10);
  Service svc(db, db->ReadCatalog(), {.verify_cache = 1.0});
  QueryResponse a = svc.Query({.spec = GroupSpec("total", "n", false), .session = "s"});
  EXPECT_FALSE(a.from_cache);
  EXPECT_EQ(svc.engine_queries(), 1);
  QueryResponse b = svc.Query({.spec = GroupSpec("Sum of x", "rows", true), .session = "s"});
  EXPECT_TRUE(b.from_cache);
  ASSERT_EQ(b.table.columns.size(), 3u);
  int sum = b.table.ColumnIndex("Sum of x");
  int rows = b.table.ColumnIndex("rows");
  ASSERT_GE(sum, 0);
  ASSERT_GE(rows, 0);
  EXPECT_LT(rows, sum);
  int ga = a.table.ColumnIndex("g"), ta = a.table.ColumnIndex("total");
  for (size_t i = 0; i < b.table.rows.size(); ++i) {
    EXPECT_EQ(std::get<std::string>(b.table.rows[i][b.table.ColumnIndex("g")]),
              std::get<std::string>(a.table.rows[i][ga]));
    EXPECT_EQ(std::get<double>(b.table.rows[i][sum]), std::get<double>(a.table.rows[i][ta]));
  }
  QueryResponse c = svc.Query(
      {.spec = GroupSpec("total", "n", false), .bindings = {}, .page = 1, .session = "other"});
  EXPECT_TRUE(c.from_cache);
}

TEST(Service, FiltersChangeTheCacheKey) {
  auto db = NumbersDb(10);
  Service svc(db, db->ReadCatalog());
  Json spec = GroupSpec("total", "n", false);
  svc.Query({.spec = spec, .session = "s"});
  spec["filters"] = {{{"kind", "range"}, {"column", "total"}, {"low", 21}}};
  QueryResponse r = svc.Query({.spec = spec, .session = "s"});
  EXPECT_FALSE(r.from_cache);
  EXPECT_EQ(r.table.rows.size(), 1u);
}

Json DetailSpec() {
  return {{"inputs", {{{"alias", "n"}, {"table", "nums"}}}},
          {"levels", {{{"keys", Json::array()}, {"ordering", {{{"column", "x"}}}}},
                      {{"keys", Json::array()}}}},
          {"columns", {{"x", {{"formula", "[x]"}, {"level", 0}}}}}};
}

TEST(Service, PagesHoldAThousandRows) {
  auto db = NumbersDb(1500);
  Service svc(db, db->ReadCatalog());
  QueryResponse p1 = svc.Query({.spec = DetailSpec(), .page = 1, .session = "s"});
  QueryResponse p2 = svc.Query({.spec = DetailSpec(), .page = 2, .session = "s"});
  EXPECT_EQ(p1.table.rows.size(), 1000u);
  ASSERT_EQ(p2.table.rows.size(), 500u);
  EXPECT_EQ(std::get<double>(p2.table.rows[0][0]), 1000.0);
  EXPECT_THROW(svc.Query({.spec = DetailSpec(), .page = 3, .session = "s"}), PageOutOfRange);
  EXPECT_THROW(svc.Query({.spec = DetailSpec(), .page = 0, .session = "s"}), PageOutOfRange);
}

TEST(Service, NewerQuerySupersedesOlder) {
  auto db = NumbersDb(20);
  std::mutex mu;
  std::condition_variable cv;
  bool first_waiting = false, release = false;
  int calls = 0;
  ServiceOptions opts;
  opts.before_execute = [&](const std::string&) {
    std::unique_lock<std::mutex> lock(mu);
    if (calls++ > 0) return;
    first_waiting = true;
    cv.notify_all();
    cv.wait(lock, [&] { return release; });
  };
  Service svc(db, db->ReadCatalog(), opts);
  auto first = std::async(std::launch::async, [&] {
    return svc.Query({.spec = DetailSpec(), .session = "s"});
  });
  {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return first_waiting; });
  }
  Json second_spec = GroupSpec("total", "n", false);
  QueryResponse second = svc.Query({.spec = second_spec, .session = "s"});
  EXPECT_EQ(second.table.rows.size(), 2u);
  {
    std::lock_guard<std::mutex> lock(mu);
    release = true;
  }
  cv.notify_all();
  EXPECT_THROW(first.get(), Cancelled);
  EXPECT_NE(svc.Explain("s", "sql").find("GROUP BY"), std::string::npos);
}

TEST(Service, ExplainNeedsAKnownSession) {
  auto db = NumbersDb(3);
  Service svc(db, db->ReadCatalog());
  EXPECT_THROW(svc.Explain("nobody", "sql"), ValidationError);
  EXPECT_FALSE(svc.Cancel("nobody"));
  svc.Query({.spec = DetailSpec(), .session = "s"});
  EXPECT_THROW(svc.Explain("s", "bogus"), ValidationError);
  for (const char* stage : {"graph", "walg", "rel", "sql"}) {
    EXPECT_FALSE(svc.Explain("s", stage).empty()) << stage;
  }
  EXPECT_NE(svc.Explain("s", "rel").find("operators:"), std::string::npos);
}

TEST(Service, CompileReportsDiagnostics) {
  auto db = NumbersDb(3);
  Service svc(db, db->ReadCatalog());
  Json spec = DetailSpec();
  spec["columns"]["bad"] = {{"formula", "[nope] + 1"}, {"level", 0}};
  CompileResponse r = svc.Compile(spec, "postgres");
  ASSERT_EQ(r.compiled.diagnostics.size(), 1u);
  EXPECT_NE(r.sql.find("SELECT"), std::string::npos);
  EXPECT_THROW(svc.Compile(spec, "nosuch"), DialectError);
}

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    db_ = NumbersDb(1500);
    service_ = std::make_unique<Service>(db_, db_->ReadCatalog());
    server_ = std::make_unique<HttpServer>(*service_);
    port_ = server_->Bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->Listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    server_->Stop();
    thread_.join();
  }
  httplib::Result Post(const std::string& path, const Json& body) {
    return client_->Post(path, body.dump(), "application/json");
  }

  std::shared_ptr<Database> db_;
  std::unique_ptr<Service> service_;
  std::unique_ptr<HttpServer> server_;
  std::thread thread_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(HttpTest, QueryCompileExplainCancel) {
  auto q = Post("/query", {{"spec", DetailSpec()}, {"page", 2}, {"session", "web"}});
  ASSERT_TRUE(q);
  ASSERT_EQ(q->status, 200) << q->body;
  Json body = Json::parse(q->body);
  EXPECT_EQ(body["rows"].size(), 500u);
  EXPECT_EQ(body["page"], 2);
  EXPECT_FALSE(body["from_cache"].get<bool>());

  auto c = Post("/compile", {{"spec", DetailSpec()}, {"dialect", "bigquery"}});
  ASSERT_EQ(c->status, 200);
  EXPECT_NE(Json::parse(c->body)["sql"].get<std::string>().find('`'), std::string::npos);

  auto e = client_->Get("/explain?stage=walg&session=web");
  ASSERT_EQ(e->status, 200);
  EXPECT_EQ(Json::parse(e->body)["stage"], "walg");

  auto x = Post("/cancel", {{"session", "web"}});
  ASSERT_EQ(x->status, 200);
  EXPECT_FALSE(Json::parse(x->body)["cancelled"].get<bool>());
}

TEST_F(HttpTest, ErrorsMapToStatusCodes) {
  auto bad_json = client_->Post("/query", "{not json", "application/json");
  EXPECT_EQ(bad_json->status, 400);
  Json schema_bad = DetailSpec();
  schema_bad.erase("levels");
  EXPECT_EQ(Post("/query", {{"spec", schema_bad}})->status, 400);
  Json anti = DetailSpec();
  anti["inputs"].push_back({{"alias", "m"}, {"table", "nums"}});
  anti["joins"] = {{{"input", "m"}, {"type", "anti"}, {"on", Json::array({Json::array({"x", "x"})})}}};
  auto r = Post("/query", {{"spec", anti}});
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(Json::parse(r->body)["kind"], "UnsupportedQuery");
  EXPECT_EQ(Post("/query", {{"spec", DetailSpec()}, {"page", 9}})->status, 422);
  EXPECT_EQ(client_->Get("/explain?stage=sql&session=ghost")->status, 422);
}

TEST(Http, StatusForKinds) {
  EXPECT_EQ(StatusFor(SyntaxError("x")), 400);
  EXPECT_EQ(StatusFor(Cancelled("x")), 409);
  EXPECT_EQ(StatusFor(ExecutionError("x")), 500);
  EXPECT_EQ(StatusFor(UnknownReference("x")), 422);
  EXPECT_EQ(StatusFor(std::runtime_error("x")), 500);
}

}  // namespace
}  // namespace sheetc::runner
