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

#include <algorithm>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sheetc/bench/fuzz.h"
#include "sheetc/bench/tpch.h"
#include "sheetc/common/errors.h"
#include "sheetc/compiler/compiler.h"
#include "sheetc/compiler/resolve.h"
#include "sheetc/oracle/fixture.h"
#include "sheetc/runner/csv.h"
#include "sheetc/runner/engine.h"
#include "sheetc/runner/http.h"
#include "sheetc/runner/service.h"

namespace {

using namespace sheetc;
using Json = nlohmann::ordered_json;

std::string DbPath(std::string url) {
  if (url.empty()) {
    const char* env = std::getenv("SHEETC_DB");
    url = env ? env : ":memory:";
  }
  for (const char* prefix : {"sqlite://", "sqlite:"}) {
    if (url.rfind(prefix, 0) == 0) return url.substr(std::string(prefix).size());
  }
  return url;
}

Json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot read " + path);
  return Json::parse(in);
}

bool IsFixture(const Json& doc) { return doc.contains("spec") && doc.contains("tables"); }

// Tables of the database plus anything in `catalog_path`.
spec::Catalog MergedCatalog(runner::Database& db, const std::string& catalog_path) {
  spec::Catalog catalog = catalog_path.empty() ? spec::Catalog{} : spec::Catalog::Load(catalog_path);
  spec::Catalog from_db = db.ReadCatalog();
  for (const auto& [name, info] : from_db.tables()) {
    if (!catalog.FindTable(name)) catalog.AddTable(info);
  }
  return catalog;
}

std::map<std::string, Value> ParseBindings(const std::vector<std::string>& binds) {
  std::map<std::string, Value> out;
  for (const std::string& b : binds) {
    auto eq = b.find('=');
    if (eq == std::string::npos) throw ValidationError("binding `" + b + "` is not name=value");
    Json v;
    try {
      v = Json::parse(b.substr(eq + 1));
    } catch (const Json::exception&) {
      v = b.substr(eq + 1);
    }
    out[b.substr(0, eq)] = spec::ValueFromJsonUntyped(v);
  }
  return out;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void PrintTable(const oracle::Table& t, const std::string& format) {
  if (format == "json") {
    std::cout << runner::TableToJson(t).dump(2) << "\n";
    return;
  }
  for (size_t i = 0; i < t.columns.size(); ++i) std::cout << (i ? "," : "") << CsvField(t.columns[i].name);
  std::cout << "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      std::cout << (i ? "," : "") << (IsNull(row[i]) ? "" : CsvField(ValueToString(row[i])));
    }
    std::cout << "\n";
  }
}

struct Common {
  std::string db;
  std::string catalog;
  std::vector<std::string> binds;
};

// Loads a fixture's tables into `db` and returns its catalog, or resolves a
// plain spec against the database and catalog file.
std::pair<Json, spec::Catalog> Prepare(const std::string& path, runner::Database& db,
                                       const Common& common, std::map<std::string, Value>& bindings) {
  Json doc = ReadJson(path);
  if (IsFixture(doc)) {
    oracle::Fixture f = oracle::FixtureFromJson(doc);
    runner::LoadTables(db, f.tables);
    for (const auto& [k, v] : f.bindings) bindings.emplace(k, v);
    return {doc["spec"], f.catalog};
  }
  return {doc, MergedCatalog(db, common.catalog)};
}

int RunCompile(const std::string& path, const Common& common, const std::string& dialect,
               const std::string& explain, bool no_ctes) {
  runner::Database db(DbPath(common.db));
  auto bindings = ParseBindings(common.binds);
  auto [spec_json, catalog] = Prepare(path, db, common, bindings);
  CompileOptions options;
  options.dialect = dialect;
  options.ctes = !no_ctes;
  Compiled c = Compile(Resolve(spec::SpecFromJson(spec_json), catalog, bindings), options);
  std::cout << runner::Explain(c, explain.empty() ? "sql" : explain) << "\n";
  for (const auto& d : c.diagnostics) {
    std::cerr << d.severity << ": " << (d.column.empty() ? "" : d.column + ": ") << d.message << "\n";
  }
  std::cerr << "compile_ms: " << c.compile_ms << "\n";
  return 0;
}

int RunQuery(const std::string& path, const Common& common, int64_t page, const std::string& format) {
  auto db = std::make_shared<runner::Database>(DbPath(common.db));
  auto bindings = ParseBindings(common.binds);
  auto [spec_json, catalog] = Prepare(path, *db, common, bindings);
  runner::Service service(db, catalog);
  runner::QueryRequest q;
  q.spec = spec_json;
  q.bindings = bindings;
  q.page = page;
  q.session = "cli";
  runner::QueryResponse r = service.Query(q);
  PrintTable(r.table, format);
  std::cerr << "compile_ms: " << r.compile_ms << "\n";
  return 0;
}

int RunOracle(const std::string& path, const std::string& format) {
  oracle::Fixture f = oracle::LoadFixture(path);
  auto spec = Resolve(f.spec, f.catalog, f.bindings);
  PrintTable(oracle::Run(spec, oracle::TableData(f.tables)), format);
  return 0;
}

runner::HttpServer* g_server = nullptr;

int RunServe(const Common& common, const std::string& host, int port) {
  auto db = std::make_shared<runner::Database>(DbPath(common.db));
  runner::Service service(db, MergedCatalog(*db, common.catalog));
  runner::HttpServer server(service);
  int bound = server.Bind(host, port);
  std::cerr << "listening on " << host << ":" << bound << "\n";
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->Stop();
  });
  server.Listen();
  return 0;
}

int RunLoadCsv(const std::string& path, const std::string& table, const Common& common) {
  runner::Database db(DbPath(common.db));
  spec::TableInfo info = runner::LoadCsv(db, path, table);
  Json cols = Json::array();
  for (const auto& c : info.columns) cols.push_back({{"name", c.name}, {"type", std::string(ScalarTypeName(c.type))}});
  std::cout << Json{{"name", info.name}, {"columns", cols}}.dump(2) << "\n";
  return 0;
}

int RunTpchGen(int64_t orders, uint64_t seed, const Common& common) {
  runner::Database db(DbPath(common.db));
  for (const auto& [name, t] : bench::GenerateTpch(orders, seed)) {
    db.Exec("DROP TABLE IF EXISTS \"" + name + "\"");
    db.LoadTable(name, t);
    std::cout << name << ": " << t.rows.size() << " rows\n";
  }
  return 0;
}

int RunFuzzCase(uint64_t seed) {
  bench::FuzzCase fc = bench::GenerateCase(seed);
  Json tables = Json::object();
  for (const auto& [name, t] : fc.tables) {
    Json doc = oracle::TableToJson(t);
    doc["columns"] = Json::array();
    for (const auto& c : t.columns) {
      doc["columns"].push_back({{"name", c.name}, {"type", std::string(ScalarTypeName(c.type))}});
    }
    tables[name] = doc;
  }
  Json doc = {{"name", "fuzz_" + std::to_string(seed)}, {"tables", tables}, {"spec", fc.spec}};
  std::cout << doc.dump(1) << "\n";
  return 0;
}

// Median execution time of each spec with and without CTEs over generated
// TPC-H tables.
int RunBench(const std::vector<std::string>& paths, int64_t orders, int runs) {
  runner::Database db;
  auto tables = bench::GenerateTpch(orders);
  runner::LoadTables(db, tables);
  std::cout << "lineitem rows: " << tables.at("lineitem").rows.size() << "\n";
  spec::Catalog catalog = db.ReadCatalog();
  auto median_ms = [&](const Compiled& c, size_t* rows) {
    std::vector<double> ms;
    for (int i = 0; i < runs; ++i) {
      auto start = std::chrono::steady_clock::now();
      *rows = runner::Execute(db, c).rows.size();
      ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(ms.begin(), ms.end());
    return ms[ms.size() / 2];
  };
  for (const std::string& path : paths) {
    Json doc = ReadJson(path);
    if (doc.value("expect", "compiles") != "compiles") continue;
    auto spec = Resolve(spec::SpecFromJson(doc.contains("spec") ? doc.at("spec") : doc), catalog, {});
    CompileOptions with, without;
    without.ctes = false;
    Compiled a = Compile(spec, with), b = Compile(spec, without);
    size_t rows_a = 0, rows_b = 0;
    double ta = median_ms(a, &rows_a), tb = median_ms(b, &rows_b);
    std::cout << doc.value("name", path) << ": ctes=" << a.sql.cte_count << " cte_ms=" << ta
              << " inline_ms=" << tb << " rows=" << rows_a << (rows_a == rows_b ? "" : " ROW MISMATCH")
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worksheet to SQL compiler"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--db", common.db, "SQLite database path (default $SHEETC_DB or in-memory)");
    sub->add_option("--catalog", common.catalog, "Catalog JSON with tables and stored worksheets");
    sub->add_option("--bind", common.binds, "Parameter binding name=value");
  };

  std::string spec_path, dialect = "ansi", explain, format = "csv", host = "127.0.0.1", table;
  bool no_ctes = false;
  int64_t page = 1;
  int port = 8080;

  auto* compile = app.add_subcommand("compile", "Compile a spec to SQL or an IR dump");
  compile->add_option("spec", spec_path, "Spec or fixture JSON")->required();
  compile->add_option("--dialect", dialect, "ansi, postgres, snowflake, bigquery or redshift");
  compile->add_option("--explain", explain, "graph, walg, rel or sql");
  compile->add_flag("--no-ctes", no_ctes, "Inline shared subqueries");
  add_common(compile);

  auto* run = app.add_subcommand("run", "Compile and execute a spec");
  run->add_option("spec", spec_path, "Spec or fixture JSON")->required();
  run->add_option("--page", page, "1-based page of 1000 rows");
  run->add_option("--format", format, "csv or json");
  add_common(run);

  auto* orc = app.add_subcommand("oracle", "Evaluate a fixture with the reference interpreter");
  orc->add_option("fixture", spec_path, "Fixture JSON")->required();
  orc->add_option("--format", format, "csv or json");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", port, "Port, 0 for any");
  serve->add_option("--host", host, "Bind address");
  add_common(serve);

  auto* load = app.add_subcommand("load-csv", "Load a CSV file into a table");
  load->add_option("csv", spec_path, "CSV file")->required();
  load->add_option("--table", table, "Table name")->required();
  add_common(load);

  int64_t orders = 1000;
  uint64_t seed = 42;
  auto* gen = app.add_subcommand("tpch-gen", "Write seeded TPC-H-shaped tables");
  gen->add_option("--orders", orders, "Number of orders (about four lineitems each)");
  gen->add_option("--seed", seed, "Generator seed");
  add_common(gen);

  auto* fuzz = app.add_subcommand("fuzz-case", "Print the fuzzer's case for a seed as a fixture");
  fuzz->add_option("--seed", seed, "Case seed");

  std::vector<std::string> bench_paths;
  int runs = 5;
  auto* bench_cmd = app.add_subcommand("bench", "Time specs over TPC-H tables with and without CTEs");
  bench_cmd->add_option("specs", bench_paths, "Spec or TPC-H query files")->required();
  bench_cmd->add_option("--orders", orders, "Number of orders");
  bench_cmd->add_option("--runs", runs, "Executions per variant");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*compile) return RunCompile(spec_path, common, dialect, explain, no_ctes);
    if (*run) return RunQuery(spec_path, common, page, format);
    if (*orc) return RunOracle(spec_path, format);
    if (*serve) return RunServe(common, host, port);
    if (*load) return RunLoadCsv(spec_path, table, common);
    if (*gen) return RunTpchGen(orders, seed, common);
    if (*fuzz) return RunFuzzCase(seed);
    if (*bench_cmd) return RunBench(bench_paths, orders, runs);
  } catch (const UnsupportedQuery& e) {
    std::cerr << "error[UnsupportedQuery]: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error[" << e.kind() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
