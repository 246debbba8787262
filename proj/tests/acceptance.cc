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
// Acceptance report: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "sheetc/bench/fuzz.h"
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
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

const std::string kRoot = SHEETC_SOURCE_DIR;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct TpchQuery {
  std::string name;
  std::string expect;
  Json spec;
};

std::vector<TpchQuery> TpchQueries() {
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(kRoot + "/fixtures/tpch")) paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::vector<TpchQuery> out;
  for (const fs::path& p : paths) {
    Json doc = Json::parse(std::ifstream(p));
    out.push_back({doc.at("name"), doc.at("expect"), doc.at("spec")});
  }
  return out;
}

struct TpchEnv {
  std::map<std::string, oracle::Table> tables = bench::GenerateTpch(2000);
  runner::Database db;
  spec::Catalog catalog;
  TpchEnv() {
    runner::LoadTables(db, tables);
    catalog = db.ReadCatalog();
  }
};

TpchEnv& Tpch() {
  static TpchEnv env;
  return env;
}

Outcome SupportedQueries() {
  auto start = Clock::now();
  TpchEnv& env = Tpch();
  std::vector<std::string> bad;
  int single = 0, rejected = 0;
  for (const TpchQuery& q : TpchQueries()) {
    try {
      auto spec = Resolve(spec::SpecFromJson(q.spec), env.catalog, {});
      Compiled c = Compile(spec);
      std::string err;
      if (q.expect == "unsupported") {
        bad.push_back(q.name + " compiled");
      } else if (env.db.IsSingleStatement(c.sql.text, &err)) {
        ++single;
      } else {
        bad.push_back(q.name + ": " + err);
      }
    } catch (const UnsupportedQuery&) {
      if (q.expect == "unsupported") {
        ++rejected;
      } else {
        bad.push_back(q.name + " rejected");
      }
    } catch (const std::exception& e) {
      bad.push_back(q.name + ": " + e.what());
    }
  }
  double s = Seconds(start);
  std::ostringstream d;
  d << single << " single statements (Q1, Q3, Q6, Q11), " << rejected
    << " anti/semi-join specs rejected, " << s << " s";
  for (const std::string& b : bad) d << "; " << b;
  return {bad.empty() && single == 4 && rejected >= 2 && s < 5.0, d.str()};
}

std::string RunFixture(const oracle::Fixture& f) {
  auto spec = Resolve(f.spec, f.catalog, f.bindings);
  oracle::Table expected = oracle::Run(spec, oracle::TableData(f.tables));
  runner::Database db;
  runner::LoadTables(db, f.tables);
  oracle::Report r = oracle::Compare(expected, runner::Execute(db, Compile(spec)));
  if (!r.ok) return r.summary;
  if (f.expected) {
    oracle::Report e = oracle::Compare(oracle::Retype(*f.expected, expected.columns), expected);
    if (!e.ok) return "oracle differs from expected: " + e.summary;
  }
  return "";
}

Outcome FixedCorpus() {
  std::vector<oracle::Fixture> corpus = oracle::LoadFixtures(kRoot + "/fixtures/corpus");
  int passed = 0;
  std::vector<std::string> bad;
  for (const oracle::Fixture& f : corpus) {
    std::string err;
    try {
      err = RunFixture(f);
    } catch (const std::exception& e) {
      err = e.what();
    }
    if (err.empty()) {
      ++passed;
    } else {
      bad.push_back(f.name + ": " + err);
    }
  }
  std::vector<std::string> missing;
  auto has = [&](const std::function<bool(const oracle::Fixture&)>& pred) {
    return std::any_of(corpus.begin(), corpus.end(), pred);
  };
  const std::pair<const char*, const char*> kRequired[] = {
      {"name", "state_county_city"},  {"tag", "cohort"},    {"tag", "percent_of_total"},
      {"tag", "autoagg"},             {"tag", "filter_propagation"}};
  for (const auto& [what, value] : kRequired) {
    std::string v = value;
    bool ok = std::string(what) == "name"
                  ? has([&](const oracle::Fixture& f) { return f.name == v; })
                  : has([&](const oracle::Fixture& f) { return f.HasTag(v); });
    if (!ok) missing.push_back(v);
  }
  std::ostringstream d;
  d << passed << "/" << corpus.size() << " fixtures equal the oracle";
  for (const std::string& m : missing) d << "; missing " << m;
  for (const std::string& b : bad) d << "; " << b;
  return {corpus.size() >= 25 && passed == static_cast<int>(corpus.size()) && missing.empty(),
          d.str()};
}

Outcome Fuzzed() {
  auto start = Clock::now();
  const int kCases = 200;
  int passed = 0;
  std::vector<uint64_t> failed;
  for (uint64_t seed = 1; seed <= kCases; ++seed) {
    bench::FuzzCase fc = bench::GenerateCase(seed);
    try {
      runner::Database db;
      runner::LoadTables(db, fc.tables);
      auto spec = Resolve(spec::SpecFromJson(fc.spec), db.ReadCatalog(), {});
      oracle::Table expected = oracle::Run(spec, oracle::TableData(fc.tables));
      if (oracle::Compare(expected, runner::Execute(db, Compile(spec))).ok) {
        ++passed;
        continue;
      }
    } catch (const std::exception&) {
    }
    failed.push_back(seed);
  }
  double s = Seconds(start);
  std::ostringstream d;
  d << passed << "/" << kCases << " seeded cases in " << s << " s";
  if (!failed.empty()) {
    d << "; failing seeds:";
    for (uint64_t f : failed) d << " " << f;
  }
  return {passed == kCases && s < 60.0, d.str()};
}

Outcome RewriteToggles() {
  struct Toggle {
    const char* name;
    std::function<void(CompileOptions&)> apply;
  };
  const Toggle toggles[] = {
      {"join merge", [](CompileOptions& o) { o.walg.join_merge = false; }},
      {"semijoin elision", [](CompileOptions& o) { o.walg.semijoin_elision = false; }},
      {"DCE", [](CompileOptions& o) { o.dead_code_elimination = false; }},
      {"attribute pruning",
       [](CompileOptions& o) {
         o.rewrite.attribute_pruning = false;
         o.rewrite.join_pruning = false;
       }},
      {"join pruning", [](CompileOptions& o) { o.rewrite.join_pruning = false; }},
      {"sort-limit pushdown", [](CompileOptions& o) { o.rewrite.sort_limit_pushdown = false; }},
  };
  std::vector<std::string> bad;
  int checks = 0;
  for (const oracle::Fixture& f : oracle::LoadFixtures(kRoot + "/fixtures/corpus")) {
    try {
      runner::Database db;
      runner::LoadTables(db, f.tables);
      auto spec = Resolve(f.spec, f.catalog, f.bindings);
      oracle::Table base = runner::Execute(db, Compile(spec));
      for (const Toggle& t : toggles) {
        CompileOptions opts;
        t.apply(opts);
        ++checks;
        if (!oracle::Compare(base, runner::Execute(db, Compile(spec, opts))).ok) {
          bad.push_back(f.name + " without " + t.name);
        }
      }
    } catch (const std::exception& e) {
      bad.push_back(f.name + ": " + e.what());
    }
  }
  oracle::Fixture mm = oracle::LoadFixture(kRoot + "/fixtures/corpus/11_minmax_merge.json");
  auto spec = Resolve(mm.spec, mm.catalog, mm.bindings);
  int merged = relalg::AggregateJoinCount(Compile(spec).rel);
  CompileOptions off;
  off.walg.join_merge = false;
  int unmerged = relalg::AggregateJoinCount(Compile(spec, off).rel);
  std::ostringstream d;
  d << checks - static_cast<int>(bad.size()) << "/" << checks
    << " toggled compiles unchanged; MIN/MAX AggregateJoinCount " << merged << " merged, "
    << unmerged << " unmerged";
  for (const std::string& b : bad) d << "; " << b;
  return {bad.empty() && merged == 1, d.str()};
}

// Group sizes 0, 1 and 2 (distinct values) through both evaluators.
Outcome AutoAggregation() {
  auto table = [](std::vector<std::pair<std::string, double>> rows) {
    oracle::Table t;
    t.columns = {{"g", ScalarType::kText}, {"x", ScalarType::kNumber}};
    for (auto& [g, x] : rows) t.rows.push_back({g, x});
    return t;
  };
  Json grouped = Json::parse(R"({
    "inputs": [{"alias": "t", "table": "t"}],
    "levels": [{"keys": [], "collapsed": true}, {"keys": ["g"]}, {"keys": []}],
    "columns": {"g": {"formula": "[g]", "level": 0}, "v": {"formula": "[x]", "level": 1}}})");
  Json totals = Json::parse(R"({
    "inputs": [{"alias": "t", "table": "t"}],
    "levels": [{"keys": [], "collapsed": true}, {"keys": []}],
    "columns": {"v": {"formula": "[x]", "level": 1}}})");
  struct Case {
    const char* label;
    Json spec;
    oracle::Table data;
    Value value;
    bool multi;
  };
  std::vector<Case> cases = {
      {"size 0", totals, table({}), Value{}, false},
      {"size 1", grouped, table({{"a", 5}}), 5.0, false},
      {"size 2", grouped, table({{"a", 1}, {"a", 2}}), Value{}, true},
  };
  std::vector<std::string> bad;
  for (const Case& c : cases) {
    std::map<std::string, oracle::Table> tables = {{"t", c.data}};
    runner::Database db;
    runner::LoadTables(db, tables);
    try {
      auto spec = Resolve(spec::SpecFromJson(c.spec), db.ReadCatalog(), {});
      oracle::Table by_oracle = oracle::Run(spec, oracle::TableData(tables));
      oracle::Table by_engine = runner::Execute(db, Compile(spec));
      for (const auto& [who, t] : {std::pair<const char*, const oracle::Table*>{"oracle", &by_oracle},
                                   {"engine", &by_engine}}) {
        int v = t->ColumnIndex("v"), m = t->ColumnIndex("__multi__v");
        bool ok = t->rows.size() == 1 && v >= 0 && m >= 0 &&
                  SameValue(t->rows[0][static_cast<size_t>(v)], c.value) &&
                  SameValue(t->rows[0][static_cast<size_t>(m)], Value{c.multi});
        if (!ok) bad.push_back(std::string(c.label) + " " + who);
      }
    } catch (const std::exception& e) {
      bad.push_back(std::string(c.label) + ": " + e.what());
    }
  }
  std::ostringstream d;
  d << "null / value / null+annotation checked in oracle and engine";
  for (const std::string& b : bad) d << "; " << b;
  return {bad.empty(), d.str()};
}

std::string Hardware() {
  std::string model = "unknown CPU";
  std::ifstream cpu("/proc/cpuinfo");
  for (std::string line; std::getline(cpu, line);) {
    if (line.rfind("model name", 0) == 0) {
      model = line.substr(line.find(':') + 2);
      break;
    }
  }
  return model + ", " + std::to_string(std::thread::hardware_concurrency()) + " threads";
}

Outcome CompileLatency() {
  TpchEnv& env = Tpch();
  std::vector<double> samples;
  for (int run = 0; run < 10; ++run) {
    for (const TpchQuery& q : TpchQueries()) {
      if (q.expect != "compiles") continue;
      auto start = Clock::now();
      Compile(Resolve(spec::SpecFromJson(q.spec), env.catalog, {}));
      samples.push_back(Seconds(start) * 1000);
    }
  }
  std::sort(samples.begin(), samples.end());
  double median = samples[samples.size() / 2];
  std::ostringstream d;
  d << "median " << median << " ms, max " << samples.back() << " ms over " << samples.size()
    << " compiles (4 queries x 10 runs); " << Hardware();
  return {median <= 50.0, d.str()};
}

bool FlatSchema(const Compiled& c, std::string* why) {
  std::set<std::string> names;
  for (const spec::Attribute& a : c.sql.columns) {
    if (a.type == ScalarType::kError) {
      *why = a.name + " has no scalar type";
      return false;
    }
    if (!names.insert(a.name).second) {
      *why = a.name + " repeats";
      return false;
    }
  }
  return !c.sql.columns.empty();
}

Outcome SingleStatementFlat() {
  int checked = 0;
  std::vector<std::string> bad;
  auto check = [&](runner::Database& db, const std::string& name, const Compiled& c) {
    ++checked;
    std::string why;
    if (!db.IsSingleStatement(c.sql.text, &why) || !FlatSchema(c, &why)) {
      bad.push_back(name + ": " + why);
      return;
    }
    try {
      oracle::Table t = runner::Execute(db, c);
      if (t.columns.size() != c.sql.columns.size()) bad.push_back(name + ": column count");
    } catch (const std::exception& e) {
      bad.push_back(name + ": " + e.what());
    }
  };
  for (const oracle::Fixture& f : oracle::LoadFixtures(kRoot + "/fixtures/corpus")) {
    runner::Database db;
    runner::LoadTables(db, f.tables);
    check(db, f.name, Compile(Resolve(f.spec, f.catalog, f.bindings)));
  }
  TpchEnv& env = Tpch();
  for (const TpchQuery& q : TpchQueries()) {
    if (q.expect != "compiles") continue;
    check(env.db, q.name, Compile(Resolve(spec::SpecFromJson(q.spec), env.catalog, {})));
  }
  std::ostringstream d;
  d << checked - static_cast<int>(bad.size()) << "/" << checked
    << " statements prepare with an empty tail and return flat scalar columns";
  for (const std::string& b : bad) d << "; " << b;
  return {bad.empty(), d.str()};
}

}  // namespace
}  // namespace sheetc

int main() {
  using namespace sheetc;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"supported query types", SupportedQueries},
      {"fixed corpus vs oracle", FixedCorpus},
      {"fuzzed specs vs oracle", Fuzzed},
      {"rewrite toggles", RewriteToggles},
      {"auto-aggregation sizes", AutoAggregation},
      {"compile latency", CompileLatency},
      {"single statement, flat schema", SingleStatementFlat},
  };
  int failed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << n << " [" << name << "]: " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
