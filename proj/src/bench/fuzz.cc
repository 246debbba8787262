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
#include "sheetc/bench/fuzz.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace sheetc::bench {
namespace {

using Json = nlohmann::ordered_json;

struct Col {
  std::string name;
  int level;
  ScalarType type;
};

class Gen {
 public:
  Gen(uint64_t seed, const FuzzLimits& limits) : rng_(seed), limits_(limits) {}

  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool Chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <typename T>
  const T& Pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(Int(0, static_cast<int>(v.size()) - 1))];
  }

  oracle::Table MakeTable() {
    oracle::Table t;
    t.columns = {{"k1", ScalarType::kText},  {"k2", ScalarType::kText},
                 {"k3", ScalarType::kText},  {"n1", ScalarType::kNumber},
                 {"n2", ScalarType::kNumber}, {"d", ScalarType::kDate},
                 {"b", ScalarType::kLogical}};
    int rows = Chance(0.05)  ? 0
               : Chance(0.7) ? Int(1, std::min(200, limits_.max_rows))
                             : Int(1, limits_.max_rows);
    const Date start = DateFromCivil({2024, 1, 1});
    auto maybe = [&](double p, Value v) { return Chance(p) ? Value{} : v; };
    for (int i = 0; i < rows; ++i) {
      std::vector<Value> r;
      r.push_back(maybe(0.1, std::string(1, static_cast<char>('a' + Int(0, 2)))));
      r.push_back(maybe(0.1, std::string(Chance(0.5) ? "x" : "y")));
      r.push_back(maybe(0.05, "s" + std::to_string(Int(0, 9))));
      r.push_back(maybe(0.1, static_cast<double>(Int(-5, 20))));
      r.push_back(maybe(0.1, Int(-500, 2000) / 100.0));
      r.push_back(maybe(0.05, Date{start.days + Int(0, 90)}));
      r.push_back(maybe(0.1, Chance(0.5)));
      t.rows.push_back(std::move(r));
    }
    return t;
  }

  Json MakeSpec() {
    struct KeyDef {
      const char* name;
      const char* formula;
      ScalarType type;
    };
    std::vector<KeyDef> candidates = {{"K1", "[k1]", ScalarType::kText},
                                      {"K2", "[k2]", ScalarType::kText},
                                      {"K3", "[k3]", ScalarType::kText},
                                      {"Month", "DateTrunc(\"month\", [d])", ScalarType::kDate},
                                      {"Bucket", "Round([n1] / 5)", ScalarType::kNumber}};
    std::shuffle(candidates.begin(), candidates.end(), rng_);
    int grouping = Int(0, limits_.max_levels - 2);
    totals_ = grouping + 1;
    Json levels = Json::array();
    Json base = {{"keys", Json::array()}};
    if (grouping > 0 && Chance(0.25)) base["collapsed"] = true;
    levels.push_back(base);
    size_t next = 0;
    for (int l = 1; l <= grouping; ++l) {
      Json keys = Json::array();
      int n = (next + 2 <= candidates.size() && Chance(0.2)) ? 2 : 1;
      for (int k = 0; k < n; ++k) {
        const KeyDef& kd = candidates[next++];
        keys.push_back(kd.name);
        Add(kd.name, kd.formula, 0, kd.type);
        keys_.push_back(kd.name);
      }
      Json level = {{"keys", keys}};
      if (Chance(0.3)) {
        level["ordering"] = {{{"column", keys[0]}, {"direction", Chance(0.5) ? "asc" : "desc"}}};
      }
      levels.push_back(level);
    }
    levels.push_back({{"keys", Json::array()}});

    bool auto_agg_done = false;
    int budget = limits_.max_columns - static_cast<int>(cols_.size());
    int wanted = Int(std::min(2, budget), budget);
    for (int i = 0; i < wanted; ++i) {
      int kind = Int(0, 9);
      if (kind <= 1) {
        BaseScalar();
      } else if (kind <= 5 || Numeric(-1).empty()) {
        Aggregate();
      } else if (kind == 6) {
        ParentRef();
      } else if (kind <= 8) {
        Window();
      } else if (!auto_agg_done && totals_ > 1) {
        auto_agg_done = AutoAgg();
      } else {
        Aggregate();
      }
    }

    Json spec;
    spec["inputs"] = {{{"alias", "t"}, {"table", "t"}}};
    spec["levels"] = levels;
    spec["columns"] = columns_;
    Json filters = Json::array();
    int nf = Int(0, 2);
    for (int i = 0; i < nf; ++i) {
      Json f = Filter();
      if (!f.is_null()) filters.push_back(f);
    }
    if (!filters.empty()) spec["filters"] = filters;
    return spec;
  }

 private:
  void Add(const std::string& name, const std::string& formula, int level, ScalarType type,
           bool may_hide = false) {
    Json c = {{"formula", formula}, {"level", level}};
    if (may_hide && Chance(0.15)) c["hidden"] = true;
    columns_[name] = c;
    cols_.push_back({name, level, type});
  }

  std::string Fresh(const char* prefix) { return prefix + std::to_string(++counter_); }

  // Numeric columns at `level`, or at any level when negative.
  std::vector<Col> Numeric(int level) const {
    std::vector<Col> out;
    for (const Col& c : cols_) {
      if (c.type == ScalarType::kNumber && (level < 0 || c.level == level)) out.push_back(c);
    }
    return out;
  }

  std::string NumericArg(int below) {
    std::vector<std::string> opts = {"[n1]", "[n2]", "[n1] * [n2]", "Coalesce([n2], 0)"};
    for (const Col& c : cols_) {
      if (c.type == ScalarType::kNumber && c.level < below) opts.push_back("[" + c.name + "]");
    }
    return Pick(opts);
  }

  void BaseScalar() {
    static const std::vector<std::pair<const char*, ScalarType>> kTemplates = {
        {"[n1] + [n2]", ScalarType::kNumber},
        {"[n1] * 2 - [n2]", ScalarType::kNumber},
        {"If([b], [n1], -1)", ScalarType::kNumber},
        {"Round([n2] / 3, 2)", ScalarType::kNumber},
        {"[n1] / [n2]", ScalarType::kNumber},
        {"Length([k3])", ScalarType::kNumber},
        {"DateDiff(\"day\", Date(\"2024-01-01\"), [d])", ScalarType::kNumber},
        {"If([n1] > 5, \"hi\", \"lo\")", ScalarType::kText},
        {"[d] > Date(\"2024-02-01\")", ScalarType::kLogical},
        {"[k1] & [k2]", ScalarType::kText},
        {"not [b] or IsNull([n2])", ScalarType::kLogical},
    };
    const auto& [formula, type] = Pick(kTemplates);
    Add(Fresh("s"), formula, 0, type, true);
  }

  void Aggregate() {
    int level = Int(1, totals_);
    std::string arg = NumericArg(level);
    static const std::vector<std::string> kFns = {"Sum", "Avg", "Min", "Max", "Count"};
    int pick = Int(0, 7);
    std::string formula;
    if (pick < 5) {
      formula = kFns[static_cast<size_t>(pick)] + "(" + arg + ")";
    } else if (pick == 5) {
      formula = "Count()";
    } else if (pick == 6) {
      formula = "CountIf(" + arg + " > 3)";
    } else {
      formula = "CountDistinct([k3])";
    }
    Add(Fresh("a"), formula, level, ScalarType::kNumber, true);
  }

  void ParentRef() {
    std::vector<std::pair<Col, Col>> pairs;
    for (const Col& c : Numeric(-1)) {
      for (const Col& p : Numeric(-1)) {
        if (p.level > c.level) pairs.push_back({c, p});
      }
    }
    if (pairs.empty()) return Aggregate();
    const auto& [c, p] = Pick(pairs);
    std::string op = Chance(0.5) ? " / " : " - ";
    Add(Fresh("p"), "[" + c.name + "]" + op + "[" + p.name + "]", c.level, ScalarType::kNumber,
        true);
  }

  void Window() {
    std::vector<Col> opts;
    for (const Col& c : Numeric(-1)) {
      if (c.level >= 1 && c.level < totals_) opts.push_back(c);
    }
    if (opts.empty()) return Aggregate();
    const Col& c = Pick(opts);
    static const std::vector<std::string> kFns = {
        "Lag(%)", "Lead(%)", "Lag(%, 2)", "CumulativeSum(%)", "Rank(%)",
        "Rank(%, \"desc\")", "MovingAverage(%)", "MovingAverage(%, 1)", "FillDown(%)"};
    std::string f = Pick(kFns);
    f.replace(f.find('%'), 1, "[" + c.name + "]");
    Add(Fresh("w"), f, c.level, ScalarType::kNumber, true);
  }

  bool AutoAgg() {
    std::vector<Col> opts;
    for (const Col& c : cols_) {
      if (c.level < totals_ - 1 || (c.level == 0 && totals_ > 1)) opts.push_back(c);
    }
    if (opts.empty()) return false;
    const Col& c = Pick(opts);
    int level = Int(c.level + 1, totals_);
    Add(Fresh("u"), "[" + c.name + "]", level, c.type);
    return true;
  }

  Json Filter() {
    int kind = Int(0, 5);
    std::vector<Col> numeric = Numeric(-1);
    if (kind == 0 && !numeric.empty()) {
      const Col& c = Pick(numeric);
      Json f = {{"kind", "range"}, {"column", c.name}};
      if (Chance(0.7)) f["low"] = Int(-2, 5);
      if (!f.contains("low") || Chance(0.4)) f["high"] = Int(6, 60);
      return f;
    }
    std::vector<std::string> text_keys;
    for (const Col& c : cols_) {
      if (c.type == ScalarType::kText && c.level == 0 &&
          std::find(keys_.begin(), keys_.end(), c.name) != keys_.end()) {
        text_keys.push_back(c.name);
      }
    }
    if (kind <= 2 && !text_keys.empty()) {
      const std::string& k = Pick(text_keys);
      Json values = Json::array();
      for (const char* v : {"a", "b", "c", "x", "y", "s1", "s2", "s3", "s4", "s5"}) {
        if (Chance(0.5)) values.push_back(v);
      }
      return {{"kind", kind == 1 ? "include_list" : "exclude_list"}, {"column", k},
              {"values", values}};
    }
    if (kind == 3) {
      std::vector<Col> ranked;
      for (const Col& c : numeric) {
        if (c.level >= 1 && c.level < totals_) ranked.push_back(c);
      }
      if (ranked.empty()) return nullptr;
      const Col& c = Pick(ranked);
      return {{"kind", "top_n"}, {"column", c.name}, {"limit", Int(1, 3)},
              {"direction", Chance(0.5) ? "desc" : "asc"}};
    }
    if (kind == 4 && !text_keys.empty()) {
      return {{"kind", "text_match"}, {"column", Pick(text_keys)},
              {"pattern", Pick(std::vector<std::string>{"%a%", "%y", "s_", "_"})}};
    }
    if (numeric.empty()) return nullptr;
    const Col& c = Pick(numeric);
    return {{"kind", "custom_predicate"},
            {"predicate", "[" + c.name + "] > " + std::to_string(Int(-1, 10)) + " or [n1] = 3"}};
  }

  std::mt19937_64 rng_;
  FuzzLimits limits_;
  int totals_ = 1;
  int counter_ = 0;
  Json columns_ = Json::object();
  std::vector<Col> cols_;
  std::vector<std::string> keys_;
};

}  // namespace

FuzzCase GenerateCase(uint64_t seed, const FuzzLimits& limits) {
  Gen gen(seed, limits);
  FuzzCase out;
  out.seed = seed;
  out.tables["t"] = gen.MakeTable();
  out.spec = gen.MakeSpec();
  return out;
}

}  // namespace sheetc::bench
