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
#include "sheetc/bench/tpch.h"

#include <cmath>
#include <random>
#include <vector>

namespace sheetc::bench {
namespace {

using T = ScalarType;

oracle::Table Make(std::vector<std::pair<const char*, T>> cols) {
  oracle::Table t;
  for (auto& [name, type] : cols) t.columns.push_back({name, type});
  return t;
}

const char* kNations[] = {"ALGERIA", "ARGENTINA", "BRAZIL", "CANADA", "EGYPT",
                          "ETHIOPIA", "FRANCE", "GERMANY", "INDIA", "INDONESIA",
                          "IRAN", "IRAQ", "JAPAN", "JORDAN", "KENYA",
                          "MOROCCO", "MOZAMBIQUE", "PERU", "CHINA", "ROMANIA",
                          "SAUDI ARABIA", "VIETNAM", "RUSSIA", "UNITED KINGDOM",
                          "UNITED STATES"};
const char* kSegments[] = {"AUTOMOBILE", "BUILDING", "FURNITURE", "MACHINERY", "HOUSEHOLD"};
const char* kPriorities[] = {"1-URGENT", "2-HIGH", "3-MEDIUM", "4-NOT SPECIFIED", "5-LOW"};

double Cents(double x) { return std::round(x * 100) / 100; }

}  // namespace

std::map<std::string, oracle::Table> GenerateTpch(int64_t orders, uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](int64_t lo, int64_t hi) {
    return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
  };
  auto real = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const int64_t customers = std::max<int64_t>(10, orders / 10);
  const int64_t suppliers = std::max<int64_t>(5, orders / 150);
  const int64_t parts = std::max<int64_t>(10, orders / 8);
  const Date start = DateFromCivil({1992, 1, 1});
  const Date end = DateFromCivil({1998, 8, 2});

  std::map<std::string, oracle::Table> out;
  oracle::Table nation = Make({{"n_nationkey", T::kNumber}, {"n_name", T::kText}});
  for (int i = 0; i < 25; ++i) {
    nation.rows.push_back({static_cast<double>(i), std::string(kNations[i])});
  }

  oracle::Table supplier = Make({{"s_suppkey", T::kNumber},
                                 {"s_name", T::kText},
                                 {"s_nationkey", T::kNumber}});
  for (int64_t s = 1; s <= suppliers; ++s) {
    supplier.rows.push_back({static_cast<double>(s), "Supplier#" + std::to_string(s),
                             static_cast<double>(s * 7 % 25)});
  }

  oracle::Table customer = Make({{"c_custkey", T::kNumber},
                                 {"c_nationkey", T::kNumber},
                                 {"c_mktsegment", T::kText},
                                 {"c_acctbal", T::kNumber},
                                 {"c_phone", T::kText}});
  for (int64_t c = 1; c <= customers; ++c) {
    int64_t nk = uniform(0, 24);
    customer.rows.push_back({static_cast<double>(c), static_cast<double>(nk),
                             std::string(kSegments[uniform(0, 4)]), Cents(real(-999.99, 9999.99)),
                             std::to_string(10 + nk) + "-" + std::to_string(uniform(100, 999))});
  }

  oracle::Table partsupp = Make({{"ps_partkey", T::kNumber},
                                 {"ps_suppkey", T::kNumber},
                                 {"ps_availqty", T::kNumber},
                                 {"ps_supplycost", T::kNumber}});
  for (int64_t p = 1; p <= parts; ++p) {
    for (int k = 0; k < 4; ++k) {
      int64_t s = (p + k * (suppliers / 4 + 1)) % suppliers + 1;
      partsupp.rows.push_back({static_cast<double>(p), static_cast<double>(s),
                               static_cast<double>(uniform(1, 9999)), Cents(real(1, 1000))});
    }
  }

  oracle::Table order = Make({{"o_orderkey", T::kNumber},
                              {"o_custkey", T::kNumber},
                              {"o_orderstatus", T::kText},
                              {"o_orderdate", T::kDate},
                              {"o_orderpriority", T::kText},
                              {"o_shippriority", T::kNumber}});
  oracle::Table lineitem = Make({{"l_orderkey", T::kNumber},
                                 {"l_partkey", T::kNumber},
                                 {"l_suppkey", T::kNumber},
                                 {"l_linenumber", T::kNumber},
                                 {"l_quantity", T::kNumber},
                                 {"l_extendedprice", T::kNumber},
                                 {"l_discount", T::kNumber},
                                 {"l_tax", T::kNumber},
                                 {"l_returnflag", T::kText},
                                 {"l_linestatus", T::kText},
                                 {"l_shipdate", T::kDate},
                                 {"l_commitdate", T::kDate},
                                 {"l_receiptdate", T::kDate}});
  const Date current = DateFromCivil({1995, 6, 17});
  for (int64_t o = 1; o <= orders; ++o) {
    Date od{static_cast<int32_t>(uniform(start.days, end.days - 151))};
    int lines = static_cast<int>(uniform(1, 7));
    int shipped = 0;
    for (int l = 1; l <= lines; ++l) {
      int64_t p = uniform(1, parts);
      int64_t s = (p + uniform(0, 3) * (suppliers / 4 + 1)) % suppliers + 1;
      double qty = static_cast<double>(uniform(1, 50));
      Date ship{od.days + static_cast<int32_t>(uniform(1, 121))};
      Date commit{od.days + static_cast<int32_t>(uniform(30, 90))};
      Date receipt{ship.days + static_cast<int32_t>(uniform(1, 30))};
      std::string flag = receipt.days <= current.days ? (uniform(0, 1) ? "R" : "A") : "N";
      std::string status = ship.days > current.days ? "O" : "F";
      shipped += status == "F";
      double price = Cents(qty * (900 + static_cast<double>(p % 1000) / 10 + 1));
      lineitem.rows.push_back({static_cast<double>(o), static_cast<double>(p),
                               static_cast<double>(s), static_cast<double>(l), qty, price,
                               static_cast<double>(uniform(0, 10)) / 100,
                               static_cast<double>(uniform(0, 8)) / 100, flag, status, ship,
                               commit, receipt});
    }
    std::string st = shipped == lines ? "F" : shipped == 0 ? "O" : "P";
    int64_t cust = uniform(1, customers);
    if (cust % 3 == 0) cust = cust % customers + 1;
    order.rows.push_back({static_cast<double>(o), static_cast<double>(cust), st, od,
                          std::string(kPriorities[uniform(0, 4)]), 0.0});
  }
  out["nation"] = std::move(nation);
  out["supplier"] = std::move(supplier);
  out["customer"] = std::move(customer);
  out["partsupp"] = std::move(partsupp);
  out["orders"] = std::move(order);
  out["lineitem"] = std::move(lineitem);
  return out;
}

}  // namespace sheetc::bench
