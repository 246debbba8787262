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
#ifndef SHEETC_BENCH_TPCH_H_
#define SHEETC_BENCH_TPCH_H_

#include <cstdint>
#include <map>
#include <string>

#include "sheetc/oracle/oracle.h"

namespace sheetc::bench {

// Seeded TPC-H-shaped data: nation, supplier, customer, partsupp, orders and
// lineitem with the columns the benchmark specs read. Roughly four lineitems
// per order. Not dbgen-compatible.
std::map<std::string, oracle::Table> GenerateTpch(int64_t orders, uint64_t seed = 42);

}  // namespace sheetc::bench

#endif  // SHEETC_BENCH_TPCH_H_
