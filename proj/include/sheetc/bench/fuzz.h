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
#ifndef SHEETC_BENCH_FUZZ_H_
#define SHEETC_BENCH_FUZZ_H_

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"
#include "sheetc/oracle/oracle.h"

namespace sheetc::bench {

struct FuzzLimits {
  int max_rows = 1000;
  int max_levels = 4;  // including base and totals
  int max_columns = 12;
};

struct FuzzCase {
  uint64_t seed = 0;
  // One table, `t`.
  std::map<std::string, oracle::Table> tables;
  nlohmann::ordered_json spec;
};

// Random table plus a random worksheet over it: grouping levels, scalar,
// aggregate, parent-reference, auto-aggregated and window columns, and up
// to two filters. Same seed, same case.
FuzzCase GenerateCase(uint64_t seed, const FuzzLimits& limits = {});

}  // namespace sheetc::bench

#endif  // SHEETC_BENCH_FUZZ_H_
