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

#ifndef SHEETC_CALC_LAYOUT_H_
#define SHEETC_CALC_LAYOUT_H_

#include <string>
#include <vector>

#include "sheetc/calc/calc_graph.h"

namespace sheetc::calc {

struct SortKey {
  std::string column;
  bool descending = false;
};

// Shape of the flat result: one row per record of the grain level.
struct OutputLayout {
  int grain = 0;
  // Visible columns: per level from the top down to the grain, the level's
  // non-hidden keys then its visible columns; totals columns last.
  std::vector<std::string> columns;
  // Output columns that carry a `__multi__<column>` annotation.
  std::vector<std::string> annotated;
  // Level orderings and keys from the top down, then every output column in
  // fingerprint order so that paging is deterministic.
  std::vector<SortKey> sort;
};

OutputLayout ComputeLayout(const CalcGraph& graph);

// Name-independent structural hash per node (hex), indexed by node id.
// A column's hash covers its formula with references replaced by the
// referenced column's hash, its level and its visibility.
std::vector<std::string> Fingerprints(const CalcGraph& graph);

// Whether evaluating `expr` at `level` auto-aggregates a lower-level value.
bool HasAutoAggregation(const formula::TypedExpr& expr, int level,
                        const std::vector<std::string>& grouping_keys);

std::string AnnotationName(const std::string& column);

uint64_t Fnv1a(std::string_view data, uint64_t seed = 1469598103934665603ull);

}  // namespace sheetc::calc

#endif  // SHEETC_CALC_LAYOUT_H_
