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

#ifndef SHEETC_COMPILER_COMPILER_H_
#define SHEETC_COMPILER_COMPILER_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sheetc/calc/calc_graph.h"
#include "sheetc/calc/layout.h"
#include "sheetc/relalg/relalg.h"
#include "sheetc/sqlgen/sqlgen.h"
#include "sheetc/walg/walg.h"

namespace sheetc {

struct CompileOptions {
  std::string dialect = "ansi";
  bool dead_code_elimination = true;
  walg::OptimizeOptions walg;
  relalg::RewriteOptions rewrite;
  bool ctes = true;
  std::optional<spec::PageSpec> page;  // overrides the spec's page
  bool apply_page = true;
};

struct Compiled {
  std::shared_ptr<const calc::CalcGraph> graph;
  calc::OutputLayout layout;
  walg::Plan walg;
  relalg::RelPlan rel;
  sqlgen::SqlQuery sql;
  std::vector<formula::Diagnostic> diagnostics;
  double compile_ms = 0;
};

// Analysis, op ordering, walg optimization, lowering, rewriting and SQL
// rendering. Throws UnsupportedQuery for semi- and anti-joined inputs.
Compiled Compile(std::shared_ptr<const spec::ResolvedSpec> spec,
                 const CompileOptions& options = {});

// Relational plan only, as used for nested worksheet inputs.
relalg::RelPlan CompileRel(const spec::ResolvedSpec& spec, const CompileOptions& options,
                           const relalg::LowerOptions& lower);

}  // namespace sheetc

#endif  // SHEETC_COMPILER_COMPILER_H_
