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

#include "sheetc/compiler/compiler.h"

#include <chrono>

namespace sheetc {

namespace {

std::shared_ptr<const spec::ResolvedSpec> Alias(const spec::ResolvedSpec& spec) {
  return std::shared_ptr<const spec::ResolvedSpec>(std::shared_ptr<void>(), &spec);
}

walg::Plan BuildWalg(std::shared_ptr<const calc::CalcGraph> graph, const CompileOptions& options) {
  walg::OrderOptions order;
  order.fuse = options.walg.join_merge;
  walg::Plan plan = walg::OrderOperations(std::move(graph), order);
  return walg::OptimizeWalg(plan, options.walg);
}

relalg::NestedCompiler Nested(const CompileOptions& options) {
  return [options](const spec::ResolvedSpec& nested) {
    relalg::LowerOptions lower;
    lower.apply_page = false;
    return CompileRel(nested, options, lower);
  };
}

}  // namespace

relalg::RelPlan CompileRel(const spec::ResolvedSpec& spec, const CompileOptions& options,
                           const relalg::LowerOptions& lower) {
  auto graph = std::make_shared<const calc::CalcGraph>(
      calc::AnalyzeSpec(Alias(spec), options.dead_code_elimination));
  walg::Plan plan = BuildWalg(graph, options);
  return relalg::Lower(plan, Nested(options), lower);
}

Compiled Compile(std::shared_ptr<const spec::ResolvedSpec> spec, const CompileOptions& options) {
  auto start = std::chrono::steady_clock::now();
  const sqlgen::Dialect& dialect = sqlgen::GetDialect(options.dialect);
  Compiled out;
  out.graph = std::make_shared<const calc::CalcGraph>(
      calc::AnalyzeSpec(spec, options.dead_code_elimination));
  out.diagnostics = out.graph->diagnostics;
  out.layout = calc::ComputeLayout(*out.graph);
  out.walg = BuildWalg(out.graph, options);
  walg::CheckPlan(out.walg);
  relalg::LowerOptions lower;
  lower.page = options.page;
  lower.apply_page = options.apply_page;
  relalg::RelPlan lowered = relalg::Lower(out.walg, Nested(options), lower);
  relalg::CheckRel(lowered);
  out.rel = relalg::Rewrite(lowered, options.rewrite);
  sqlgen::RenderOptions render;
  render.ctes = options.ctes;
  out.sql = sqlgen::Render(out.rel, dialect, render);
  out.compile_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace sheetc
