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

#include "sheetc/compiler/resolve.h"

#include <algorithm>

#include "sheetc/calc/calc_graph.h"
#include "sheetc/calc/layout.h"

namespace sheetc {

spec::OutputInfo NestedOutputSchema(const spec::ResolvedSpec& nested) {
  auto shared = std::make_shared<const spec::ResolvedSpec>(nested);
  calc::CalcGraph graph = calc::AnalyzeSpec(shared);
  calc::OutputLayout layout = calc::ComputeLayout(graph);
  spec::OutputInfo info;
  for (const std::string& c : layout.columns) {
    ScalarType t = graph.column(c).expr.type;
    info.columns.push_back({c, t == ScalarType::kError ? ScalarType::kText : t});
  }
  const spec::ValidatedSpec& vs = nested.validated;
  if (layout.grain == vs.totals()) {
    info.unique_keys.push_back({});
  } else if (layout.grain > 0) {
    const auto& keys = vs.levels[layout.grain].grouping_keys;
    bool visible = std::all_of(keys.begin(), keys.end(), [&](const std::string& k) {
      return std::find(layout.columns.begin(), layout.columns.end(), k) != layout.columns.end();
    });
    if (visible) info.unique_keys.push_back(keys);
  }
  return info;
}

std::shared_ptr<const spec::ResolvedSpec> Resolve(const spec::WorksheetSpec& spec,
                                                  const spec::Catalog& catalog,
                                                  const std::map<std::string, Value>& bindings) {
  spec::ValidatedSpec vs = spec::ValidateSpec(spec);
  return std::make_shared<const spec::ResolvedSpec>(
      spec::ResolveInputs(vs, catalog, bindings, NestedOutputSchema));
}

}  // namespace sheetc
