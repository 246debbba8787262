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

#ifndef SHEETC_COMPILER_RESOLVE_H_
#define SHEETC_COMPILER_RESOLVE_H_

#include <map>
#include <memory>
#include <string>

#include "sheetc/common/value.h"
#include "sheetc/spec/resolve.h"

namespace sheetc {

// Output schema of a worksheet used as an input: its visible columns in
// layout order and the grain keys when they are all visible.
spec::OutputInfo NestedOutputSchema(const spec::ResolvedSpec& nested);

// ParseSpec output to a fully resolved spec, nested worksheets included.
std::shared_ptr<const spec::ResolvedSpec> Resolve(
    const spec::WorksheetSpec& spec, const spec::Catalog& catalog,
    const std::map<std::string, Value>& bindings = {});

}  // namespace sheetc

#endif  // SHEETC_COMPILER_RESOLVE_H_
