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

#ifndef SHEETC_RUNNER_ENGINE_H_
#define SHEETC_RUNNER_ENGINE_H_

#include <memory>

#include "sheetc/compiler/compiler.h"
#include "sheetc/oracle/oracle.h"
#include "sheetc/runner/sqlite_db.h"

namespace sheetc::runner {

// Executes compiled ansi SQL and returns the flat result.
oracle::Table Execute(Database& db, const Compiled& compiled);

// Compile plus Execute. The dialect in `options` is forced to ansi.
oracle::Table RunSpec(Database& db, std::shared_ptr<const spec::ResolvedSpec> spec,
                      CompileOptions options = {});

}  // namespace sheetc::runner

#endif  // SHEETC_RUNNER_ENGINE_H_
