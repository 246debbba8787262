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

#include "sheetc/runner/engine.h"

namespace sheetc::runner {

oracle::Table Execute(Database& db, const Compiled& compiled) {
  return db.Query(compiled.sql.text, compiled.sql.columns);
}

oracle::Table RunSpec(Database& db, std::shared_ptr<const spec::ResolvedSpec> spec,
                      CompileOptions options) {
  options.dialect = "ansi";
  return Execute(db, Compile(std::move(spec), options));
}

}  // namespace sheetc::runner
