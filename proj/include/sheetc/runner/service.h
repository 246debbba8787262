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

#ifndef SHEETC_RUNNER_SERVICE_H_
#define SHEETC_RUNNER_SERVICE_H_

#include <atomic>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "sheetc/compiler/compiler.h"
#include "sheetc/runner/sqlite_db.h"

namespace sheetc::runner {

inline constexpr int64_t kPageSize = 1000;

// Result-cache key: independent of column names and column order.
struct CacheKey {
  std::string digest;
  // Structural fingerprint of every output column, in output order.
  std::vector<std::string> columns;
};

CacheKey MakeCacheKey(const Compiled& compiled, const std::map<std::string, Value>& bindings,
                      const std::string& dialect, const std::optional<spec::PageSpec>& page);

struct CachedResult {
  std::vector<std::string> fingerprints;  // per column
  oracle::Table table;
};

// Bounded LRU map from digest to result.
class ResultCache {
 public:
  explicit ResultCache(size_t capacity = 256) : capacity_(capacity) {}
  std::optional<CachedResult> Get(const std::string& digest);
  void Put(const std::string& digest, CachedResult result);
  size_t size() const;

 private:
  size_t capacity_;
  mutable std::mutex mu_;
  std::list<std::pair<std::string, CachedResult>> entries_;
  std::unordered_map<std::string, std::list<std::pair<std::string, CachedResult>>::iterator> index_;
};

// Cached rows relabelled for a request whose columns carry `key.columns`.
oracle::Table Relabel(const CachedResult& cached, const CacheKey& key,
                      const std::vector<spec::Attribute>& columns);

struct QueryRequest {
  nlohmann::ordered_json spec;
  std::map<std::string, Value> bindings;
  int64_t page = 1;  // 1-based, kPageSize rows each
  std::string session;
};

struct QueryResponse {
  oracle::Table table;
  std::vector<std::string> annotations;
  bool from_cache = false;
  double compile_ms = 0;
};

struct CompileResponse {
  Compiled compiled;
  std::string sql;
};

struct ServiceOptions {
  // Probability of re-executing on a cache hit and checking the cached rows.
  double verify_cache = 0;
  uint64_t seed = 1;
  // Called right before a query reaches the database.
  std::function<void(const std::string& session)> before_execute;
};

// Compile and query front end shared by the CLI and the HTTP server.
class Service {
 public:
  Service(std::shared_ptr<Database> db, spec::Catalog catalog, ServiceOptions options = {});

  CompileResponse Compile(const nlohmann::ordered_json& spec, const std::string& dialect,
                          const std::map<std::string, Value>& bindings = {});
  // Throws Cancelled when a newer query on the same session superseded it.
  QueryResponse Query(const QueryRequest& request);
  // Cancels the in-flight query of `session`; false when there is none.
  bool Cancel(const std::string& session);
  // IR dump of a session's last successful spec: graph, walg, rel or sql.
  std::string Explain(const std::string& session, const std::string& stage);

  int engine_queries() const { return engine_queries_.load(); }
  const spec::Catalog& catalog() const { return catalog_; }

 private:
  struct Session {
    uint64_t generation = 0;
    std::shared_ptr<std::atomic<bool>> in_flight;
    std::optional<nlohmann::ordered_json> spec;
    std::map<std::string, Value> bindings;
  };

  std::shared_ptr<const spec::ResolvedSpec> ResolveJson(const nlohmann::ordered_json& spec,
                                                        const std::map<std::string, Value>& bindings);
  void LoadCsvInputs(const spec::WorksheetSpec& spec);

  std::shared_ptr<Database> db_;
  spec::Catalog catalog_;
  ServiceOptions options_;
  ResultCache cache_;
  std::mutex mu_;
  std::map<std::string, Session> sessions_;
  std::mt19937_64 rng_;
  std::atomic<int> engine_queries_{0};
};

std::string Explain(const Compiled& compiled, const std::string& stage);

}  // namespace sheetc::runner

#endif  // SHEETC_RUNNER_SERVICE_H_
