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

#ifndef SHEETC_RUNNER_HTTP_H_
#define SHEETC_RUNNER_HTTP_H_

#include <memory>
#include <string>

#include "json.hpp"
#include "sheetc/runner/service.h"

namespace sheetc::runner {

// JSON front end over a Service:
//   POST /compile {spec, dialect}                 -> {sql, diagnostics, compile_ms}
//   POST /query   {spec, bindings, page, session} -> {columns, rows, annotations, from_cache}
//   GET  /explain?stage=&session=                 -> {stage, text}
//   POST /cancel  {session}                       -> {cancelled}
// Errors are {error, kind} with 400 for malformed requests and specs, 422
// for specs that do not compile, 409 for superseded queries and 500 for
// engine failures.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Binds to `port` (0 picks a free one) and returns the bound port.
  int Bind(const std::string& host, int port);
  // Serves until Stop().
  void Listen();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// HTTP status for an error raised while handling a request.
int StatusFor(const std::exception& e);

nlohmann::ordered_json TableToJson(const oracle::Table& table);

}  // namespace sheetc::runner

#endif  // SHEETC_RUNNER_HTTP_H_
