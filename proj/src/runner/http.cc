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

#include "sheetc/runner/http.h"

#include "httplib.h"
#include "sheetc/common/errors.h"

namespace sheetc::runner {

using Json = nlohmann::ordered_json;

int StatusFor(const std::exception& e) {
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 400;
  const auto* err = dynamic_cast<const Error*>(&e);
  if (!err) return 500;
  const std::string& k = err->kind();
  if (k == "SyntaxError" || k == "SchemaError") return 400;
  if (k == "Cancelled") return 409;
  if (k == "ExecutionError" || k == "InternalError" || k == "IOError") return 500;
  return 422;
}

Json TableToJson(const oracle::Table& table) {
  Json cols = Json::array();
  for (const auto& c : table.columns) {
    cols.push_back({{"name", c.name}, {"type", std::string(ScalarTypeName(c.type))}});
  }
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    Json row = Json::array();
    for (const Value& v : r) row.push_back(spec::ValueToJson(v));
    rows.push_back(std::move(row));
  }
  return Json{{"columns", cols}, {"rows", rows}};
}

namespace {

Json Diagnostics(const Compiled& c) {
  Json out = Json::array();
  for (const auto& d : c.diagnostics) {
    out.push_back({{"column", d.column}, {"severity", d.severity}, {"message", d.message},
                   {"offset", d.offset}, {"length", d.length}});
  }
  return out;
}

std::map<std::string, Value> Bindings(const Json& body) {
  std::map<std::string, Value> out;
  if (!body.contains("bindings")) return out;
  for (const auto& [k, v] : body["bindings"].items()) out[k] = spec::ValueFromJsonUntyped(v);
  return out;
}

const Json& Required(const Json& body, const char* key) {
  if (!body.is_object() || !body.contains(key)) {
    throw SchemaError(std::string("request needs `") + key + "`");
  }
  return body[key];
}

void Reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename F>
void Handle(httplib::Response& res, F&& f) {
  try {
    Reply(res, 200, f());
  } catch (const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    Reply(res, StatusFor(e), Json{{"error", e.what()}, {"kind", err ? err->kind() : "Error"}});
  }
}

}  // namespace

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(new Impl{service, {}}) {
  Service& svc = service;
  auto& s = impl_->server;
  s.Post("/compile", [&svc](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&] {
      Json body = Json::parse(req.body);
      std::string dialect = body.value("dialect", std::string("ansi"));
      CompileResponse r = svc.Compile(Required(body, "spec"), dialect, Bindings(body));
      return Json{{"sql", r.sql},
                  {"diagnostics", Diagnostics(r.compiled)},
                  {"compile_ms", r.compiled.compile_ms}};
    });
  });
  s.Post("/query", [&svc](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&] {
      Json body = Json::parse(req.body);
      QueryRequest q;
      q.spec = Required(body, "spec");
      q.bindings = Bindings(body);
      q.page = body.value("page", int64_t{1});
      q.session = body.value("session", std::string("default"));
      QueryResponse r = svc.Query(q);
      Json out = TableToJson(r.table);
      out["annotations"] = r.annotations;
      out["from_cache"] = r.from_cache;
      out["page"] = q.page;
      out["session"] = q.session;
      return out;
    });
  });
  s.Get("/explain", [&svc](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&] {
      std::string stage = req.has_param("stage") ? req.get_param_value("stage") : "sql";
      std::string session = req.has_param("session") ? req.get_param_value("session") : "default";
      return Json{{"stage", stage}, {"text", svc.Explain(session, stage)}};
    });
  });
  s.Post("/cancel", [&svc](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&] {
      Json body = Json::parse(req.body);
      return Json{{"cancelled", svc.Cancel(Required(body, "session").get<std::string>())}};
    });
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  if (!impl_->server.bind_to_port(host, port)) throw IOError("cannot bind port " + std::to_string(port));
  return port;
}

void HttpServer::Listen() { impl_->server.listen_after_bind(); }

void HttpServer::Stop() { impl_->server.stop(); }

}  // namespace sheetc::runner
