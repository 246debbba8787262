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

#include "sheetc/runner/service.h"

#include <algorithm>

#include "sheetc/common/errors.h"
#include "sheetc/compiler/resolve.h"
#include "sheetc/runner/csv.h"

namespace sheetc::runner {

namespace {

std::string Hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void DigestSpec(const spec::ResolvedSpec& rs, std::string& out) {
  nlohmann::ordered_json doc = spec::SpecToJson(rs.spec());
  for (const char* k : {"inputs", "joins", "links"}) {
    if (doc.contains(k)) out += std::string(k) + "=" + doc[k].dump() + ";";
  }
  for (const spec::ResolvedInput& in : rs.inputs) {
    if (!in.worksheet) continue;
    out += "nested[" + in.source.alias + "]=" + spec::SerializeSpec(in.worksheet->spec()) + ";";
    DigestSpec(*in.worksheet, out);
  }
}

}  // namespace

CacheKey MakeCacheKey(const Compiled& compiled, const std::map<std::string, Value>& bindings,
                      const std::string& dialect, const std::optional<spec::PageSpec>& page) {
  const calc::CalcGraph& g = *compiled.graph;
  std::vector<std::string> fp = calc::Fingerprints(g);
  auto column_fp = [&](const std::string& name) { return fp[g.by_name.at(name)]; };
  std::map<std::string, std::string> annotation_of;
  for (const std::string& c : compiled.layout.annotated) annotation_of[calc::AnnotationName(c)] = c;

  CacheKey key;
  for (const spec::Attribute& a : compiled.sql.columns) {
    auto it = annotation_of.find(a.name);
    key.columns.push_back(it != annotation_of.end() ? "multi:" + column_fp(it->second)
                                                    : column_fp(a.name));
  }
  std::vector<std::string> outputs = key.columns;
  std::sort(outputs.begin(), outputs.end());
  std::vector<std::string> filters;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].kind == calc::Node::Kind::kFilter && g.nodes[i].live) filters.push_back(fp[i]);
  }
  std::sort(filters.begin(), filters.end());

  std::string text = "out:";
  for (const auto& s : outputs) text += s + ",";
  text += "filters:";
  for (const auto& s : filters) text += s + ",";
  const spec::ValidatedSpec& vs = g.spec->validated;
  text += "grain:" + std::to_string(vs.grain) + ";";
  for (const spec::LevelInfo& l : vs.levels) {
    text += "level(";
    for (const std::string& k : l.own_keys) text += column_fp(k) + ",";
    text += "|";
    for (const spec::OrderItem& o : l.ordering) {
      text += column_fp(o.column) + (o.direction == spec::Direction::kDesc ? "-" : "+") + ",";
    }
    text += l.collapsed ? ")c" : ")";
  }
  DigestSpec(*g.spec, text);
  for (const auto& [name, v] : bindings) {
    text += "bind:" + name + "=" + std::to_string(v.index()) + ":" + ValueToString(v) + ";";
  }
  text += "dialect:" + dialect + ";";
  if (page) text += "page:" + std::to_string(page->limit) + "," + std::to_string(page->offset);
  key.digest = Hex(calc::Fnv1a(text)) + Hex(calc::Fnv1a(text, 0x9e3779b97f4a7c15ull));
  return key;
}

std::optional<CachedResult> ResultCache::Get(const std::string& digest) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = index_.find(digest);
  if (it == index_.end()) return std::nullopt;
  entries_.splice(entries_.begin(), entries_, it->second);
  return it->second->second;
}

void ResultCache::Put(const std::string& digest, CachedResult result) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = index_.find(digest);
  if (it != index_.end()) {
    it->second->second = std::move(result);
    entries_.splice(entries_.begin(), entries_, it->second);
    return;
  }
  entries_.emplace_front(digest, std::move(result));
  index_[digest] = entries_.begin();
  while (entries_.size() > capacity_) {
    index_.erase(entries_.back().first);
    entries_.pop_back();
  }
}

size_t ResultCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

oracle::Table Relabel(const CachedResult& cached, const CacheKey& key,
                      const std::vector<spec::Attribute>& columns) {
  std::vector<size_t> from;
  for (const std::string& fp : key.columns) {
    auto it = std::find(cached.fingerprints.begin(), cached.fingerprints.end(), fp);
    if (it == cached.fingerprints.end()) throw InternalError("cache entry lacks a column");
    from.push_back(static_cast<size_t>(it - cached.fingerprints.begin()));
  }
  oracle::Table out;
  out.columns = columns;
  for (const auto& row : cached.table.rows) {
    std::vector<Value> r;
    for (size_t j : from) r.push_back(row[j]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

std::string Explain(const Compiled& compiled, const std::string& stage) {
  if (stage == "graph") return calc::GraphToDot(*compiled.graph);
  if (stage == "walg") return walg::ExplainWalg(compiled.walg);
  if (stage == "rel") return relalg::ExplainRel(compiled.rel);
  if (stage == "sql") return compiled.sql.text;
  throw ValidationError("unknown explain stage `" + stage + "` (graph, walg, rel, sql)");
}

Service::Service(std::shared_ptr<Database> db, spec::Catalog catalog, ServiceOptions options)
    : db_(std::move(db)), catalog_(std::move(catalog)), options_(std::move(options)),
      rng_(options_.seed) {}

void Service::LoadCsvInputs(const spec::WorksheetSpec& spec) {
  for (const spec::InputSource& in : spec.inputs) {
    if (in.kind != spec::InputSource::Kind::kCsv) continue;
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (catalog_.FindTable(in.ref)) continue;
    }
    spec::TableInfo info = LoadCsv(*db_, in.csv_path, in.ref, in.schema);
    std::lock_guard<std::mutex> lock(mu_);
    catalog_.AddTable(std::move(info));
  }
}

std::shared_ptr<const spec::ResolvedSpec> Service::ResolveJson(
    const nlohmann::ordered_json& doc, const std::map<std::string, Value>& bindings) {
  spec::WorksheetSpec ws = spec::SpecFromJson(doc);
  LoadCsvInputs(ws);
  spec::Catalog catalog;
  {
    std::lock_guard<std::mutex> lock(mu_);
    catalog = catalog_;
  }
  return Resolve(ws, catalog, bindings);
}

CompileResponse Service::Compile(const nlohmann::ordered_json& spec, const std::string& dialect,
                                 const std::map<std::string, Value>& bindings) {
  CompileOptions options;
  options.dialect = dialect;
  CompileResponse out;
  out.compiled = sheetc::Compile(ResolveJson(spec, bindings), options);
  out.sql = out.compiled.sql.text;
  return out;
}

QueryResponse Service::Query(const QueryRequest& request) {
  if (request.page < 1) throw PageOutOfRange("pages start at 1");
  uint64_t generation = 0;
  auto token = std::make_shared<std::atomic<bool>>(false);
  {
    std::lock_guard<std::mutex> lock(mu_);
    Session& s = sessions_[request.session];
    generation = ++s.generation;
    if (s.in_flight) s.in_flight->store(true);
    s.in_flight = token;
  }
  auto superseded = [&] {
    std::lock_guard<std::mutex> lock(mu_);
    return sessions_[request.session].generation != generation;
  };

  CompileOptions options;
  options.page = spec::PageSpec{kPageSize, (request.page - 1) * kPageSize};
  Compiled compiled = sheetc::Compile(ResolveJson(request.spec, request.bindings), options);
  CacheKey key = MakeCacheKey(compiled, request.bindings, options.dialect, options.page);

  QueryResponse out;
  out.compile_ms = compiled.compile_ms;
  out.annotations = compiled.rel.output.annotated;
  std::optional<CachedResult> hit = cache_.Get(key.digest);
  if (hit) {
    out.table = Relabel(*hit, key, compiled.sql.columns);
    out.from_cache = true;
    bool verify = false;
    if (options_.verify_cache > 0) {
      std::lock_guard<std::mutex> lock(mu_);
      verify = std::uniform_real_distribution<double>(0, 1)(rng_) < options_.verify_cache;
    }
    if (verify) {
      ++engine_queries_;
      oracle::Table fresh = db_->Query(compiled.sql.text, compiled.sql.columns, token.get());
      oracle::Report r = oracle::Compare(fresh, out.table);
      if (!r.ok) throw InternalError("cache entry differs from re-execution: " + r.summary);
    }
  } else {
    if (options_.before_execute) options_.before_execute(request.session);
    if (token->load() || superseded()) throw Cancelled("query superseded by a newer request");
    ++engine_queries_;
    out.table = db_->Query(compiled.sql.text, compiled.sql.columns, token.get());
  }
  if (out.table.rows.empty() && request.page > 1) {
    throw PageOutOfRange("page " + std::to_string(request.page) + " is past the last row");
  }

  std::lock_guard<std::mutex> lock(mu_);
  Session& s = sessions_[request.session];
  if (s.generation != generation) throw Cancelled("query superseded by a newer request");
  s.in_flight.reset();
  s.spec = request.spec;
  s.bindings = request.bindings;
  if (!out.from_cache) cache_.Put(key.digest, CachedResult{key.columns, out.table});
  return out;
}

bool Service::Cancel(const std::string& session) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(session);
  if (it == sessions_.end() || !it->second.in_flight) return false;
  it->second.in_flight->store(true);
  ++it->second.generation;
  it->second.in_flight.reset();
  return true;
}

std::string Service::Explain(const std::string& session, const std::string& stage) {
  nlohmann::ordered_json spec;
  std::map<std::string, Value> bindings;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = sessions_.find(session);
    if (it == sessions_.end() || !it->second.spec) {
      throw ValidationError("session `" + session + "` has no spec to explain");
    }
    spec = *it->second.spec;
    bindings = it->second.bindings;
  }
  CompileOptions options;
  return runner::Explain(sheetc::Compile(ResolveJson(spec, bindings), options), stage);
}

}  // namespace sheetc::runner
