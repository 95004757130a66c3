#include "cayrs/service.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <sstream>

#include "cayrs/errors.hpp"
#include "cayrs/linkage_io.hpp"
#include "cayrs/serialize.hpp"
#include "httplib.h"

namespace cayrs {

namespace {

using Query = std::multimap<std::string, std::string>;

std::string contentHash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<std::string> param(const Query& q, const std::string& key) {
  auto it = q.find(key);
  if (it == q.end()) return std::nullopt;
  return it->second;
}

std::string required(const Query& q, const std::string& key) {
  auto v = param(q, key);
  if (!v || v->empty()) throw inputError("InvalidArgument", "missing query parameter '" + key + "'");
  return *v;
}

std::size_t parseIndex(const std::string& text, const std::string& what) {
  std::size_t value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw inputError("InvalidArgument", what + " '" + text + "' is not a non-negative integer");
  return value;
}

double parseNumber(const std::string& text, const std::string& what) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw inputError("InvalidArgument", what + " '" + text + "' is not a number");
  return value;
}

VertexPair parsePair(const Graph& g, const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 2) throw inputError("InvalidArgument", "vertex pair '" + text + "' must look like u,v");
  return VertexPair(g.id(parts[0]), g.id(parts[1]));
}

Response json(int status, const Json& body) { return Response{status, body.dump(), "application/json"}; }

Response errorResponse(const std::exception& e) {
  int status = 500;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    if (err->name() == "NotFound" || err->name() == "UnknownLinkage")
      status = 404;
    else
      status = err->category() == ErrorCategory::Input ? 400 : 422;
  } else if (dynamic_cast<const nlohmann::json::exception*>(&e)) {
    Json body{{"error", "InvalidArgument"}, {"category", "input"}, {"message", e.what()}};
    return json(400, body);
  }
  return json(status, errorJson(e));
}

const CayleyConfigSpace& requireCCS(const Analysis& a) {
  if (!a.ccs) std::rethrow_exception(a.ccsError);
  return *a.ccs;
}

const ContinuousMotion& componentAt(const Analysis& a, const std::string& text) {
  requireCCS(a);
  const std::size_t i = parseIndex(text, "component index");
  if (i >= a.components.size()) {
    std::ostringstream msg;
    msg << "component " << i << " does not exist; the linkage has " << a.components.size() << " components";
    throw inputError("InvalidArgument", msg.str());
  }
  return a.components[i];
}

Realization realizationFrom(const Analysis& a, const Json& value) {
  const RealizationLiteral lit = parseRealizationValue(value);
  return realize(a.linkage, lit.baseLength, RealizationType::parse(lit.signs));
}

std::shared_ptr<Analysis> runAnalysis(const std::string& id, const LinkageSpec& spec, const Tolerances& tol,
                                      const std::string& base) {
  std::optional<std::pair<std::string, std::string>> override;
  if (!base.empty()) {
    auto parts = split(base, ',');
    if (parts.size() != 2) throw inputError("InvalidArgument", "base '" + base + "' must look like u,v");
    override = std::make_pair(parts[0], parts[1]);
  }
  auto a = std::make_shared<Analysis>();
  a->id = id;
  a->linkage = TDLinkage::create(spec, tol, override);
  try {
    a->ccs = computeCCS(a->linkage);
    a->components = findAllComponents(a->ccs);
    a->warnings = genericityWarnings(*a->ccs);
  } catch (const Error&) {
    a->ccsError = std::current_exception();
    a->ccs.reset();
    a->components.clear();
    a->warnings = checkGeneric(*a->linkage);
  }
  return a;
}

}  // namespace

Service::Service(std::size_t capacity, Tolerances tol) : capacity_(capacity == 0 ? 1 : capacity), tol_(tol) {}

Service::Entry Service::entryFor(const std::string& id,
                                 std::promise<std::shared_ptr<const Analysis>>*& promise) {
  promise = nullptr;
  auto it = entries_.find(id);
  if (it != entries_.end()) {
    touch(id);
    return it->second;
  }
  promise = &pending_[id];
  Entry entry = promise->get_future().share();
  entries_.emplace(id, entry);
  recency_.push_front(id);
  while (entries_.size() > capacity_) {
    entries_.erase(recency_.back());
    recency_.pop_back();
  }
  return entry;
}

void Service::touch(const std::string& id) {
  for (auto it = recency_.begin(); it != recency_.end(); ++it) {
    if (*it == id) {
      recency_.splice(recency_.begin(), recency_, it);
      return;
    }
  }
}

std::shared_ptr<const Analysis> Service::analyze(const std::string& linkageText, const std::string& base) {
  const LinkageSpec spec = parseLinkage(linkageText);
  // Key order and whitespace do not change the identity.
  const std::string id = contentHash(toJson(spec).dump() + "|" + base);

  Entry entry;
  std::promise<std::shared_ptr<const Analysis>>* promise = nullptr;
  {
    std::lock_guard lock(mutex_);
    entry = entryFor(id, promise);
  }
  if (promise) {
    std::shared_ptr<const Analysis> result;
    std::exception_ptr error;
    try {
      result = runAnalysis(id, spec, tol_, base);
    } catch (...) {
      error = std::current_exception();
    }
    std::lock_guard lock(mutex_);
    ++analyses_;
    if (error) {
      promise->set_exception(error);
      auto it = entries_.find(id);
      if (it != entries_.end()) {
        entries_.erase(it);
        recency_.remove(id);
      }
    } else {
      promise->set_value(result);
    }
    pending_.erase(id);
  }
  return entry.get();
}

std::shared_ptr<const Analysis> Service::lookup(const std::string& id) {
  Entry entry;
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(id);
    if (it == entries_.end()) throw inputError("UnknownLinkage", "no linkage with id '" + id + "' is loaded");
    touch(id);
    entry = it->second;
  }
  return entry.get();
}

std::size_t Service::cachedCount() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t Service::analysisCount() const {
  std::lock_guard lock(mutex_);
  return analyses_;
}

Response Service::handle(const std::string& method, const std::string& path, const Query& query,
                         const std::string& body) {
  try {
    std::vector<std::string> seg;
    for (auto& s : split(path, '/'))
      if (!s.empty()) seg.push_back(std::move(s));
    auto notFound = [&]() -> Response {
      return json(404, Json{{"error", "NotFound"}, {"category", "input"}, {"message", method + " " + path}});
    };
    if (seg.empty() || seg[0] != "linkages") return notFound();

    if (seg.size() == 1) {
      if (method != "POST") return notFound();
      auto a = analyze(body, param(query, "base").value_or(""));
      Json out;
      out["id"] = a->id;
      const Json report = checkReportJson(*a->linkage, a->warnings);
      for (auto& [k, v] : report.items()) out[k] = v;
      return json(200, out);
    }

    auto a = lookup(seg[1]);
    const std::string route = seg.size() > 2 ? seg[2] : "";

    if (method == "GET" && seg.size() == 3 && route == "ccs") return json(200, toJson(requireCCS(*a)));

    if (method == "GET" && seg.size() == 3 && route == "components") {
      requireCCS(*a);
      Json list = Json::array();
      for (std::size_t i = 0; i < a->components.size(); ++i) list.push_back(componentSummaryJson(a->components[i], i));
      return json(200, Json{{"components", list}});
    }

    if (method == "GET" && seg.size() == 5 && route == "components") {
      const ContinuousMotion& c = componentAt(*a, seg[3]);
      const std::string& what = seg[4];
      if (what == "samples") {
        const std::size_t n = param(query, "n") ? parseIndex(*param(query, "n"), "n") : 64;
        if (n < 2) throw inputError("InvalidArgument", "n must be at least 2");
        Json list = Json::array();
        for (const auto& r : sampleRealizations(c, UniformSampler(n))) list.push_back(toJson(r));
        return json(200, Json{{"motion", toJson(c)}, {"realizations", list}});
      }
      if (what == "curve3d") {
        const Graph& g = a->linkage->graph();
        const std::array<VertexPair, 3> f{parsePair(g, required(query, "f1")), parsePair(g, required(query, "f2")),
                                          parsePair(g, required(query, "f3"))};
        return json(200, toJson(curve3D(c, f[0], f[1], f[2]), g, f));
      }
      if (what == "trace") {
        std::vector<std::string> vertices;
        for (auto& v : split(required(query, "vertices"), ','))
          if (!v.empty()) vertices.push_back(std::move(v));
        return json(200, toJson(tracedCurves(c, vertices)));
      }
      return notFound();
    }

    if (method == "GET" && seg.size() == 3 && route == "realization") {
      const double length = parseNumber(required(query, "length"), "length");
      const std::string type = required(query, "type");
      return json(200, toJson(realize(a->linkage, length, RealizationType::parse(type))));
    }

    if (method == "POST" && seg.size() == 3 && route == "path") {
      const Json req = Json::parse(body);
      if (!req.contains("from") || !req.contains("to"))
        throw inputError("InvalidArgument", "path request needs 'from' and 'to'");
      const Realization r1 = realizationFrom(*a, req["from"]);
      const Realization r2 = realizationFrom(*a, req["to"]);
      requireCCS(*a);
      Json list = Json::array();
      for (const auto& p : findPath(a->ccs, r1, r2)) list.push_back(toJson(p));
      return json(200, Json{{"paths", list}});
    }

    if (method == "POST" && seg.size() == 3 && route == "closest") {
      const Json req = Json::parse(body);
      if (!req.contains("c1") || !req.contains("c2"))
        throw inputError("InvalidArgument", "closest request needs component indices 'c1' and 'c2'");
      auto index = [&](const Json& v) {
        if (v.is_number_unsigned()) return std::to_string(v.get<std::size_t>());
        if (v.is_string()) return v.get<std::string>();
        throw inputError("InvalidArgument", "component index must be a non-negative integer");
      };
      const ContinuousMotion& c1 = componentAt(*a, index(req["c1"]));
      const ContinuousMotion& c2 = componentAt(*a, index(req["c2"]));
      return json(200, toJson(nearestRealizations(c1, c2)));
    }

    return notFound();
  } catch (const std::exception& e) {
    return errorResponse(e);
  }
}

int Service::bind(const std::string& host, int port) {
  auto server = std::make_shared<httplib::Server>();
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    Query q(req.params.begin(), req.params.end());
    Response r = handle(req.method, req.path, q, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body, r.contentType.c_str());
  };
  server->Get(R"(/.*)", dispatch);
  server->Post(R"(/.*)", dispatch);
  server->Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  const int bound = port == 0 ? server->bind_to_any_port(host) : (server->bind_to_port(host, port) ? port : -1);
  if (bound < 0) return -1;
  server_ = std::move(server);
  return bound;
}

bool Service::serve() { return server_ && server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

bool Service::listen(const std::string& host, int port) { return bind(host, port) >= 0 && serve(); }

}  // namespace cayrs
