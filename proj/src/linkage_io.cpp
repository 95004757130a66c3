#include "cayrs/linkage_io.hpp"

#include <fstream>
#include <sstream>

#include "cayrs/errors.hpp"

namespace cayrs {

using nlohmann::json;

namespace {

[[noreturn]] void schemaError(const std::string& what) { throw inputError("InvalidLinkage", what); }

const json& member(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) schemaError(std::string(where) + " is missing '" + key + "'");
  return *it;
}

std::string asString(const json& v, const char* where) {
  if (!v.is_string()) schemaError(std::string(where) + " must be a string");
  return v.get<std::string>();
}

double asNumber(const json& v, const char* where) {
  if (!v.is_number()) schemaError(std::string(where) + " must be a number");
  return v.get<double>();
}

std::pair<std::string, std::string> asPair(const json& v, const char* where) {
  if (!v.is_array() || v.size() != 2) schemaError(std::string(where) + " must be a two-element array");
  return {asString(v[0], where), asString(v[1], where)};
}

}  // namespace

LinkageSpec parseLinkage(const json& doc) {
  if (!doc.is_object()) schemaError("linkage document must be a JSON object");
  LinkageSpec spec;

  const json& vertices = member(doc, "vertices", "linkage");
  if (!vertices.is_array()) schemaError("'vertices' must be an array");
  for (const auto& v : vertices) spec.vertices.push_back(asString(v, "vertex identifier"));

  const json& bars = member(doc, "bars", "linkage");
  if (!bars.is_array()) schemaError("'bars' must be an array");
  for (const auto& b : bars) {
    if (!b.is_object()) schemaError("bar entries must be objects");
    spec.bars.push_back(BarSpec{asString(member(b, "u", "bar"), "bar 'u'"), asString(member(b, "v", "bar"), "bar 'v'"),
                                asNumber(member(b, "length", "bar"), "bar 'length'")});
  }

  if (auto it = doc.find("clusters"); it != doc.end()) {
    if (!it->is_array()) schemaError("'clusters' must be an array");
    for (const auto& c : *it) {
      if (!c.is_object()) schemaError("cluster entries must be objects");
      ClusterSpec cluster;
      const json& coords = member(c, "coords", "cluster");
      if (!coords.is_object()) schemaError("cluster 'coords' must be an object");
      for (const auto& [name, xy] : coords.items()) {
        if (!xy.is_array() || xy.size() != 2) schemaError("cluster coordinate must be [x, y]");
        cluster.coords[name] = Vec2{asNumber(xy[0], "coordinate"), asNumber(xy[1], "coordinate")};
      }
      auto anchors = asPair(member(c, "anchors", "cluster"), "cluster 'anchors'");
      cluster.anchors = {anchors.first, anchors.second};
      spec.clusters.push_back(std::move(cluster));
    }
  }

  if (auto it = doc.find("baseNonedge"); it != doc.end() && !it->is_null())
    spec.baseNonedge = asPair(*it, "'baseNonedge'");
  return spec;
}

LinkageSpec parseLinkage(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schemaError(std::string("malformed JSON: ") + e.what());
  }
  return parseLinkage(doc);
}

LinkageSpec loadLinkage(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw inputError("InvalidLinkage", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseLinkage(buf.str());
}

json toJson(const LinkageSpec& spec) {
  json doc;
  doc["vertices"] = spec.vertices;
  doc["bars"] = json::array();
  for (const auto& b : spec.bars) doc["bars"].push_back({{"u", b.u}, {"v", b.v}, {"length", b.length}});
  if (!spec.clusters.empty()) {
    doc["clusters"] = json::array();
    for (const auto& c : spec.clusters) {
      json coords = json::object();
      for (const auto& [v, p] : c.coords) coords[v] = {p.x, p.y};
      doc["clusters"].push_back({{"coords", coords}, {"anchors", {c.anchors[0], c.anchors[1]}}});
    }
  }
  if (spec.baseNonedge) doc["baseNonedge"] = {spec.baseNonedge->first, spec.baseNonedge->second};
  return doc;
}

}  // namespace cayrs
