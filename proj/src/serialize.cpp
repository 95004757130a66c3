#include "cayrs/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <system_error>

namespace cayrs {

std::string formatDouble(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

RealizationLiteral parseRealizationLiteral(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw inputError("InvalidArgument", "realization literal '" + std::string(text) + "' must look like L:signs");
  const std::string_view num = text.substr(0, colon);
  RealizationLiteral out;
  auto res = std::from_chars(num.data(), num.data() + num.size(), out.baseLength);
  if (res.ec != std::errc() || res.ptr != num.data() + num.size())
    throw inputError("InvalidArgument", "bad base length in realization literal '" + std::string(text) + "'");
  out.signs = std::string(text.substr(colon + 1));
  RealizationType::parse(out.signs);
  return out;
}

RealizationLiteral parseRealizationValue(const Json& value) {
  if (value.is_string()) return parseRealizationLiteral(value.get<std::string>());
  if (!value.is_object()) throw inputError("InvalidArgument", "realization must be a string L:signs or an object");
  const char* key = value.contains("length") ? "length" : "baseLength";
  if (!value.contains(key) || !value[key].is_number() || !value.contains("type") || !value["type"].is_string())
    throw inputError("InvalidArgument", "realization object needs a numeric length and a type string");
  RealizationLiteral out{value[key].get<double>(), value["type"].get<std::string>()};
  RealizationType::parse(out.signs);
  return out;
}

Json pairJson(const Graph& graph, VertexPair p) { return Json::array({graph.name(p.first), graph.name(p.second)}); }

Json checkReportJson(const TDLinkage& linkage, const std::vector<std::string>& warnings) {
  const auto& g = linkage.graph();
  Json out;
  out["tdLow"] = isLow(linkage);
  out["steps"] = linkage.stepCount();
  Json vec = Json::array();
  for (const auto& p : linkage.completeCayleyVector()) vec.push_back(pairJson(g, p));
  out["completeCayleyVector"] = vec;
  out["warnings"] = warnings;
  out["baseNonedge"] = pairJson(g, linkage.baseNonedge());
  Json bases = Json::array();
  for (const auto& p : linkage.baseNonedges()) bases.push_back(pairJson(g, p));
  out["baseNonedges"] = bases;
  Json steps = Json::array();
  for (const auto& s : linkage.steps())
    steps.push_back({{"vertex", g.name(s.vertex)}, {"anchors", Json::array({g.name(s.anchor1), g.name(s.anchor2)})}});
  out["construction"] = steps;
  const auto& report = linkage.lowComplexity();
  if (!report.low) {
    if (report.failingStep) out["failingStep"] = *report.failingStep + 1;
    out["diagnostic"] = report.diagnostic;
  }
  return out;
}

Json toJson(const Realization& r) {
  Json out;
  out["baseLength"] = r.baseLength();
  out["type"] = r.type().str();
  Json points = Json::object();
  for (const auto& [name, p] : restoreDecorations(r)) points[name] = Json::array({p.x, p.y});
  out["points"] = points;
  out["cayleyVector"] = completeCayleyDistanceVector(r);
  return out;
}

Json toJson(const CayleyConfigSpace& ccs) {
  Json out;
  Json non = Json::array();
  for (const auto& [lo, hi] : ccs.nonOriented) non.push_back(Json::array({lo, hi}));
  out["nonOriented"] = non;
  Json oriented = Json::array();
  for (const auto& o : ccs.oriented) {
    Json ivs = Json::array();
    for (const auto& iv : o.intervals) ivs.push_back(Json::array({iv.lower, iv.upper}));
    oriented.push_back({{"type", o.type.str()}, {"intervals", ivs}});
  }
  out["oriented"] = oriented;
  out["warnings"] = genericityWarnings(ccs);
  return out;
}

Json toJson(const MotionLeg& leg, const CayleyConfigSpace& ccs) {
  const auto& iv = ccs.at(leg.interval);
  Json out;
  out["type"] = iv.type.str();
  out["lower"] = iv.lower;
  out["upper"] = iv.upper;
  out["enterAt"] = sideName(leg.enterAt);
  out["exitAt"] = sideName(leg.exitAt);
  if (leg.clipStart) out["clipStart"] = *leg.clipStart;
  if (leg.clipEnd) out["clipEnd"] = *leg.clipEnd;
  return out;
}

Json toJson(const ContinuousMotion& motion) {
  Json out;
  out["kind"] = motion.kind == MotionKind::Component ? "component" : "path";
  Json legs = Json::array();
  for (const auto& leg : motion.legs) legs.push_back(toJson(leg, *motion.ccs));
  out["legs"] = legs;
  if (motion.folded) out["folded"] = true;
  return out;
}

Json componentSummaryJson(const ContinuousMotion& motion, std::size_t index) {
  Json out;
  out["index"] = index;
  out["legCount"] = motion.legs.size();
  out["folded"] = motion.folded;
  Json ivs = Json::array();
  for (const auto& leg : motion.legs) {
    const auto& iv = motion.ccs->at(leg.interval);
    ivs.push_back({{"type", iv.type.str()}, {"lower", iv.lower}, {"upper", iv.upper}});
  }
  out["intervals"] = ivs;
  return out;
}

Json toJson(const Curve3D& curve, const Graph& graph, const std::array<VertexPair, 3>& nonedges) {
  Json out;
  Json axes = Json::array();
  for (const auto& p : nonedges) axes.push_back(pairJson(graph, p));
  out["nonedges"] = axes;
  Json points = Json::array();
  for (const auto& p : curve.points) points.push_back(Json::array({p[0], p[1], p[2]}));
  out["points"] = points;
  Json labels = Json::array();
  for (const auto& t : curve.typeLabels) labels.push_back(t.str());
  out["typeLabels"] = labels;
  Json params = Json::array();
  for (const auto& [leg, l] : curve.sampleParams) params.push_back(Json::array({leg, l}));
  out["sampleParams"] = params;
  return out;
}

Json toJson(const TracedCurves& curves) {
  Json out;
  Json polylines = Json::object();
  for (const auto& [name, pts] : curves.curves) {
    Json line = Json::array();
    for (const auto& p : pts) line.push_back(Json::array({p.x, p.y}));
    polylines[name] = line;
  }
  out["curves"] = polylines;
  Json labels = Json::array();
  for (const auto& t : curves.typeLabels) labels.push_back(t.str());
  out["typeLabels"] = labels;
  Json params = Json::array();
  for (const auto& [leg, l] : curves.sampleParams) params.push_back(Json::array({leg, l}));
  out["sampleParams"] = params;
  return out;
}

Json toJson(const NearestPair& pair) {
  Json out;
  out["first"] = toJson(pair.first);
  out["second"] = toJson(pair.second);
  out["distance"] = pair.distance;
  return out;
}

Json errorJson(const std::exception& e) {
  Json out;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    out["error"] = err->name();
    out["category"] = err->category() == ErrorCategory::Input ? "input" : "domain";
    out["message"] = err->what();
    if (const auto* u = dynamic_cast<const Unrealizable*>(&e)) out["step"] = u->step() + 1;
    if (const auto* nc = dynamic_cast<const NotConnected*>(&e)) {
      out["fromComponent"] = toJson(nc->fromComponent());
      out["toComponent"] = toJson(nc->toComponent());
      out["nearest"] = toJson(nc->nearest());
    }
  } else {
    out["error"] = "InternalError";
    out["category"] = "internal";
    out["message"] = e.what();
  }
  return out;
}

namespace {

template <typename Row>
std::string csv(const std::string& header, std::size_t rows, Row&& row) {
  std::ostringstream out;
  out << header << '\n';
  for (std::size_t i = 0; i < rows; ++i) out << row(i) << '\n';
  return out.str();
}

}  // namespace

std::string curveCsv(const Curve3D& curve) {
  return csv("param,leg,type,x,y,z", curve.points.size(), [&](std::size_t i) {
    const auto& p = curve.points[i];
    return formatDouble(curve.sampleParams[i].second) + ',' + std::to_string(curve.sampleParams[i].first) + ',' +
           curve.typeLabels[i].str() + ',' + formatDouble(p[0]) + ',' + formatDouble(p[1]) + ',' + formatDouble(p[2]);
  });
}

std::string traceCsv(const TracedCurves& curves, const std::string& vertex) {
  auto it = curves.curves.find(vertex);
  if (it == curves.curves.end()) throw inputError("UnknownVertex", "vertex '" + vertex + "' was not traced");
  const auto& pts = it->second;
  return csv("param,leg,type,x,y", pts.size(), [&](std::size_t i) {
    return formatDouble(curves.sampleParams[i].second) + ',' + std::to_string(curves.sampleParams[i].first) + ',' +
           curves.typeLabels[i].str() + ',' + formatDouble(pts[i].x) + ',' + formatDouble(pts[i].y);
  });
}

}  // namespace cayrs
