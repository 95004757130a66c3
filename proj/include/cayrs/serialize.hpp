#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "cayrs/cayley_space.hpp"
#include "cayrs/errors.hpp"
#include "cayrs/motion.hpp"
#include "cayrs/realization.hpp"
#include "json.hpp"

namespace cayrs {

using Json = nlohmann::ordered_json;

/// Base length and (uncanonicalized) sign text, e.g. "5:+-".
struct RealizationLiteral {
  double baseLength = 0.0;
  std::string signs;
};

/// Parses `L:signs`. Throws InvalidArgument.
RealizationLiteral parseRealizationLiteral(std::string_view text);
/// Accepts either a literal string or {length|baseLength, type}.
RealizationLiteral parseRealizationValue(const Json& value);

/// Shortest decimal text that reads back to the same double.
std::string formatDouble(double value);

Json pairJson(const Graph& graph, VertexPair p);

/// {tdLow, steps, completeCayleyVector, warnings, baseNonedge, baseNonedges,
/// construction[, failingStep, diagnostic]}
Json checkReportJson(const TDLinkage& linkage, const std::vector<std::string>& warnings);

/// {baseLength, type, points, cayleyVector}; points include cluster passengers.
Json toJson(const Realization& r);
Json toJson(const CayleyConfigSpace& ccs);
Json toJson(const MotionLeg& leg, const CayleyConfigSpace& ccs);
Json toJson(const ContinuousMotion& motion);
/// {index, legCount, folded, intervals: [{type, lower, upper}]}
Json componentSummaryJson(const ContinuousMotion& motion, std::size_t index);
Json toJson(const Curve3D& curve, const Graph& graph, const std::array<VertexPair, 3>& nonedges);
Json toJson(const TracedCurves& curves);
Json toJson(const NearestPair& pair);

/// {error, category, message} plus a payload for errors that carry one.
Json errorJson(const std::exception& e);

/// `param,leg,type,x,y,z`, one row per sample.
std::string curveCsv(const Curve3D& curve);
/// `param,leg,type,x,y` for one traced vertex.
std::string traceCsv(const TracedCurves& curves, const std::string& vertex);

}  // namespace cayrs
