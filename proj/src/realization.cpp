#include "cayrs/realization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cayrs/errors.hpp"

namespace cayrs {

// ---------------------------------------------------------------------------
// RealizationType
// ---------------------------------------------------------------------------

RealizationType::RealizationType(std::vector<std::int8_t> signs) : signs_(std::move(signs)) {
  for (auto s : signs_)
    if (s < -1 || s > 1) throw inputError("InvalidArgument", "realization type entries must be -1, 0 or +1");
  canonicalize(signs_);
}

RealizationType RealizationType::parse(std::string_view text) {
  std::vector<std::int8_t> signs;
  signs.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '+': signs.push_back(1); break;
      case '-': signs.push_back(-1); break;
      case '0': signs.push_back(0); break;
      default:
        throw inputError("InvalidArgument", "realization type '" + std::string(text) + "' must use only +, - and 0");
    }
  }
  return RealizationType(std::move(signs));
}

bool RealizationType::canonicalize(std::vector<std::int8_t>& signs) {
  auto first = std::find_if(signs.begin(), signs.end(), [](std::int8_t s) { return s != 0; });
  if (first == signs.end() || *first > 0) return false;
  for (auto& s : signs) s = static_cast<std::int8_t>(-s);
  return true;
}

bool RealizationType::hasZero() const { return std::find(signs_.begin(), signs_.end(), 0) != signs_.end(); }

std::string RealizationType::str() const {
  std::string out;
  out.reserve(signs_.size());
  for (auto s : signs_) out.push_back(s > 0 ? '+' : (s < 0 ? '-' : '0'));
  return out;
}

RealizationType RealizationType::flipped(std::size_t k) const {
  auto signs = signs_;
  signs.at(k) = static_cast<std::int8_t>(-signs[k]);
  return RealizationType(std::move(signs));
}

RealizationType RealizationType::collinearAt(std::size_t k) const {
  auto signs = signs_;
  signs.at(k) = 0;
  return RealizationType(std::move(signs));
}

std::vector<RealizationType> canonicalTypes(std::size_t steps) {
  if (steps == 0) return {RealizationType{}};
  if (steps > 63) throw domainError("TooManySteps", "too many construction steps to enumerate realization types");
  const std::uint64_t count = std::uint64_t{1} << (steps - 1);
  std::vector<RealizationType> out;
  out.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::vector<std::int8_t> signs(steps, 1);
    for (std::size_t j = 1; j < steps; ++j)
      if ((mask >> (steps - 1 - j)) & 1u) signs[j] = -1;
    out.emplace_back(std::move(signs));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forward solve
// ---------------------------------------------------------------------------

double StepProbe::collinearity() const { return std::min(std::abs(outer), std::abs(inner)); }

ForwardSolve forwardSolve(const TDLinkage& linkage, double baseLength, std::span<const std::int8_t> signs) {
  const auto& steps = linkage.steps();
  const double scale2 = linkage.scale() * linkage.scale();
  const double clamp = linkage.tolerances().discriminant;

  ForwardSolve out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.points.assign(linkage.graph().vertexCount(), Vec2{nan, nan});
  out.steps.assign(steps.size(), StepProbe{});
  out.points[linkage.baseNonedge().first] = Vec2{0.0, 0.0};
  out.points[linkage.baseNonedge().second] = Vec2{baseLength, 0.0};

  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& s = steps[k];
    StepProbe& probe = out.steps[k];
    const Vec2 u = out.points[s.anchor1];
    const Vec2 w = out.points[s.anchor2];
    const Vec2 diff = w - u;
    const double d2 = dot(diff, diff);
    const double sum = s.length1 + s.length2;
    const double gap = s.length1 - s.length2;
    const double outer = d2 - sum * sum;
    const double inner = d2 - gap * gap;
    probe.outer = outer / scale2;
    probe.inner = inner / scale2;

    if (!(d2 > 0.0)) {
      // Coincident anchors: no unique intersection.
      probe.discriminant = -gap * gap / scale2 - clamp;
      probe.status = StepStatus::TooClose;
      return out;
    }
    // 4 d^2 h^2 = -(d^2 - (r1+r2)^2)(d^2 - (r1-r2)^2)
    const double h2 = -(outer * inner) / (4.0 * d2);
    probe.discriminant = h2 / scale2;
    if (probe.discriminant < -clamp) {
      probe.status = outer > 0.0 ? StepStatus::TooFar : StepStatus::TooClose;
      return out;
    }
    probe.status = StepStatus::Ok;
    ++out.realizedSteps;

    const double d = std::sqrt(d2);
    const double x = (d2 + s.length1 * s.length1 - s.length2 * s.length2) / (2.0 * d);
    const double h = std::sqrt(std::max(h2, 0.0));
    const Vec2 e = (1.0 / d) * diff;
    const double side = k < signs.size() ? static_cast<double>(signs[k]) : 1.0;
    out.points[s.vertex] = u + x * e + (side * h) * perp(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Realize
// ---------------------------------------------------------------------------

Realization realize(std::shared_ptr<const TDLinkage> linkage, double baseLength, const RealizationType& type) {
  if (!(baseLength > 0.0) || !std::isfinite(baseLength))
    throw inputError("InvalidArgument", "base length must be positive and finite");
  if (type.size() != linkage->stepCount()) {
    std::ostringstream msg;
    msg << "realization type has " << type.size() << " signs but the linkage has " << linkage->stepCount()
        << " construction steps";
    throw inputError("InvalidArgument", msg.str());
  }

  ForwardSolve solve = forwardSolve(*linkage, baseLength, type.signs());
  if (!solve.realizable()) {
    const std::size_t k = solve.realizedSteps;
    const auto& s = linkage->steps()[k];
    const auto& g = linkage->graph();
    std::ostringstream msg;
    msg << "step " << k + 1 << " (" << g.name(s.vertex) << " from " << g.name(s.anchor1) << "," << g.name(s.anchor2)
        << ") cannot be placed at base length " << baseLength;
    throw Unrealizable(k, msg.str());
  }
  for (std::size_t k = 0; k < type.size(); ++k) {
    if (type[k] == 0 && solve.steps[k].discriminant > linkage->tolerances().geometric) {
      std::ostringstream msg;
      msg << "step " << k + 1 << " is not collinear at base length " << baseLength;
      throw domainError("AmbiguousZeroSign", msg.str());
    }
  }
  return Realization(std::move(linkage), baseLength, type, std::move(solve.points));
}

bool realizableAt(const TDLinkage& linkage, double baseLength, const RealizationType& type) {
  if (!(baseLength > 0.0)) return false;
  return forwardSolve(linkage, baseLength, type.signs()).realizable();
}

// ---------------------------------------------------------------------------
// Orientation and Cayley distance
// ---------------------------------------------------------------------------

int orientationOf(Vec2 v, Vec2 u, Vec2 w, double scale, double tol) {
  const double area = 0.5 * cross(w - u, v - u);
  if (std::abs(area) <= tol * scale * scale) return 0;
  return area > 0.0 ? 1 : -1;
}

int orientationOf(Vec2 v, Vec2 u, Vec2 w) {
  const double scale = std::max({distance(u, v), distance(u, w), distance(v, w)});
  return orientationOf(v, u, w, scale);
}

int stepOrientation(const Realization& r, std::size_t k) {
  const auto& s = r.linkage()->steps().at(k);
  const auto& p = r.points();
  return orientationOf(p[s.vertex], p[s.anchor1], p[s.anchor2], r.linkage()->scale(),
                       r.linkage()->tolerances().geometric);
}

CayleyDistanceVector completeCayleyDistanceVector(const Realization& r) {
  const auto& vec = r.linkage()->completeCayleyVector();
  CayleyDistanceVector out;
  out.reserve(vec.size());
  out.push_back(r.baseLength());
  for (std::size_t i = 1; i < vec.size(); ++i) out.push_back(r.length(vec[i]));
  return out;
}

double cayleyDistance(const CayleyDistanceVector& a, const CayleyDistanceVector& b) {
  if (a.size() != b.size()) throw domainError("MismatchedLinkage", "Cayley distance vectors differ in dimension");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

double cayleyDistance(const Realization& a, const Realization& b) {
  if (a.linkage() != b.linkage() && a.linkage()->fingerprint() != b.linkage()->fingerprint())
    throw domainError("MismatchedLinkage", "realizations belong to different linkages");
  return cayleyDistance(completeCayleyDistanceVector(a), completeCayleyDistanceVector(b));
}

// ---------------------------------------------------------------------------
// Cluster passengers
// ---------------------------------------------------------------------------

Vec2 placeRigid(const std::array<Vec2, 2>& localAnchors, const std::array<Vec2, 2>& realAnchors, Vec2 local) {
  const Vec2 lv = localAnchors[1] - localAnchors[0];
  const Vec2 rv = realAnchors[1] - realAnchors[0];
  const double denom = norm(lv) * norm(rv);
  const double c = denom > 0.0 ? dot(lv, rv) / denom : 1.0;
  const double s = denom > 0.0 ? cross(lv, rv) / denom : 0.0;
  const Vec2 p = local - localAnchors[0];
  return realAnchors[0] + Vec2{c * p.x - s * p.y, s * p.x + c * p.y};
}

std::map<std::string, Vec2> restoreDecorations(const Realization& r) {
  const auto& g = r.linkage()->graph();
  std::map<std::string, Vec2> out;
  for (VertexId v = 0; v < g.vertexCount(); ++v) out.emplace(g.name(v), r.points()[v]);
  for (const auto& d : r.linkage()->decorations()) {
    const std::array<Vec2, 2> real{r.point(d.anchors[0]), r.point(d.anchors[1])};
    for (const auto& [name, local] : d.passengers) out[name] = placeRigid(d.localAnchors, real, local);
  }
  return out;
}

}  // namespace cayrs
