#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cayrs/geometry.hpp"
#include "cayrs/linkage.hpp"

namespace cayrs {

/// Local orientation of every construction step, quotiented by a global
/// reflection: the first nonzero sign is always +1.
class RealizationType {
 public:
  RealizationType() = default;
  /// Canonicalizes `signs`; entries must be -1, 0 or +1.
  explicit RealizationType(std::vector<std::int8_t> signs);
  /// Parses a string over {+, -, 0}.
  static RealizationType parse(std::string_view text);

  /// Brings `signs` to canonical form; returns true when it had to negate.
  static bool canonicalize(std::vector<std::int8_t>& signs);

  std::size_t size() const { return signs_.size(); }
  std::int8_t operator[](std::size_t k) const { return signs_[k]; }
  const std::vector<std::int8_t>& signs() const { return signs_; }
  bool hasZero() const;
  std::string str() const;

  /// The canonical type obtained by negating step k.
  RealizationType flipped(std::size_t k) const;
  /// Same type with step k set to 0 (collinear), canonicalized.
  RealizationType collinearAt(std::size_t k) const;

  friend auto operator<=>(const RealizationType&, const RealizationType&) = default;

 private:
  std::vector<std::int8_t> signs_;
};

/// All canonical sign vectors without zeros for `steps` steps, in
/// lexicographic order of their string form ('+' sorts before '-').
std::vector<RealizationType> canonicalTypes(std::size_t steps);

// ---------------------------------------------------------------------------
// Forward ruler-and-compass solve
// ---------------------------------------------------------------------------

enum class StepStatus : std::int8_t {
  Undefined,  // an earlier step failed, anchors are not placed
  Ok,         // circles intersect (within the discriminant clamp)
  TooFar,     // anchors farther apart than length1 + length2
  TooClose,   // anchors closer than |length1 - length2|
};

/// Per-step diagnostics; quantities are normalized by scale^2.
struct StepProbe {
  StepStatus status = StepStatus::Undefined;
  /// Squared height of the new vertex over its anchor line.
  double discriminant = 0.0;
  /// dist(anchors)^2 - (length1 + length2)^2
  double outer = 0.0;
  /// dist(anchors)^2 - (length1 - length2)^2
  double inner = 0.0;

  /// Closest of the two collinearity conditions.
  double collinearity() const;
};

struct ForwardSolve {
  std::vector<Vec2> points;
  std::vector<StepProbe> steps;
  /// Number of leading steps with status Ok.
  std::size_t realizedSteps = 0;

  bool realizable() const { return realizedSteps == steps.size(); }
};

/// Places the base endpoints at (0,0) and (L,0), then every step on the side
/// given by `signs` (0 places the vertex on the anchor line). Stops placing
/// at the first failing step; later probes stay Undefined.
ForwardSolve forwardSolve(const TDLinkage& linkage, double baseLength, std::span<const std::int8_t> signs);

// ---------------------------------------------------------------------------
// Realizations
// ---------------------------------------------------------------------------

class Realization {
 public:
  Realization(std::shared_ptr<const TDLinkage> linkage, double baseLength, RealizationType type,
              std::vector<Vec2> points)
      : linkage_(std::move(linkage)), baseLength_(baseLength), type_(std::move(type)), points_(std::move(points)) {}

  const std::shared_ptr<const TDLinkage>& linkage() const { return linkage_; }
  double baseLength() const { return baseLength_; }
  const RealizationType& type() const { return type_; }
  /// Indexed by VertexId of the reduced graph.
  const std::vector<Vec2>& points() const { return points_; }
  Vec2 point(const std::string& vertex) const { return points_[linkage_->graph().id(vertex)]; }
  double length(VertexPair p) const { return distance(points_[p.first], points_[p.second]); }

 private:
  std::shared_ptr<const TDLinkage> linkage_;
  double baseLength_;
  RealizationType type_;
  std::vector<Vec2> points_;
};

/// Throws Unrealizable (with the failing step) or AmbiguousZeroSign.
Realization realize(std::shared_ptr<const TDLinkage> linkage, double baseLength, const RealizationType& type);

/// True iff every step can be placed; zero signs accept either side.
bool realizableAt(const TDLinkage& linkage, double baseLength, const RealizationType& type);

/// Sign of twice the signed area of (u, w, v); positive when counterclockwise.
/// Zero when |area| <= tol * scale^2.
int orientationOf(Vec2 v, Vec2 u, Vec2 w, double scale, double tol = 1e-9);
/// Uses the largest pairwise distance of the triple as scale.
int orientationOf(Vec2 v, Vec2 u, Vec2 w);
/// Orientation of construction step k in `r`.
int stepOrientation(const Realization& r, std::size_t k);

using CayleyDistanceVector = std::vector<double>;

/// Lengths of the complete Cayley vector's non-edges; entry 0 is the base length.
CayleyDistanceVector completeCayleyDistanceVector(const Realization& r);

/// Euclidean distance of complete Cayley distance vectors. Throws MismatchedLinkage.
double cayleyDistance(const Realization& a, const Realization& b);
double cayleyDistance(const CayleyDistanceVector& a, const CayleyDistanceVector& b);

/// Rigid (rotation + translation) placement of a cluster-local point given
/// where the cluster's two anchors ended up.
Vec2 placeRigid(const std::array<Vec2, 2>& localAnchors, const std::array<Vec2, 2>& realAnchors, Vec2 local);

/// Every vertex, including cluster passengers, keyed by name.
std::map<std::string, Vec2> restoreDecorations(const Realization& r);

}  // namespace cayrs
