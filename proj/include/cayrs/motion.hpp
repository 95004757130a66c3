#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cayrs/cayley_space.hpp"
#include "cayrs/errors.hpp"
#include "cayrs/realization.hpp"

namespace cayrs {

enum class MotionKind { Component, Path };

/// One traversal of an oriented interval, from `enterAt` towards `exitAt`.
/// Clips restrict the traversal to start or stop inside the interval.
struct MotionLeg {
  IntervalRef interval;
  Side enterAt = Side::Lower;
  Side exitAt = Side::Upper;
  std::optional<double> clipStart;
  std::optional<double> clipEnd;

  friend bool operator==(const MotionLeg&, const MotionLeg&) = default;
};

struct ContinuousMotion {
  std::shared_ptr<const CayleyConfigSpace> ccs;
  std::vector<MotionLeg> legs;
  MotionKind kind = MotionKind::Component;
  /// A component that is its own mirror image: its legs form an arc whose
  /// two ends link back to themselves, and the motion runs along the arc
  /// and back.
  bool folded = false;

  const OrientedInterval& interval(std::size_t leg) const { return ccs->at(legs.at(leg).interval); }
  double legStart(std::size_t leg) const;
  double legEnd(std::size_t leg) const;
  /// Total traversed base-length parameter.
  double arcLength() const;
  bool contains(IntervalRef ref) const;
};

/// Path with legs in reverse order and each leg traversed backwards.
ContinuousMotion reversed(const ContinuousMotion& motion);

/// Walks the links from r's interval (leaving through its upper end) until the
/// start interval is re-entered in the starting direction.
/// Throws NotRealizable, UnlinkedEndpoint.
ContinuousMotion findComponent(std::shared_ptr<const CayleyConfigSpace> ccs, const Realization& r);
ContinuousMotion componentFrom(std::shared_ptr<const CayleyConfigSpace> ccs, IntervalRef start);

/// Every component once, ordered by its smallest (lower endpoint, type).
std::vector<ContinuousMotion> findAllComponents(std::shared_ptr<const CayleyConfigSpace> ccs);

/// Index into findAllComponents() of the component containing `ref`.
std::optional<std::size_t> componentIndexOf(const std::vector<ContinuousMotion>& components, IntervalRef ref);

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Chooses base-length parameters along one leg, endpoints included.
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual std::vector<double> parameters(double from, double to) const = 0;
};

class UniformSampler : public Sampler {
 public:
  explicit UniformSampler(std::size_t perLeg = 64) : perLeg_(perLeg < 2 ? 2 : perLeg) {}
  std::vector<double> parameters(double from, double to) const override;

 private:
  std::size_t perLeg_;
};

/// Cosine spacing: denser near the leg ends, where vertices move fastest
/// per unit of base length.
class EndpointClusteredSampler : public Sampler {
 public:
  explicit EndpointClusteredSampler(std::size_t perLeg = 64) : perLeg_(perLeg < 2 ? 2 : perLeg) {}
  std::vector<double> parameters(double from, double to) const override;

 private:
  std::size_t perLeg_;
};

struct MotionSample {
  Realization realization;
  std::size_t leg = 0;
  /// The physical motion at this sample is the mirror image of `realization`
  /// (the canonical representative); tracked across junctions that flip the
  /// first step.
  bool mirrored = false;
};

/// Samples along the motion; junction samples (collinear step set to 0)
/// appear once, on the earlier leg.
std::vector<MotionSample> sampleMotion(const ContinuousMotion& motion, const Sampler& sampler = UniformSampler{});
std::vector<Realization> sampleRealizations(const ContinuousMotion& motion,
                                            const Sampler& sampler = UniformSampler{});

struct Curve3D {
  std::vector<std::array<double, 3>> points;
  std::vector<RealizationType> typeLabels;
  /// (leg index, base length) per sample.
  std::vector<std::pair<std::size_t, double>> sampleParams;
};

/// Complete Cayley distance vector projected on three of its non-edges.
/// Throws NonedgeNotInVector.
Curve3D curve3D(const ContinuousMotion& motion, VertexPair f1, VertexPair f2, VertexPair f3,
                const Sampler& sampler = UniformSampler{});

struct TracedCurves {
  std::vector<std::pair<std::size_t, double>> sampleParams;
  std::vector<RealizationType> typeLabels;
  std::map<std::string, std::vector<Vec2>> curves;
};

/// Canonical-frame paths of the requested vertices (cluster passengers
/// included). A component whose traversal ends mirrored is traced twice so
/// the curves close. Throws UnknownVertex.
TracedCurves tracedCurves(const ContinuousMotion& motion, const std::vector<std::string>& vertices,
                          const Sampler& sampler = UniformSampler{});

struct NearestPair {
  Realization first;
  Realization second;
  double distance = 0.0;
  std::size_t firstIndex = 0;
  std::size_t secondIndex = 0;
};

/// Brute-force minimum Cayley distance over sampled pairs; ties go to the
/// lexicographically smallest (firstIndex, secondIndex).
NearestPair nearestRealizations(const ContinuousMotion& c1, const ContinuousMotion& c2,
                                const Sampler& sampler = UniformSampler{});

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

class NotConnected : public Error {
 public:
  NotConnected(ContinuousMotion from, ContinuousMotion to, NearestPair nearest)
      : Error("NotConnected", ErrorCategory::Domain, "realizations lie in different connected components"),
        from_(std::move(from)),
        to_(std::move(to)),
        nearest_(std::move(nearest)) {}

  const ContinuousMotion& fromComponent() const { return from_; }
  const ContinuousMotion& toComponent() const { return to_; }
  const NearestPair& nearest() const { return nearest_; }

 private:
  ContinuousMotion from_;
  ContinuousMotion to_;
  NearestPair nearest_;
};

/// Continuous motion paths from r1 to r2 (at most two), fewest legs first,
/// then shortest arc length. Throws NotConnected with the nearest pair of the
/// two components.
std::vector<ContinuousMotion> findPath(std::shared_ptr<const CayleyConfigSpace> ccs, const Realization& r1,
                                       const Realization& r2, const Sampler& sampler = UniformSampler{});

struct PairClassification {
  bool sameOrientedInterval = false;
  bool sameNonOrientedInterval = false;
  bool sameType = false;
  bool sameComponent = false;
  std::size_t pathCount = 0;
  /// "1", "2a", "2b", "3a" or "3b".
  std::string label;
};

PairClassification classifyPair(std::shared_ptr<const CayleyConfigSpace> ccs, const Realization& r1,
                                const Realization& r2);

/// Realization of interval `ref` at `length`; ends at a linked endpoint use a
/// zero sign for the collinear step.
Realization realizeOnInterval(const CayleyConfigSpace& ccs, IntervalRef ref, double length);

}  // namespace cayrs
