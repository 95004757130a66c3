#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cayrs/linkage.hpp"
#include "cayrs/realization.hpp"

namespace cayrs {

enum class Side : std::uint8_t { Lower, Upper };

constexpr Side opposite(Side s) { return s == Side::Lower ? Side::Upper : Side::Lower; }
inline const char* sideName(Side s) { return s == Side::Lower ? "lower" : "upper"; }

/// Position of an oriented interval inside a CayleyConfigSpace.
struct IntervalRef {
  std::size_t space = 0;
  std::size_t index = 0;
  friend auto operator<=>(const IntervalRef&, const IntervalRef&) = default;
};

/// The neighbor reached through an endpoint, and which of its own endpoints
/// is shared.
struct IntervalLink {
  IntervalRef interval;
  Side side = Side::Lower;
  friend bool operator==(const IntervalLink&, const IntervalLink&) = default;
};

struct OrientedInterval {
  double lower = 0.0;
  double upper = 0.0;
  RealizationType type;
  std::optional<std::size_t> flipStepAtLower;
  std::optional<std::size_t> flipStepAtUpper;
  std::optional<IntervalLink> nextLower;
  std::optional<IntervalLink> nextUpper;

  double endpoint(Side s) const { return s == Side::Lower ? lower : upper; }
  const std::optional<std::size_t>& flipStep(Side s) const { return s == Side::Lower ? flipStepAtLower : flipStepAtUpper; }
  const std::optional<IntervalLink>& next(Side s) const { return s == Side::Lower ? nextLower : nextUpper; }
  bool isolated() const { return lower == upper; }
  bool contains(double length, double slack = 0.0) const {
    return length >= lower - slack && length <= upper + slack;
  }
};

struct OrientedCCS {
  RealizationType type;
  std::vector<OrientedInterval> intervals;
};

/// Two or more steps collinear at the same base length (a non-generic input).
struct CollinearCoincidence {
  double baseLength = 0.0;
  RealizationType type;
  std::vector<std::size_t> steps;
};

struct CandidateScan {
  /// Sorted, merged candidate endpoints.
  std::vector<double> endpoints;
  /// Steps whose collinearity produced each endpoint (parallel to endpoints).
  std::vector<std::vector<std::size_t>> steps;
  std::vector<CollinearCoincidence> coincidences;
  /// Scanned domain: (0, upper]; upper lies one grid pitch past the bar sum.
  double domainLow = 0.0;
  double domainHigh = 0.0;
  /// Smallest base length sampled; starts an interval open at the domain bottom.
  double firstSample = 0.0;
};

struct CayleyConfigSpace {
  std::shared_ptr<const TDLinkage> linkage;
  /// One entry per canonical type with a nonempty space, in type order.
  std::vector<OrientedCCS> oriented;
  /// Union of all oriented intervals as maximal disjoint closed intervals.
  std::vector<std::pair<double, double>> nonOriented;
  std::vector<CollinearCoincidence> coincidences;
  std::vector<std::string> warnings;
  bool linked = false;

  const OrientedInterval& at(IntervalRef ref) const { return oriented.at(ref.space).intervals.at(ref.index); }
  std::optional<std::size_t> spaceOf(const RealizationType& type) const;
  std::size_t intervalCount() const;
  std::vector<IntervalRef> intervals() const;
  /// Interval of `type` containing `length` within the merge tolerance. Zero
  /// signs in `type` match either orientation.
  std::optional<IntervalRef> locate(double length, const RealizationType& type) const;
  /// Index of the non-oriented interval containing `length`.
  std::optional<std::size_t> nonOrientedIndex(double length) const;
  /// Absolute endpoint matching slack.
  double mergeSlack() const { return linkage->tolerances().merge * linkage->scale(); }
};

/// Scan-and-bisect search for base lengths at which some step of `type`
/// becomes collinear. Throws NotLowComplexity.
CandidateScan scanCandidates(const TDLinkage& linkage, const RealizationType& type);
std::vector<double> candidateEndpoints(const TDLinkage& linkage, const RealizationType& type);

/// Oriented space of one type via the midpoint test between candidates.
OrientedCCS buildOrientedCCS(const TDLinkage& linkage, const RealizationType& type);

/// All canonical types; unlinked. Throws NotLowComplexity, TooManySteps.
CayleyConfigSpace buildCCS(std::shared_ptr<const TDLinkage> linkage);

/// Connects every oriented interval endpoint to the interval of the type
/// obtained by flipping the step that is collinear there.
CayleyConfigSpace linkIntervals(CayleyConfigSpace ccs);

/// buildCCS followed by linkIntervals.
std::shared_ptr<const CayleyConfigSpace> computeCCS(std::shared_ptr<const TDLinkage> linkage);

/// Static warnings plus simultaneous-collinearity warnings from the scan.
std::vector<std::string> genericityWarnings(const TDLinkage& linkage);
std::vector<std::string> genericityWarnings(const CayleyConfigSpace& ccs);

}  // namespace cayrs
