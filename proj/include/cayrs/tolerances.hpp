#pragma once

#include <cstddef>

namespace cayrs {

/// Numeric tolerances shared by every stage of the engine.
///
/// Values marked "relative" are multiplied by the linkage scale (the largest
/// bar length) or its square, whichever matches the quantity's units.
struct Tolerances {
  /// Collinearity threshold (relative, applied to squared quantities).
  double geometric = 1e-9;
  /// Negative discriminants above -discriminant * scale^2 are clamped to 0.
  double discriminant = 1e-12;
  /// Bisection bracket width for interval endpoints (relative). Near floating
  /// resolution so collinear placements at endpoints reproduce bar lengths.
  double endpoint = 1e-15;
  /// Candidate endpoints closer than this are merged (relative).
  double merge = 1e-7;
  /// Initial scan resolution over the base length domain.
  std::size_t gridPoints = 1024;
  /// Upper bound on the number of canonical realization types enumerated.
  std::size_t maxTypes = std::size_t{1} << 20;
};

}  // namespace cayrs
