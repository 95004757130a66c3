#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cayrs/geometry.hpp"
#include "cayrs/tolerances.hpp"

namespace cayrs {

// ---------------------------------------------------------------------------
// Input description
// ---------------------------------------------------------------------------

struct BarSpec {
  std::string u;
  std::string v;
  double length = 0.0;
};

/// A rigid body given by local coordinates. It touches the rest of the
/// linkage only through its two anchors.
struct ClusterSpec {
  std::map<std::string, Vec2> coords;
  std::array<std::string, 2> anchors;
};

struct LinkageSpec {
  std::vector<std::string> vertices;
  std::vector<BarSpec> bars;
  std::vector<ClusterSpec> clusters;
  std::optional<std::pair<std::string, std::string>> baseNonedge;
};

// ---------------------------------------------------------------------------
// Reduced graph
// ---------------------------------------------------------------------------

/// Index into Graph::vertices(). Vertices are stored in lexicographic order of
/// their identifiers, so comparing ids compares names.
using VertexId = std::size_t;

/// Unordered vertex pair, stored with first < second.
struct VertexPair {
  VertexId first = 0;
  VertexId second = 0;

  VertexPair() = default;
  VertexPair(VertexId a, VertexId b) : first(a < b ? a : b), second(a < b ? b : a) {}

  friend auto operator<=>(const VertexPair&, const VertexPair&) = default;
};

struct Bar {
  VertexId u = 0;
  VertexId v = 0;
  double length = 0.0;
};

class Graph {
 public:
  Graph() = default;
  /// Throws InvalidLinkage on unknown endpoints, self loops or repeated bars.
  Graph(std::vector<std::string> names, const std::vector<BarSpec>& bars);

  std::size_t vertexCount() const { return names_.size(); }
  const std::vector<std::string>& vertices() const { return names_; }
  const std::vector<Bar>& bars() const { return bars_; }
  const std::string& name(VertexId v) const { return names_.at(v); }
  std::string pairName(VertexPair p) const;

  std::optional<VertexId> find(const std::string& name) const;
  /// Throws UnknownVertex.
  VertexId id(const std::string& name) const;

  bool adjacent(VertexId a, VertexId b) const { return barIndex_[a * names_.size() + b] >= 0; }
  std::optional<std::size_t> barBetween(VertexId a, VertexId b) const;
  double barLength(VertexId a, VertexId b) const;
  const std::vector<VertexId>& neighbors(VertexId v) const { return neighbors_[v]; }

 private:
  std::vector<std::string> names_;
  std::vector<Bar> bars_;
  std::unordered_map<std::string, VertexId> index_;
  std::vector<long> barIndex_;
  std::vector<std::vector<VertexId>> neighbors_;
};

/// Passenger vertices of a rigid cluster that was collapsed to an anchor bar.
struct Decoration {
  std::size_t cluster = 0;
  std::array<std::string, 2> anchors;
  std::array<Vec2, 2> localAnchors;
  std::vector<std::pair<std::string, Vec2>> passengers;
};

struct Reduction {
  Graph graph;
  std::vector<Decoration> decorations;
};

/// Validates the linkage document and replaces every rigid cluster with a bar
/// between its anchors. Throws InvalidLinkage, ClusterShareViolation, DegenerateCluster.
Reduction reduceClusters(const LinkageSpec& spec, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Construction sequence
// ---------------------------------------------------------------------------

/// Step k of the construction: `vertex` is placed from `anchor1` and `anchor2`
/// (anchor1 < anchor2) at distances `length1` and `length2`.
struct ConstructionStep {
  VertexId vertex = 0;
  VertexId anchor1 = 0;
  VertexId anchor2 = 0;
  double length1 = 0.0;
  double length2 = 0.0;
};

/// Builds the construction sequence of `graph` from the base non-edge.
/// Deterministic: at every stage the lexicographically smallest vertex with
/// exactly two bars into the constructed part is placed next.
/// Throws NotOneDof, NotTreeDecomposable.
std::vector<ConstructionStep> deriveConstruction(const Graph& graph, VertexPair base);

/// All non-edges admitting a construction, in lexicographic order.
std::vector<VertexPair> enumerateBaseNonedges(const Graph& graph);

struct LowComplexityReport {
  bool low = false;
  std::vector<VertexPair> completeCayleyVector;
  /// Zero-based index of the first step without a valid base pair.
  std::optional<std::size_t> failingStep;
  std::string diagnostic;
};

/// Four-cycle test on the edge-cluster model; also assembles the complete
/// Cayley vector (one non-edge per witnessed step). O(|V|^2).
LowComplexityReport fourCycleCheck(const Graph& graph, VertexPair base,
                                   std::span<const ConstructionStep> steps);

// ---------------------------------------------------------------------------
// Analyzed linkage
// ---------------------------------------------------------------------------

class TDLinkage {
 public:
  /// Reduces clusters, picks the base non-edge (explicit override, then the
  /// document's, then the first admissible one), derives the construction and
  /// runs the four-cycle test.
  static std::shared_ptr<const TDLinkage> create(
      const LinkageSpec& spec, const Tolerances& tol = {},
      std::optional<std::pair<std::string, std::string>> base = std::nullopt);

  const Graph& graph() const { return graph_; }
  VertexPair baseNonedge() const { return base_; }
  const std::vector<ConstructionStep>& steps() const { return steps_; }
  std::size_t stepCount() const { return steps_.size(); }
  const std::vector<VertexPair>& completeCayleyVector() const { return report_.completeCayleyVector; }
  const LowComplexityReport& lowComplexity() const { return report_; }
  const std::vector<Decoration>& decorations() const { return decorations_; }
  /// Every admissible base non-edge; enumerated on first use.
  const std::vector<VertexPair>& baseNonedges() const;
  const Tolerances& tolerances() const { return tol_; }

  /// Largest bar length; all relative tolerances are scaled by it.
  double scale() const { return scale_; }
  /// Sum of all bar lengths: the upper end of the scanned base length domain.
  double barLengthSum() const { return barSum_; }
  /// Content fingerprint; equal fingerprints mean interchangeable linkages.
  const std::string& fingerprint() const { return fingerprint_; }

  /// Step at which `v` is placed, or nullopt for the base endpoints.
  std::optional<std::size_t> stepOf(VertexId v) const;

  /// Every vertex name, reduced graph first, then cluster passengers.
  std::vector<std::string> allVertexNames() const;

 private:
  TDLinkage() = default;

  Graph graph_;
  VertexPair base_;
  std::vector<ConstructionStep> steps_;
  std::vector<long> stepOf_;
  LowComplexityReport report_;
  std::vector<Decoration> decorations_;
  mutable std::once_flag baseNonedgesOnce_;
  mutable std::vector<VertexPair> baseNonedges_;
  Tolerances tol_;
  double scale_ = 1.0;
  double barSum_ = 0.0;
  std::string fingerprint_;
};

bool isLow(const TDLinkage& linkage);

/// Static genericity warnings: zero and repeated bar lengths. Collinearity
/// coincidences need the endpoint scan; see genericityWarnings().
std::vector<std::string> checkGeneric(const TDLinkage& linkage);

}  // namespace cayrs
