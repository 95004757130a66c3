#include "cayrs/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "cayrs/errors.hpp"

namespace cayrs {

namespace {

std::string quoted(const std::string& s) { return "'" + s + "'"; }

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Key for an unordered pair of bar indices.
std::uint64_t pairKey(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

Graph::Graph(std::vector<std::string> names, const std::vector<BarSpec>& bars) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  if (std::adjacent_find(names_.begin(), names_.end()) != names_.end())
    throw inputError("InvalidLinkage", "duplicate vertex identifier");
  const std::size_t n = names_.size();
  for (VertexId i = 0; i < n; ++i) index_.emplace(names_[i], i);
  barIndex_.assign(n * n, -1);
  neighbors_.resize(n);

  for (const auto& b : bars) {
    auto u = find(b.u);
    auto v = find(b.v);
    if (!u || !v)
      throw inputError("InvalidLinkage", "bar endpoint " + quoted(!u ? b.u : b.v) + " is not a declared vertex");
    if (*u == *v) throw inputError("InvalidLinkage", "bar " + quoted(b.u) + " joins a vertex to itself");
    if (!(b.length > 0.0) || !std::isfinite(b.length))
      throw inputError("InvalidLinkage", "bar " + b.u + "-" + b.v + " must have a positive finite length");
    if (adjacent(*u, *v)) throw inputError("InvalidLinkage", "repeated bar " + b.u + "-" + b.v);
    const auto idx = static_cast<long>(bars_.size());
    bars_.push_back(Bar{std::min(*u, *v), std::max(*u, *v), b.length});
    barIndex_[*u * n + *v] = idx;
    barIndex_[*v * n + *u] = idx;
    neighbors_[*u].push_back(*v);
    neighbors_[*v].push_back(*u);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

std::string Graph::pairName(VertexPair p) const { return "(" + name(p.first) + "," + name(p.second) + ")"; }

std::optional<VertexId> Graph::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VertexId Graph::id(const std::string& name) const {
  auto v = find(name);
  if (!v) throw inputError("UnknownVertex", "unknown vertex " + quoted(name));
  return *v;
}

std::optional<std::size_t> Graph::barBetween(VertexId a, VertexId b) const {
  const long idx = barIndex_[a * names_.size() + b];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

double Graph::barLength(VertexId a, VertexId b) const {
  auto idx = barBetween(a, b);
  if (!idx) throw inputError("InvalidLinkage", "no bar between " + name(a) + " and " + name(b));
  return bars_[*idx].length;
}

// ---------------------------------------------------------------------------
// Cluster reduction
// ---------------------------------------------------------------------------

Reduction reduceClusters(const LinkageSpec& spec, const Tolerances& tol) {
  std::set<std::string> declared;
  for (const auto& v : spec.vertices) {
    if (v.empty()) throw inputError("InvalidLinkage", "empty vertex identifier");
    if (!declared.insert(v).second) throw inputError("InvalidLinkage", "duplicate vertex " + quoted(v));
  }
  for (const auto& b : spec.bars) {
    for (const auto* end : {&b.u, &b.v})
      if (!declared.count(*end))
        throw inputError("InvalidLinkage", "bar endpoint " + quoted(*end) + " is not a declared vertex");
    if (!(b.length > 0.0) || !std::isfinite(b.length))
      throw inputError("InvalidLinkage", "bar " + b.u + "-" + b.v + " must have a positive finite length");
  }

  double maxBar = 0.0;
  for (const auto& b : spec.bars) maxBar = std::max(maxBar, b.length);

  // Which clusters each vertex belongs to.
  std::map<std::string, std::vector<std::size_t>> membership;
  for (std::size_t c = 0; c < spec.clusters.size(); ++c) {
    const auto& cl = spec.clusters[c];
    for (const auto& [v, p] : cl.coords) {
      if (!declared.count(v)) throw inputError("InvalidLinkage", "cluster vertex " + quoted(v) + " is not declared");
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw inputError("InvalidLinkage", "cluster coordinate of " + quoted(v) + " is not finite");
      membership[v].push_back(c);
    }
    for (const auto& a : cl.anchors)
      if (!cl.coords.count(a))
        throw inputError("ClusterShareViolation", "cluster " + std::to_string(c) + " anchor " + quoted(a) +
                                                      " has no local coordinates");
    if (cl.anchors[0] == cl.anchors[1])
      throw inputError("ClusterShareViolation", "cluster " + std::to_string(c) + " names the same anchor twice");
  }

  auto inCluster = [&](const std::string& v, std::size_t c) { return spec.clusters[c].coords.count(v) > 0; };

  std::vector<BarSpec> bars;
  std::vector<bool> internal(spec.bars.size(), false);
  for (std::size_t i = 0; i < spec.bars.size(); ++i) {
    const auto& b = spec.bars[i];
    for (std::size_t c = 0; c < spec.clusters.size(); ++c) {
      if (inCluster(b.u, c) && inCluster(b.v, c)) {
        const auto& coords = spec.clusters[c].coords;
        const double local = distance(coords.at(b.u), coords.at(b.v));
        const double slack = tol.merge * std::max({maxBar, local, 1e-300});
        if (std::abs(local - b.length) > slack)
          throw inputError("InvalidLinkage", "bar " + b.u + "-" + b.v + " disagrees with the coordinates of cluster " +
                                                 std::to_string(c));
        internal[i] = true;
      }
    }
  }

  Reduction out;
  std::set<std::string> passengers;
  std::map<std::pair<std::string, std::string>, double> anchorBars;
  for (std::size_t c = 0; c < spec.clusters.size(); ++c) {
    const auto& cl = spec.clusters[c];
    // Vertices of this cluster that touch anything outside it.
    std::set<std::string> shared;
    for (std::size_t i = 0; i < spec.bars.size(); ++i) {
      const auto& b = spec.bars[i];
      const bool inU = inCluster(b.u, c), inV = inCluster(b.v, c);
      if (inU && !inV) shared.insert(b.u);
      if (inV && !inU) shared.insert(b.v);
    }
    for (const auto& [v, _] : cl.coords)
      if (membership[v].size() > 1) shared.insert(v);
    const std::set<std::string> anchors(cl.anchors.begin(), cl.anchors.end());
    // Anchors may stay unshared (a detached cluster is just a bar); any
    // other shared vertex breaks the reduction.
    if (!std::includes(anchors.begin(), anchors.end(), shared.begin(), shared.end())) {
      std::ostringstream msg;
      msg << "cluster " << c << " shares " << shared.size() << " vertices with the rest of the linkage";
      if (shared.size() <= 2) msg << " but they are not its declared anchors";
      throw inputError("ClusterShareViolation", msg.str());
    }

    const Vec2 a = cl.coords.at(cl.anchors[0]);
    const Vec2 b = cl.coords.at(cl.anchors[1]);
    double extent = 0.0;
    for (const auto& [_, p] : cl.coords) extent = std::max(extent, distance(a, p));
    const double span = distance(a, b);
    if (span <= tol.geometric * std::max(extent, 1.0))
      throw inputError("DegenerateCluster", "cluster " + std::to_string(c) + " has coincident anchors");

    Decoration deco;
    deco.cluster = c;
    deco.anchors = cl.anchors;
    deco.localAnchors = {a, b};
    for (const auto& [v, p] : cl.coords) {
      if (anchors.count(v)) continue;
      deco.passengers.emplace_back(v, p);
      passengers.insert(v);
    }
    out.decorations.push_back(std::move(deco));

    auto key = std::minmax(cl.anchors[0], cl.anchors[1]);
    auto [it, fresh] = anchorBars.emplace(std::pair{key.first, key.second}, span);
    if (!fresh && std::abs(it->second - span) > tol.merge * std::max(maxBar, span))
      throw inputError("InvalidLinkage", "clusters disagree on the distance " + key.first + "-" + key.second);
  }

  for (std::size_t i = 0; i < spec.bars.size(); ++i)
    if (!internal[i]) bars.push_back(spec.bars[i]);
  for (const auto& [key, len] : anchorBars) bars.push_back(BarSpec{key.first, key.second, len});

  std::vector<std::string> names;
  for (const auto& v : spec.vertices)
    if (!passengers.count(v)) names.push_back(v);
  out.graph = Graph(std::move(names), bars);
  return out;
}

// ---------------------------------------------------------------------------
// Construction sequence
// ---------------------------------------------------------------------------

std::vector<ConstructionStep> deriveConstruction(const Graph& graph, VertexPair base) {
  const std::size_t n = graph.vertexCount();
  const std::size_t e = graph.bars().size();
  if (base.first == base.second || base.second >= n)
    throw inputError("InvalidArgument", "base non-edge needs two distinct vertices of the graph");
  if (graph.adjacent(base.first, base.second))
    throw inputError("InvalidArgument", "base non-edge " + graph.pairName(base) + " is a bar");
  if (n < 3 || e + 1 != 2 * n - 3) {
    std::ostringstream msg;
    msg << "graph plus base non-edge has " << n << " vertices and " << e + 1
        << " edges; a 1-dof linkage needs |E|+1 = 2|V|-3";
    throw domainError("NotOneDof", msg.str());
  }

  std::vector<bool> placed(n, false);
  std::vector<int> backEdges(n, 0);
  auto place = [&](VertexId v) {
    placed[v] = true;
    for (VertexId w : graph.neighbors(v)) ++backEdges[w];
  };
  place(base.first);
  place(base.second);

  std::vector<ConstructionStep> steps;
  steps.reserve(n - 2);
  while (steps.size() < n - 2) {
    std::optional<VertexId> next;
    for (VertexId v = 0; v < n && !next; ++v)
      if (!placed[v] && backEdges[v] == 2) next = v;
    if (!next) {
      std::ostringstream msg;
      msg << "no vertex attaches to the constructed part by exactly two bars after " << steps.size() << " steps";
      throw domainError("NotTreeDecomposable", msg.str());
    }
    std::vector<VertexId> anchors;
    for (VertexId w : graph.neighbors(*next))
      if (placed[w]) anchors.push_back(w);
    ConstructionStep s;
    s.vertex = *next;
    s.anchor1 = anchors[0];
    s.anchor2 = anchors[1];
    s.length1 = graph.barLength(s.anchor1, s.vertex);
    s.length2 = graph.barLength(s.anchor2, s.vertex);
    steps.push_back(s);
    place(*next);
  }
  return steps;
}

std::vector<VertexPair> enumerateBaseNonedges(const Graph& graph) {
  std::vector<VertexPair> out;
  const std::size_t n = graph.vertexCount();
  if (n < 3 || graph.bars().size() + 1 != 2 * n - 3) return out;
  for (VertexId a = 0; a < n; ++a) {
    for (VertexId b = a + 1; b < n; ++b) {
      if (graph.adjacent(a, b)) continue;
      try {
        deriveConstruction(graph, VertexPair(a, b));
        out.emplace_back(a, b);
      } catch (const Error&) {
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Four-cycle test
// ---------------------------------------------------------------------------

LowComplexityReport fourCycleCheck(const Graph& graph, VertexPair base, std::span<const ConstructionStep> steps) {
  const std::size_t n = graph.vertexCount();
  LowComplexityReport report;
  report.completeCayleyVector.push_back(base);

  // Placement stage of every vertex: 0 for base endpoints, k+1 for step k.
  std::vector<std::size_t> stage(n, n + 1);
  stage[base.first] = stage[base.second] = 0;
  for (std::size_t k = 0; k < steps.size(); ++k) stage[steps[k].vertex] = k + 1;

  std::unordered_set<std::uint64_t> validBasePairs;
  std::set<VertexPair> seen{base};
  std::vector<std::pair<std::size_t, std::size_t>> currentBasePairs;

  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& s = steps[k];
    const std::size_t c1 = *graph.barBetween(s.anchor1, s.vertex);
    const std::size_t c2 = *graph.barBetween(s.anchor2, s.vertex);
    if (k > 0) {
      currentBasePairs.clear();
      bool contributed = false;
      for (VertexId w = 0; w < n; ++w) {
        if (stage[w] > k || w == s.anchor1 || w == s.anchor2) continue;
        auto e1 = graph.barBetween(s.anchor1, w);
        auto e2 = graph.barBetween(s.anchor2, w);
        if (!e1 || !e2 || !validBasePairs.count(pairKey(*e1, *e2))) continue;
        currentBasePairs.emplace_back(*e1, *e2);
        if (!contributed) {
          const VertexPair nonedge(w, s.vertex);
          if (!graph.adjacent(w, s.vertex) && seen.insert(nonedge).second)
            report.completeCayleyVector.push_back(nonedge);
          contributed = true;
        }
      }
      if (currentBasePairs.empty()) {
        report.failingStep = k;
        report.diagnostic = "step " + std::to_string(k + 1) + " (" + graph.name(s.vertex) + " from " +
                            graph.name(s.anchor1) + "," + graph.name(s.anchor2) +
                            ") is not based on an adjacent pair of clusters of a four-cycle";
        return report;
      }
      for (const auto& [e1, e2] : currentBasePairs) {
        validBasePairs.insert(pairKey(c1, e1));
        validBasePairs.insert(pairKey(c2, e2));
      }
    }
    validBasePairs.insert(pairKey(c1, c2));
  }
  report.low = true;
  return report;
}

// ---------------------------------------------------------------------------
// TDLinkage
// ---------------------------------------------------------------------------

std::shared_ptr<const TDLinkage> TDLinkage::create(const LinkageSpec& spec, const Tolerances& tol,
                                                   std::optional<std::pair<std::string, std::string>> base) {
  auto reduction = reduceClusters(spec, tol);
  std::shared_ptr<TDLinkage> tdl(new TDLinkage());
  tdl->graph_ = std::move(reduction.graph);
  tdl->decorations_ = std::move(reduction.decorations);
  tdl->tol_ = tol;
  const Graph& g = tdl->graph_;

  double longest = 0.0;
  for (const auto& b : g.bars()) {
    longest = std::max(longest, b.length);
    tdl->barSum_ += b.length;
  }
  tdl->scale_ = longest > 0.0 ? longest : 1.0;

  if (!base) base = spec.baseNonedge;
  if (base) {
    tdl->base_ = VertexPair(g.id(base->first), g.id(base->second));
  } else if (!tdl->baseNonedges().empty()) {
    tdl->base_ = tdl->baseNonedges().front();
  } else {
    // Surface the specific reason (edge count or peeling failure).
    for (VertexId a = 0; a < g.vertexCount(); ++a)
      for (VertexId b = a + 1; b < g.vertexCount(); ++b)
        if (!g.adjacent(a, b)) deriveConstruction(g, VertexPair(a, b));
    throw domainError("NotTreeDecomposable", "the linkage has no base non-edge");
  }

  tdl->steps_ = deriveConstruction(g, tdl->base_);
  tdl->stepOf_.assign(g.vertexCount(), -1);
  for (std::size_t k = 0; k < tdl->steps_.size(); ++k) tdl->stepOf_[tdl->steps_[k].vertex] = static_cast<long>(k);
  tdl->report_ = fourCycleCheck(g, tdl->base_, tdl->steps_);

  std::ostringstream fp;
  fp << std::hexfloat;
  for (const auto& v : g.vertices()) fp << v << '\n';
  std::vector<std::tuple<VertexId, VertexId, double>> bars;
  for (const auto& b : g.bars()) bars.emplace_back(std::min(b.u, b.v), std::max(b.u, b.v), b.length);
  std::sort(bars.begin(), bars.end());
  for (const auto& [u, v, length] : bars) fp << u << ' ' << v << ' ' << length << '\n';
  fp << "base " << tdl->base_.first << ' ' << tdl->base_.second << '\n';
  for (const auto& d : tdl->decorations_) {
    fp << "cluster " << d.anchors[0] << ' ' << d.anchors[1];
    for (const auto& p : d.localAnchors) fp << ' ' << p.x << ' ' << p.y;
    for (const auto& [v, p] : d.passengers) fp << ' ' << v << ' ' << p.x << ' ' << p.y;
    fp << '\n';
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a(fp.str());
  tdl->fingerprint_ = hex.str();
  return tdl;
}

const std::vector<VertexPair>& TDLinkage::baseNonedges() const {
  std::call_once(baseNonedgesOnce_, [this] { baseNonedges_ = enumerateBaseNonedges(graph_); });
  return baseNonedges_;
}

std::optional<std::size_t> TDLinkage::stepOf(VertexId v) const {
  if (v >= stepOf_.size() || stepOf_[v] < 0) return std::nullopt;
  return static_cast<std::size_t>(stepOf_[v]);
}

std::vector<std::string> TDLinkage::allVertexNames() const {
  std::vector<std::string> out = graph_.vertices();
  for (const auto& d : decorations_)
    for (const auto& [v, _] : d.passengers) out.push_back(v);
  return out;
}

bool isLow(const TDLinkage& linkage) { return linkage.lowComplexity().low; }

std::vector<std::string> checkGeneric(const TDLinkage& linkage) {
  const Graph& g = linkage.graph();
  const double slack = linkage.tolerances().merge * linkage.scale();
  std::vector<std::string> warnings;
  for (const auto& b : g.bars())
    if (b.length <= slack) warnings.push_back("bar " + g.name(b.u) + "-" + g.name(b.v) + " has zero length");

  std::vector<std::size_t> order(g.bars().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return g.bars()[a].length < g.bars()[b].length; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& prev = g.bars()[order[i - 1]];
    const auto& cur = g.bars()[order[i]];
    if (cur.length - prev.length <= slack) {
      std::ostringstream msg;
      msg << "duplicate bar length " << cur.length << " on " << g.name(prev.u) << "-" << g.name(prev.v) << " and "
          << g.name(cur.u) << "-" << g.name(cur.v);
      warnings.push_back(msg.str());
    }
  }
  return warnings;
}

}  // namespace cayrs
