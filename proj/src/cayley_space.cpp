#include "cayrs/cayley_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "cayrs/errors.hpp"

namespace cayrs {

namespace {

struct Probe {
  double length = 0.0;
  std::vector<StepStatus> status;
  std::vector<double> discriminant;
};

Probe probeAt(const TDLinkage& linkage, const RealizationType& type, double length) {
  ForwardSolve fs = forwardSolve(linkage, length, type.signs());
  Probe p;
  p.length = length;
  p.status.reserve(fs.steps.size());
  p.discriminant.reserve(fs.steps.size());
  for (const auto& s : fs.steps) {
    p.status.push_back(s.status);
    p.discriminant.push_back(s.discriminant);
  }
  return p;
}

bool defined(StepStatus s) { return s != StepStatus::Undefined; }

struct Event {
  double value = 0.0;
  std::vector<std::size_t> steps;
};

class Scanner {
 public:
  Scanner(const TDLinkage& linkage, const RealizationType& type) : linkage_(linkage), type_(type) {
    const auto& tol = linkage.tolerances();
    bracket_ = tol.endpoint * linkage.scale();
    coincide_ = tol.merge;
  }

  std::vector<Event> run(double low, double high, std::size_t gridPoints) {
    std::vector<Probe> grid;
    grid.reserve(gridPoints + 1);
    for (std::size_t i = 0; i <= gridPoints; ++i)
      grid.push_back(probe(low + (high - low) * static_cast<double>(i) / static_cast<double>(gridPoints)));

    refineExtrema(grid);
    std::sort(grid.begin(), grid.end(), [](const Probe& a, const Probe& b) { return a.length < b.length; });

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) bisect(grid[i], grid[i + 1]);
    std::sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) { return a.value < b.value; });
    return events_;
  }

 private:
  Probe probe(double length) const { return probeAt(linkage_, type_, length); }

  // A step whose discriminant dips through zero and back between two grid
  // points leaves the endpoint signatures equal. Look for such dips around
  // every local extremum of each step's discriminant.
  void refineExtrema(std::vector<Probe>& grid) const {
    const std::size_t m = type_.size();
    std::vector<Probe> extra;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const Probe& a = grid[i - 1];
      const Probe& b = grid[i];
      const Probe& c = grid[i + 1];
      if (a.status != b.status || b.status != c.status) continue;
      for (std::size_t k = 0; k < m; ++k) {
        if (!defined(b.status[k])) continue;
        const double da = a.discriminant[k], db = b.discriminant[k], dc = c.discriminant[k];
        const bool dip = db > 0.0 && db <= da && db <= dc;
        const bool bump = db < 0.0 && db >= da && db >= dc;
        if (!dip && !bump) continue;
        if (auto found = searchExtremum(a.length, c.length, k, dip, b.status)) extra.push_back(std::move(*found));
      }
    }
    for (auto& p : extra) grid.push_back(std::move(p));
  }

  // Golden-section search for the extremum of step k's discriminant; returns
  // the first probe whose status signature differs from `signature`.
  std::optional<Probe> searchExtremum(double lo, double hi, std::size_t k, bool minimize,
                                      const std::vector<StepStatus>& signature) const {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    Probe p1 = probe(x1), p2 = probe(x2);
    auto score = [&](const Probe& p) {
      const double d = p.discriminant[k];
      return minimize ? d : -d;
    };
    for (int iter = 0; iter < 60 && hi - lo > bracket_; ++iter) {
      if (p1.status != signature) return p1;
      if (p2.status != signature) return p2;
      if (!defined(p1.status[k]) || !defined(p2.status[k])) return std::nullopt;
      if (score(p1) < score(p2)) {
        hi = x2;
        x2 = x1;
        p2 = std::move(p1);
        x1 = hi - ratio * (hi - lo);
        p1 = probe(x1);
      } else {
        lo = x1;
        x1 = x2;
        p1 = std::move(p2);
        x2 = lo + ratio * (hi - lo);
        p2 = probe(x2);
      }
    }
    if (p1.status != signature) return p1;
    if (p2.status != signature) return p2;
    return std::nullopt;
  }

  void bisect(const Probe& a, const Probe& b) {
    if (a.status == b.status) return;
    const double mid = 0.5 * (a.length + b.length);
    if (b.length - a.length <= bracket_ || mid <= a.length || mid >= b.length) {
      record(a, b);
      return;
    }
    Probe m = probe(mid);
    bisect(a, m);
    bisect(m, b);
  }

  void record(const Probe& a, const Probe& b) {
    const std::size_t m = type_.size();
    std::vector<std::size_t> changed;
    for (std::size_t k = 0; k < m; ++k)
      if (defined(a.status[k]) && defined(b.status[k]) && a.status[k] != b.status[k]) changed.push_back(k);
    if (changed.empty()) return;
    const std::size_t primary = changed.front();

    // Report the side on which the collinear step can still be placed.
    const Probe* side = nullptr;
    if (a.status[primary] == StepStatus::Ok) side = &a;
    if (b.status[primary] == StepStatus::Ok) side = side ? nullptr : &b;
    Event ev;
    ev.value = side ? side->length : 0.5 * (a.length + b.length);
    const Probe& at = side ? *side : a;

    std::set<std::size_t> steps(changed.begin(), changed.end());
    for (std::size_t k = 0; k < m; ++k)
      if (at.status[k] == StepStatus::Ok && std::abs(at.discriminant[k]) <= coincide_) steps.insert(k);
    ev.steps.assign(steps.begin(), steps.end());
    events_.push_back(std::move(ev));
  }

  const TDLinkage& linkage_;
  const RealizationType& type_;
  double bracket_ = 0.0;
  double coincide_ = 0.0;
  std::vector<Event> events_;
};

void requireLow(const TDLinkage& linkage) {
  if (!isLow(linkage))
    throw domainError("NotLowComplexity", "linkage does not have low Cayley complexity: " +
                                              linkage.lowComplexity().diagnostic);
}

std::string stepLabel(const TDLinkage& linkage, std::size_t k) {
  const auto& s = linkage.steps()[k];
  const auto& g = linkage.graph();
  return std::to_string(k + 1) + " (" + g.name(s.vertex) + " from " + g.name(s.anchor1) + "," + g.name(s.anchor2) + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// Candidate endpoints
// ---------------------------------------------------------------------------

CandidateScan scanCandidates(const TDLinkage& linkage, const RealizationType& type) {
  requireLow(linkage);
  if (type.size() != linkage.stepCount())
    throw inputError("InvalidArgument", "realization type length does not match the construction");

  const auto& tol = linkage.tolerances();
  const std::size_t gridPoints = std::max<std::size_t>(tol.gridPoints, 2);
  CandidateScan scan;
  const double sum = linkage.barLengthSum();
  const double pitch = sum / static_cast<double>(gridPoints);
  scan.domainLow = 0.0;
  scan.domainHigh = sum + pitch;
  scan.firstSample = pitch * 1e-6;

  Scanner scanner(linkage, type);
  auto events = scanner.run(scan.firstSample, scan.domainHigh, gridPoints);

  const double slack = tol.merge * linkage.scale();
  for (auto& ev : events) {
    if (!scan.endpoints.empty() && ev.value - scan.endpoints.back() <= slack) {
      auto& steps = scan.steps.back();
      steps.insert(steps.end(), ev.steps.begin(), ev.steps.end());
      std::sort(steps.begin(), steps.end());
      steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
      continue;
    }
    scan.endpoints.push_back(ev.value);
    scan.steps.push_back(std::move(ev.steps));
  }
  for (std::size_t i = 0; i < scan.endpoints.size(); ++i)
    if (scan.steps[i].size() > 1) scan.coincidences.push_back({scan.endpoints[i], type, scan.steps[i]});
  return scan;
}

std::vector<double> candidateEndpoints(const TDLinkage& linkage, const RealizationType& type) {
  return scanCandidates(linkage, type).endpoints;
}

// ---------------------------------------------------------------------------
// Oriented spaces
// ---------------------------------------------------------------------------

namespace {

OrientedCCS orientedFromScan(const TDLinkage& linkage, const RealizationType& type, const CandidateScan& scan) {
  OrientedCCS occs;
  occs.type = type;
  const auto& l = scan.endpoints;
  std::optional<double> intervalStart;
  auto append = [&](double lo, double hi) {
    OrientedInterval iv;
    iv.lower = lo;
    iv.upper = hi;
    iv.type = type;
    occs.intervals.push_back(std::move(iv));
  };
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double cur = l[i];
    const double prev = i > 0 ? l[i - 1] : scan.domainLow;
    const double next = i + 1 < l.size() ? l[i + 1] : scan.domainHigh;
    const bool P = realizableAt(linkage, 0.5 * (prev + cur), type);
    const bool N = realizableAt(linkage, 0.5 * (cur + next), type);
    if (!P && !N) {
      // Candidates where a later step already fails are not configurations.
      if (realizableAt(linkage, cur, type)) append(cur, cur);
    } else if (P && !N) {
      append(intervalStart.value_or(scan.firstSample), cur);
      intervalStart.reset();
    } else if (!P && N) {
      intervalStart = cur;
    }
  }
  return occs;
}

}  // namespace

OrientedCCS buildOrientedCCS(const TDLinkage& linkage, const RealizationType& type) {
  return orientedFromScan(linkage, type, scanCandidates(linkage, type));
}

CayleyConfigSpace buildCCS(std::shared_ptr<const TDLinkage> linkage) {
  requireLow(*linkage);
  const std::size_t m = linkage->stepCount();
  const std::size_t cap = linkage->tolerances().maxTypes;
  if (m > 0 && (m - 1 >= 63 || (std::uint64_t{1} << (m - 1)) > cap)) {
    std::ostringstream msg;
    msg << m << " construction steps give 2^" << (m - 1) << " realization types, above the cap of " << cap;
    throw domainError("TooManySteps", msg.str());
  }

  CayleyConfigSpace ccs;
  ccs.linkage = linkage;
  for (const auto& type : canonicalTypes(m)) {
    CandidateScan scan = scanCandidates(*linkage, type);
    for (auto& c : scan.coincidences) ccs.coincidences.push_back(std::move(c));
    OrientedCCS occs = orientedFromScan(*linkage, type, scan);
    if (!occs.intervals.empty()) ccs.oriented.push_back(std::move(occs));
  }

  std::vector<std::pair<double, double>> all;
  for (const auto& occs : ccs.oriented)
    for (const auto& iv : occs.intervals) all.emplace_back(iv.lower, iv.upper);
  std::sort(all.begin(), all.end());
  const double slack = ccs.mergeSlack();
  for (const auto& iv : all) {
    if (!ccs.nonOriented.empty() && iv.first <= ccs.nonOriented.back().second + slack)
      ccs.nonOriented.back().second = std::max(ccs.nonOriented.back().second, iv.second);
    else
      ccs.nonOriented.push_back(iv);
  }
  return ccs;
}

// ---------------------------------------------------------------------------
// Linking
// ---------------------------------------------------------------------------

namespace {

std::string collisionMessage(const RealizationType& a, const RealizationType& b, double length) {
  std::ostringstream msg;
  msg << "CayleyCollision: types " << std::min(a.str(), b.str()) << " and " << std::max(a.str(), b.str())
      << " share a Cayley vector at base length " << length;
  return msg.str();
}

/// Distinct realizations whose complete Cayley vectors coincide. Cayley
/// distance cannot tell them apart, so components meeting only there look
/// touching to any Cayley-metric comparison. Checked at interval endpoints
/// and inside intervals. Inside, a collision arises when the subtree hanging
/// off step k is reflected across the anchor line of k. The reflection keeps
/// every bar and entry when all outside vertices the subtree touches lie on
/// that line; with a single such vertex this happens where it crosses.
void cayleyCollisionWarnings(CayleyConfigSpace& ccs) {
  const TDLinkage& linkage = *ccs.linkage;
  const auto& steps = linkage.steps();
  const auto& vec = linkage.completeCayleyVector();
  std::set<std::string> seen;
  auto warn = [&](std::string msg) {
    if (seen.insert(msg).second) ccs.warnings.push_back(std::move(msg));
  };

  struct Reflection {
    std::size_t step;
    std::vector<std::size_t> flipped;
    VertexId witness;
  };
  std::vector<Reflection> reflections;
  const std::size_t n = linkage.graph().vertexCount();
  for (std::size_t k = 1; k < steps.size(); ++k) {
    const VertexId u = steps[k].anchor1, w = steps[k].anchor2;
    std::vector<bool> inside(n, false);
    inside[steps[k].vertex] = true;
    auto fixed = [&](VertexId x) { return inside[x] || x == u || x == w; };
    std::vector<std::size_t> flipped{k};
    std::set<VertexId> outside;
    for (std::size_t j = k + 1; j < steps.size(); ++j) {
      const VertexId p = steps[j].anchor1, q = steps[j].anchor2;
      if (!inside[p] && !inside[q]) continue;
      for (VertexId x : {p, q})
        if (!fixed(x)) outside.insert(x);
      inside[steps[j].vertex] = true;
      flipped.push_back(j);
    }
    for (std::size_t j = 1; j < vec.size(); ++j) {
      const auto [p, q] = vec[j];
      if (inside[p] && !fixed(q)) outside.insert(q);
      if (inside[q] && !fixed(p)) outside.insert(p);
    }
    if (outside.size() == 1) reflections.push_back({k, std::move(flipped), *outside.begin()});
  }

  constexpr int kSamples = 256;
  for (const auto& occs : ccs.oriented)
    for (const auto& iv : occs.intervals)
      for (const auto& r : reflections) {
        std::vector<std::int8_t> signs = iv.type.signs();
        for (std::size_t j : r.flipped) signs[j] = static_cast<std::int8_t>(-signs[j]);
        const RealizationType other(std::move(signs));
        if (other == iv.type) continue;
        const auto& st = steps[r.step];
        double prevSide = 0.0, prevLength = 0.0;
        for (int i = 1; i < kSamples; ++i) {
          const double length = iv.lower + (iv.upper - iv.lower) * i / kSamples;
          const ForwardSolve fs = forwardSolve(linkage, length, iv.type.signs());
          if (!fs.realizable()) continue;
          const Vec2 p = fs.points[st.anchor1], q = fs.points[st.anchor2], x = fs.points[r.witness];
          const double side = (q.x - p.x) * (x.y - p.y) - (q.y - p.y) * (x.x - p.x);
          if (prevSide != 0.0 && (side > 0.0) != (prevSide > 0.0))
            warn(collisionMessage(iv.type, other, 0.5 * (length + prevLength)));
          prevSide = side;
          prevLength = length;
        }
      }

  struct EndRealization {
    double length;
    RealizationType type;
    CayleyDistanceVector vec;
  };
  std::vector<EndRealization> ends;
  for (const auto& occs : ccs.oriented)
    for (const auto& iv : occs.intervals)
      for (Side side : {Side::Lower, Side::Upper}) {
        const auto flip = side == Side::Lower ? iv.flipStepAtLower : iv.flipStepAtUpper;
        if (!flip) continue;
        const RealizationType collinear = iv.type.collinearAt(*flip);
        try {
          const Realization r = realize(ccs.linkage, iv.endpoint(side), collinear);
          ends.push_back({iv.endpoint(side), collinear, completeCayleyDistanceVector(r)});
        } catch (const Error&) {
        }
      }

  const double slack = ccs.mergeSlack();
  const double tol = 1e-6 * linkage.scale();
  for (std::size_t i = 0; i < ends.size(); ++i)
    for (std::size_t j = i + 1; j < ends.size(); ++j) {
      const auto& a = ends[i];
      const auto& b = ends[j];
      if (a.type == b.type || std::abs(a.length - b.length) > slack) continue;
      if (cayleyDistance(a.vec, b.vec) > tol) continue;
      warn(collisionMessage(a.type, b.type, a.length));
    }
}

}  // namespace

CayleyConfigSpace linkIntervals(CayleyConfigSpace ccs) {
  const TDLinkage& linkage = *ccs.linkage;
  const double slack = ccs.mergeSlack();
  const double ambiguity = linkage.tolerances().merge;

  for (std::size_t s = 0; s < ccs.oriented.size(); ++s) {
    for (std::size_t i = 0; i < ccs.oriented[s].intervals.size(); ++i) {
      for (Side side : {Side::Lower, Side::Upper}) {
        OrientedInterval& iv = ccs.oriented[s].intervals[i];
        const double e = iv.endpoint(side);
        const ForwardSolve fs = forwardSolve(linkage, e, iv.type.signs());

        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t k = 0; k < fs.steps.size(); ++k)
          if (fs.steps[k].status == StepStatus::Ok) ranked.emplace_back(fs.steps[k].collinearity(), k);
        if (ranked.empty()) continue;
        std::sort(ranked.begin(), ranked.end());
        std::size_t flip = ranked.front().second;
        if (ranked.size() > 1 && ranked[1].first <= ambiguity) {
          for (const auto& [c, k] : ranked)
            if (c <= ambiguity) flip = std::min(flip, k);
          std::ostringstream msg;
          msg << "LinkAmbiguity: several steps are collinear at base length " << e << " for type " << iv.type.str()
              << "; linking through step " << stepLabel(linkage, flip);
          ccs.warnings.push_back(msg.str());
        }
        (side == Side::Lower ? iv.flipStepAtLower : iv.flipStepAtUpper) = flip;

        const RealizationType target = iv.type.flipped(flip);
        std::optional<IntervalLink> best;
        double bestGap = std::numeric_limits<double>::infinity();
        if (auto t = ccs.spaceOf(target)) {
          const auto& candidates = ccs.oriented[*t].intervals;
          for (std::size_t j = 0; j < candidates.size(); ++j) {
            for (Side other : {side, opposite(side)}) {
              const double gap = std::abs(candidates[j].endpoint(other) - e);
              if (gap <= slack && gap < bestGap) {
                bestGap = gap;
                best = IntervalLink{IntervalRef{*t, j}, other};
              }
            }
          }
        }
        if (!best) {
          std::ostringstream msg;
          msg << "UnlinkedEndpoint: no interval of type " << target.str() << " ends at base length " << e;
          ccs.warnings.push_back(msg.str());
          continue;
        }
        (side == Side::Lower ? iv.nextLower : iv.nextUpper) = best;
      }
    }
  }
  ccs.linked = true;
  cayleyCollisionWarnings(ccs);
  return ccs;
}

std::shared_ptr<const CayleyConfigSpace> computeCCS(std::shared_ptr<const TDLinkage> linkage) {
  return std::make_shared<const CayleyConfigSpace>(linkIntervals(buildCCS(std::move(linkage))));
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

std::optional<std::size_t> CayleyConfigSpace::spaceOf(const RealizationType& type) const {
  for (std::size_t s = 0; s < oriented.size(); ++s)
    if (oriented[s].type == type) return s;
  return std::nullopt;
}

std::size_t CayleyConfigSpace::intervalCount() const {
  std::size_t n = 0;
  for (const auto& o : oriented) n += o.intervals.size();
  return n;
}

std::vector<IntervalRef> CayleyConfigSpace::intervals() const {
  std::vector<IntervalRef> out;
  for (std::size_t s = 0; s < oriented.size(); ++s)
    for (std::size_t i = 0; i < oriented[s].intervals.size(); ++i) out.push_back({s, i});
  return out;
}

std::optional<IntervalRef> CayleyConfigSpace::locate(double length, const RealizationType& type) const {
  // Expand zero signs into both orientations.
  std::vector<std::vector<std::int8_t>> variants{type.signs()};
  for (std::size_t k = 0; k < type.size(); ++k) {
    if (type[k] != 0) continue;
    std::vector<std::vector<std::int8_t>> expanded;
    for (auto v : variants) {
      v[k] = 1;
      expanded.push_back(v);
      v[k] = -1;
      expanded.push_back(v);
    }
    variants = std::move(expanded);
  }
  std::set<RealizationType> types;
  for (auto& v : variants) types.insert(RealizationType(std::move(v)));

  const double slack = mergeSlack();
  for (const auto& t : types) {
    auto s = spaceOf(t);
    if (!s) continue;
    const auto& ivs = oriented[*s].intervals;
    for (std::size_t i = 0; i < ivs.size(); ++i)
      if (ivs[i].contains(length, slack)) return IntervalRef{*s, i};
  }
  return std::nullopt;
}

std::optional<std::size_t> CayleyConfigSpace::nonOrientedIndex(double length) const {
  const double slack = mergeSlack();
  for (std::size_t i = 0; i < nonOriented.size(); ++i)
    if (length >= nonOriented[i].first - slack && length <= nonOriented[i].second + slack) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Genericity
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> coincidenceWarnings(const TDLinkage& linkage,
                                             const std::vector<CollinearCoincidence>& coincidences) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  const auto& f = linkage.baseNonedge();
  const auto& g = linkage.graph();
  for (const auto& c : coincidences) {
    std::ostringstream msg;
    msg << "simultaneous collinearity of steps ";
    for (std::size_t i = 0; i < c.steps.size(); ++i) msg << (i ? " and " : "") << stepLabel(linkage, c.steps[i]);
    msg << " at |" << g.name(f.first) << g.name(f.second) << "| = " << c.baseLength;
    if (seen.insert(msg.str()).second) out.push_back(msg.str());
  }
  return out;
}

}  // namespace

std::vector<std::string> genericityWarnings(const TDLinkage& linkage) {
  std::vector<std::string> out = checkGeneric(linkage);
  if (!isLow(linkage)) return out;
  const std::size_t m = linkage.stepCount();
  if (m > 0 && (m - 1 >= 63 || (std::uint64_t{1} << (m - 1)) > linkage.tolerances().maxTypes)) return out;
  std::vector<CollinearCoincidence> all;
  for (const auto& type : canonicalTypes(m)) {
    auto scan = scanCandidates(linkage, type);
    all.insert(all.end(), scan.coincidences.begin(), scan.coincidences.end());
  }
  for (auto& w : coincidenceWarnings(linkage, all)) out.push_back(std::move(w));
  return out;
}

std::vector<std::string> genericityWarnings(const CayleyConfigSpace& ccs) {
  std::vector<std::string> out = checkGeneric(*ccs.linkage);
  for (auto& w : coincidenceWarnings(*ccs.linkage, ccs.coincidences)) out.push_back(std::move(w));
  for (const auto& w : ccs.warnings) out.push_back(w);
  return out;
}

}  // namespace cayrs
