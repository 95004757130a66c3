#include "cayrs/motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace cayrs {

namespace {

std::string describe(const CayleyConfigSpace& ccs, IntervalRef ref) {
  const auto& iv = ccs.at(ref);
  std::ostringstream out;
  out << iv.type.str() << "[" << iv.lower << ", " << iv.upper << "]";
  return out.str();
}

IntervalRef locateOrThrow(const CayleyConfigSpace& ccs, const Realization& r) {
  if (r.linkage() != ccs.linkage && r.linkage()->fingerprint() != ccs.linkage->fingerprint())
    throw domainError("MismatchedLinkage", "realization belongs to a different linkage");
  if (auto ref = ccs.locate(r.baseLength(), r.type())) return *ref;
  std::ostringstream msg;
  msg << "base length " << r.baseLength() << " with type " << r.type().str() << " lies in no oriented interval";
  throw domainError("NotRealizable", msg.str());
}

bool selfLinked(const CayleyConfigSpace& ccs, IntervalRef ref, Side side) {
  const auto& link = ccs.at(ref).next(side);
  return link && link->interval == ref && link->side == side;
}

// Follows links from `start`, leaving through `firstExit`, until the start
// interval is entered again in the starting direction.
std::vector<MotionLeg> walkCycle(const CayleyConfigSpace& ccs, IntervalRef start, Side firstExit) {
  std::vector<MotionLeg> legs;
  IntervalRef cur = start;
  Side enter = opposite(firstExit);
  const std::size_t limit = 2 * ccs.intervalCount() + 2;
  for (std::size_t n = 0; n < limit; ++n) {
    const Side exit = opposite(enter);
    legs.push_back(MotionLeg{cur, enter, exit, std::nullopt, std::nullopt});
    const auto& link = ccs.at(cur).next(exit);
    if (!link)
      throw domainError("UnlinkedEndpoint", "the " + std::string(sideName(exit)) + " end of " + describe(ccs, cur) +
                                                " has no linked interval");
    cur = link->interval;
    enter = link->side;
    if (cur == start && enter == opposite(firstExit)) return legs;
  }
  throw domainError("UnlinkedEndpoint", "interval links do not close into a cycle");
}

// A cycle that runs along an arc and back again (ends linked to themselves)
// is reduced to the arc.
bool foldCycle(const CayleyConfigSpace& ccs, std::vector<MotionLeg>& legs) {
  const std::size_t n = legs.size();
  std::optional<std::size_t> first;
  for (std::size_t i = 0; i < n && !first; ++i)
    if (selfLinked(ccs, legs[i].interval, legs[i].enterAt)) first = i;
  if (!first) return false;
  std::vector<MotionLeg> arc;
  for (std::size_t j = 0; j < n; ++j) {
    const MotionLeg& leg = legs[(*first + j) % n];
    arc.push_back(leg);
    if (selfLinked(ccs, leg.interval, leg.exitAt)) break;
  }
  legs = std::move(arc);
  return true;
}

std::optional<ContinuousMotion> walkPath(std::shared_ptr<const CayleyConfigSpace> ccs, IntervalRef from, double l1,
                                         IntervalRef to, double l2, Side direction) {
  ContinuousMotion path;
  path.ccs = ccs;
  path.kind = MotionKind::Path;
  const Side back = opposite(direction);
  if (from == to && (direction == Side::Upper ? l2 >= l1 : l2 <= l1)) {
    path.legs.push_back(MotionLeg{from, back, direction, l1, l2});
    return path;
  }
  path.legs.push_back(MotionLeg{from, back, direction, l1, std::nullopt});
  auto link = ccs->at(from).next(direction);
  const std::size_t limit = 2 * ccs->intervalCount() + 2;
  for (std::size_t n = 0; link && n < limit; ++n) {
    const IntervalRef cur = link->interval;
    const Side enter = link->side;
    if (cur == to) {
      path.legs.push_back(MotionLeg{cur, enter, opposite(enter), std::nullopt, l2});
      return path;
    }
    if (cur == from && enter == back) return std::nullopt;
    path.legs.push_back(MotionLeg{cur, enter, opposite(enter), std::nullopt, std::nullopt});
    link = ccs->at(cur).next(opposite(enter));
  }
  return std::nullopt;
}

struct SampleRun {
  std::vector<MotionSample> samples;
  /// Mirror parity after passing the junction from the last leg to the first.
  bool closingMirrored = false;
};

// Realization on `ref` at `length`; at an endpoint whose flip step is
// collinear the step gets sign 0. Returns whether that canonical form is the
// mirror image of the interval's own type.
std::pair<Realization, bool> realizeLegPoint(const CayleyConfigSpace& ccs, IntervalRef ref, double length,
                                             std::optional<Side> end) {
  const auto& iv = ccs.at(ref);
  const auto& linkage = ccs.linkage;
  if (end) {
    if (const auto& k = iv.flipStep(*end)) {
      const ForwardSolve fs = forwardSolve(*linkage, length, iv.type.signs());
      if (fs.realizable() && std::abs(fs.steps[*k].discriminant) <= linkage->tolerances().geometric) {
        auto signs = iv.type.signs();
        signs[*k] = 0;
        const bool negated = RealizationType::canonicalize(signs);
        return {realize(linkage, length, RealizationType(std::move(signs))), negated};
      }
    }
  }
  return {realize(linkage, length, iv.type), false};
}

// Crossing the junction at `side` of `ref` changes the physical orientation
// of the canonical representative when the flipped type had to be negated.
bool junctionMirrors(const CayleyConfigSpace& ccs, IntervalRef ref, Side side) {
  const auto& iv = ccs.at(ref);
  const auto& k = iv.flipStep(side);
  if (!k) return false;
  auto signs = iv.type.signs();
  signs[*k] = static_cast<std::int8_t>(-signs[*k]);
  return RealizationType::canonicalize(signs);
}

SampleRun runSamples(const ContinuousMotion& motion, const Sampler& sampler) {
  SampleRun run;
  if (!motion.ccs || motion.legs.empty()) return run;
  const CayleyConfigSpace& ccs = *motion.ccs;
  const bool cycle = motion.kind == MotionKind::Component && !motion.folded;
  const std::size_t legCount = motion.legs.size();
  bool mirrored = false;
  for (std::size_t i = 0; i < legCount; ++i) {
    const MotionLeg& leg = motion.legs[i];
    if (i > 0) mirrored ^= junctionMirrors(ccs, motion.legs[i - 1].interval, motion.legs[i - 1].exitAt);
    const double from = motion.legStart(i);
    const double to = motion.legEnd(i);
    std::vector<double> params = from == to ? std::vector<double>{from} : sampler.parameters(from, to);
    for (std::size_t j = 0; j < params.size(); ++j) {
      const bool first = j == 0;
      const bool last = j + 1 == params.size();
      // Junctions belong to the earlier leg.
      if (first && i > 0) continue;
      if (last && cycle && i + 1 == legCount && !(first && i == 0)) continue;
      std::optional<Side> end;
      if (first && !leg.clipStart) end = leg.enterAt;
      if (last && !leg.clipEnd) end = leg.exitAt;
      auto [r, negated] = realizeLegPoint(ccs, leg.interval, params[j], end);
      run.samples.push_back(MotionSample{std::move(r), i, mirrored != negated});
    }
  }
  if (cycle) run.closingMirrored = mirrored != junctionMirrors(ccs, motion.legs.back().interval, motion.legs.back().exitAt);
  return run;
}

}  // namespace

// ---------------------------------------------------------------------------
// ContinuousMotion
// ---------------------------------------------------------------------------

double ContinuousMotion::legStart(std::size_t leg) const {
  const MotionLeg& l = legs.at(leg);
  return l.clipStart ? *l.clipStart : ccs->at(l.interval).endpoint(l.enterAt);
}

double ContinuousMotion::legEnd(std::size_t leg) const {
  const MotionLeg& l = legs.at(leg);
  return l.clipEnd ? *l.clipEnd : ccs->at(l.interval).endpoint(l.exitAt);
}

double ContinuousMotion::arcLength() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < legs.size(); ++i) sum += std::abs(legEnd(i) - legStart(i));
  return sum;
}

bool ContinuousMotion::contains(IntervalRef ref) const {
  return std::any_of(legs.begin(), legs.end(), [&](const MotionLeg& l) { return l.interval == ref; });
}

ContinuousMotion reversed(const ContinuousMotion& motion) {
  ContinuousMotion out = motion;
  std::reverse(out.legs.begin(), out.legs.end());
  for (auto& leg : out.legs) {
    std::swap(leg.enterAt, leg.exitAt);
    std::swap(leg.clipStart, leg.clipEnd);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Components
// ---------------------------------------------------------------------------

ContinuousMotion componentFrom(std::shared_ptr<const CayleyConfigSpace> ccs, IntervalRef start) {
  ContinuousMotion motion;
  motion.kind = MotionKind::Component;
  motion.legs = walkCycle(*ccs, start, Side::Upper);
  motion.folded = foldCycle(*ccs, motion.legs);
  motion.ccs = std::move(ccs);
  return motion;
}

ContinuousMotion findComponent(std::shared_ptr<const CayleyConfigSpace> ccs, const Realization& r) {
  const IntervalRef start = locateOrThrow(*ccs, r);
  return componentFrom(std::move(ccs), start);
}

std::vector<ContinuousMotion> findAllComponents(std::shared_ptr<const CayleyConfigSpace> ccs) {
  std::vector<IntervalRef> refs = ccs->intervals();
  std::stable_sort(refs.begin(), refs.end(),
                   [&](IntervalRef a, IntervalRef b) { return ccs->at(a).lower < ccs->at(b).lower; });
  std::set<IntervalRef> seen;
  std::vector<ContinuousMotion> out;
  for (IntervalRef ref : refs) {
    if (seen.count(ref)) continue;
    ContinuousMotion c = componentFrom(ccs, ref);
    for (const auto& leg : c.legs) seen.insert(leg.interval);
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<std::size_t> componentIndexOf(const std::vector<ContinuousMotion>& components, IntervalRef ref) {
  for (std::size_t i = 0; i < components.size(); ++i)
    if (components[i].contains(ref)) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

std::vector<double> UniformSampler::parameters(double from, double to) const {
  std::vector<double> out(perLeg_);
  const double n = static_cast<double>(perLeg_ - 1);
  for (std::size_t i = 0; i < perLeg_; ++i) out[i] = from + (to - from) * (static_cast<double>(i) / n);
  out.back() = to;
  return out;
}

std::vector<double> EndpointClusteredSampler::parameters(double from, double to) const {
  std::vector<double> out(perLeg_);
  const double n = static_cast<double>(perLeg_ - 1);
  for (std::size_t i = 0; i < perLeg_; ++i)
    out[i] = from + (to - from) * 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) / n));
  out.front() = from;
  out.back() = to;
  return out;
}

std::vector<MotionSample> sampleMotion(const ContinuousMotion& motion, const Sampler& sampler) {
  return runSamples(motion, sampler).samples;
}

std::vector<Realization> sampleRealizations(const ContinuousMotion& motion, const Sampler& sampler) {
  std::vector<Realization> out;
  for (auto& s : runSamples(motion, sampler).samples) out.push_back(std::move(s.realization));
  return out;
}

Curve3D curve3D(const ContinuousMotion& motion, VertexPair f1, VertexPair f2, VertexPair f3, const Sampler& sampler) {
  const auto& linkage = motion.ccs->linkage;
  const auto& vec = linkage->completeCayleyVector();
  const auto& g = linkage->graph();
  std::array<std::size_t, 3> slots{};
  const std::array<VertexPair, 3> wanted{f1, f2, f3};
  for (std::size_t i = 0; i < 3; ++i) {
    auto it = std::find(vec.begin(), vec.end(), wanted[i]);
    if (it == vec.end()) {
      std::string name = wanted[i].first < g.vertexCount() && wanted[i].second < g.vertexCount()
                             ? g.pairName(wanted[i])
                             : std::string("?");
      throw inputError("NonedgeNotInVector", "non-edge " + name + " is not in the complete Cayley vector (" +
                                                 std::to_string(vec.size()) + " entries)");
    }
    slots[i] = static_cast<std::size_t>(it - vec.begin());
  }
  if (slots[0] == slots[1] || slots[0] == slots[2] || slots[1] == slots[2])
    throw inputError("NonedgeNotInVector", "the three projection non-edges must be distinct");

  Curve3D out;
  for (const auto& s : runSamples(motion, sampler).samples) {
    const auto v = completeCayleyDistanceVector(s.realization);
    out.points.push_back({v[slots[0]], v[slots[1]], v[slots[2]]});
    out.typeLabels.push_back(s.realization.type());
    out.sampleParams.emplace_back(s.leg, s.realization.baseLength());
  }
  return out;
}

TracedCurves tracedCurves(const ContinuousMotion& motion, const std::vector<std::string>& vertices,
                          const Sampler& sampler) {
  TracedCurves out;
  if (!motion.ccs) return out;
  const auto names = motion.ccs->linkage->allVertexNames();
  for (const auto& v : vertices)
    if (std::find(names.begin(), names.end(), v) == names.end())
      throw inputError("UnknownVertex", "unknown vertex '" + v + "'");
  for (const auto& v : vertices) out.curves[v];

  const SampleRun run = runSamples(motion, sampler);
  const int passes = run.closingMirrored ? 2 : 1;
  for (int pass = 0; pass < passes; ++pass) {
    for (const auto& s : run.samples) {
      const bool mirror = s.mirrored != (pass == 1);
      const auto placed = restoreDecorations(s.realization);
      for (const auto& v : vertices) {
        Vec2 p = placed.at(v);
        if (mirror) p.y = -p.y;
        out.curves[v].push_back(p);
      }
      out.typeLabels.push_back(s.realization.type());
      out.sampleParams.emplace_back(s.leg, s.realization.baseLength());
    }
  }
  return out;
}

NearestPair nearestRealizations(const ContinuousMotion& c1, const ContinuousMotion& c2, const Sampler& sampler) {
  auto a = sampleRealizations(c1, sampler);
  auto b = sampleRealizations(c2, sampler);
  if (a.empty() || b.empty()) throw domainError("NotRealizable", "a component has no sampled realizations");
  std::vector<CayleyDistanceVector> va, vb;
  for (const auto& r : a) va.push_back(completeCayleyDistanceVector(r));
  for (const auto& r : b) vb.push_back(completeCayleyDistanceVector(r));
  std::size_t bi = 0, bj = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < va.size(); ++i) {
    for (std::size_t j = 0; j < vb.size(); ++j) {
      const double d = cayleyDistance(va[i], vb[j]);
      if (d < best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  }
  return NearestPair{a[bi], b[bj], best, bi, bj};
}

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

std::vector<ContinuousMotion> findPath(std::shared_ptr<const CayleyConfigSpace> ccs, const Realization& r1,
                                       const Realization& r2, const Sampler& sampler) {
  const IntervalRef from = locateOrThrow(*ccs, r1);
  const IntervalRef to = locateOrThrow(*ccs, r2);
  const double l1 = r1.baseLength();
  const double l2 = r2.baseLength();

  std::vector<ContinuousMotion> paths;
  if (from == to && std::abs(l1 - l2) <= ccs->mergeSlack()) {
    ContinuousMotion trivial;
    trivial.ccs = ccs;
    trivial.kind = MotionKind::Path;
    trivial.legs.push_back(MotionLeg{from, Side::Lower, Side::Upper, l1, l2});
    paths.push_back(std::move(trivial));
    return paths;
  }
  for (Side direction : {Side::Upper, Side::Lower})
    if (auto p = walkPath(ccs, from, l1, to, l2, direction)) paths.push_back(std::move(*p));

  if (paths.empty()) {
    ContinuousMotion c1 = findComponent(ccs, r1);
    ContinuousMotion c2 = findComponent(ccs, r2);
    NearestPair nearest = nearestRealizations(c1, c2, sampler);
    throw NotConnected(std::move(c1), std::move(c2), std::move(nearest));
  }
  std::stable_sort(paths.begin(), paths.end(), [](const ContinuousMotion& a, const ContinuousMotion& b) {
    if (a.legs.size() != b.legs.size()) return a.legs.size() < b.legs.size();
    return a.arcLength() < b.arcLength();
  });
  return paths;
}

PairClassification classifyPair(std::shared_ptr<const CayleyConfigSpace> ccs, const Realization& r1,
                                const Realization& r2) {
  PairClassification out;
  const IntervalRef a = locateOrThrow(*ccs, r1);
  const IntervalRef b = locateOrThrow(*ccs, r2);
  out.sameOrientedInterval = a == b;
  out.sameType = ccs->at(a).type == ccs->at(b).type;
  const auto na = ccs->nonOrientedIndex(r1.baseLength());
  const auto nb = ccs->nonOrientedIndex(r2.baseLength());
  out.sameNonOrientedInterval = na && nb && *na == *nb;
  out.sameComponent = findComponent(ccs, r1).contains(b);
  if (out.sameComponent) out.pathCount = findPath(ccs, r1, r2).size();
  if (out.sameOrientedInterval)
    out.label = "1";
  else if (out.sameNonOrientedInterval)
    out.label = out.pathCount > 0 ? "2a" : "2b";
  else
    out.label = out.pathCount > 0 ? "3a" : "3b";
  return out;
}

Realization realizeOnInterval(const CayleyConfigSpace& ccs, IntervalRef ref, double length) {
  const auto& iv = ccs.at(ref);
  const double slack = ccs.mergeSlack();
  std::optional<Side> end;
  if (std::abs(length - iv.lower) <= slack) end = Side::Lower;
  else if (std::abs(length - iv.upper) <= slack) end = Side::Upper;
  return realizeLegPoint(ccs, ref, length, end).first;
}

}  // namespace cayrs
