#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "cayrs/errors.hpp"
#include "cayrs/motion.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cayrs;

namespace {

std::string errorName(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.name();
  }
  return "";
}

struct Fixture {
  std::shared_ptr<const TDLinkage> linkage;
  std::shared_ptr<const CayleyConfigSpace> ccs;
  explicit Fixture(const std::string& file) : linkage(loadFixture(file)), ccs(computeCCS(linkage)) {}
  Realization at(double length, const char* type) const {
    return realize(linkage, length, RealizationType::parse(type));
  }
};

std::multiset<IntervalRef> legSet(const ContinuousMotion& m) {
  std::multiset<IntervalRef> out;
  for (const auto& leg : m.legs) out.insert(leg.interval);
  return out;
}

// Consecutive legs meet at a linked endpoint; a cycle closes on itself.
void checkChain(const ContinuousMotion& m) {
  const auto& ccs = *m.ccs;
  for (std::size_t i = 0; i + 1 < m.legs.size(); ++i) {
    const auto& leg = m.legs[i];
    const auto& link = ccs.at(leg.interval).next(leg.exitAt);
    REQUIRE(link.has_value());
    CHECK(link->interval == m.legs[i + 1].interval);
    CHECK(link->side == m.legs[i + 1].enterAt);
  }
  if (m.kind == MotionKind::Component && !m.folded && !m.legs.empty()) {
    const auto& last = m.legs.back();
    const auto& link = ccs.at(last.interval).next(last.exitAt);
    REQUIRE(link.has_value());
    CHECK(link->interval == m.legs.front().interval);
    CHECK(link->side == m.legs.front().enterAt);
    std::set<std::pair<IntervalRef, Side>> seen;
    for (const auto& leg : m.legs) CHECK(seen.insert({leg.interval, leg.enterAt}).second);
  }
}

void checkSamples(const std::vector<MotionSample>& samples) {
  for (const auto& s : samples) {
    const auto& r = s.realization;
    const auto& g = r.linkage()->graph();
    for (const auto& b : g.bars())
      CHECK(std::abs(distance(r.points()[b.u], r.points()[b.v]) - b.length) <= 1e-9 * r.linkage()->scale());
    for (std::size_t k = 0; k < r.type().size(); ++k)
      if (r.type()[k] != 0) CHECK(stepOrientation(r, k) != -r.type()[k]);
  }
}

}  // namespace

TEST_CASE("components of the four-bar fixture") {
  const Fixture f("fourbar.json");
  const ContinuousMotion c = findComponent(f.ccs, f.at(5.0, "++"));
  CHECK(c.kind == MotionKind::Component);
  CHECK_FALSE(c.folded);
  REQUIRE(c.legs.size() == 2);
  CHECK(c.interval(0).type.str() == "++");
  CHECK(c.legs[0].enterAt == Side::Lower);
  CHECK(c.legs[0].exitAt == Side::Upper);
  CHECK(c.interval(1).type.str() == "+-");
  CHECK(c.legs[1].enterAt == Side::Upper);
  CHECK(c.legs[1].exitAt == Side::Lower);
  CHECK(std::abs(c.legStart(0) - 4.0) <= 1e-9);
  CHECK(std::abs(c.legEnd(0) - 7.5) <= 1e-9);
  CHECK(std::abs(c.arcLength() - 7.0) <= 1e-8);
  checkChain(c);

  const auto all = findAllComponents(f.ccs);
  REQUIRE(all.size() == 1);
  CHECK(legSet(all[0]) == legSet(c));
  CHECK(componentIndexOf(all, IntervalRef{1, 0}) == std::optional<std::size_t>(0));
  CHECK(legSet(findComponent(f.ccs, f.at(6.9, "+-"))) == legSet(c));

  CHECK(errorName([&] { findComponent(f.ccs, realize(loadFixture("twobar.json"), 5, RealizationType::parse("+"))); }) ==
        "MismatchedLinkage");
}

TEST_CASE("the two-bar component folds onto its interval") {
  const Fixture f("twobar.json");
  const ContinuousMotion c = findComponent(f.ccs, f.at(5.0, "+"));
  REQUIRE(c.legs.size() == 1);
  CHECK(c.folded);
  CHECK(std::abs(c.interval(0).lower - 1.0) <= 1e-9);
  CHECK(std::abs(c.interval(0).upper - 7.0) <= 1e-9);
  CHECK(findAllComponents(f.ccs).size() == 1);
  CHECK(sampleRealizations(c).size() == 64);
}

TEST_CASE("the three-step fixture has two components") {
  const Fixture f("threestep.json");
  const auto all = findAllComponents(f.ccs);
  REQUIRE(all.size() == 2);
  std::size_t legs = 0;
  std::set<IntervalRef> seen;
  for (const auto& c : all) {
    checkChain(c);
    for (const auto& leg : c.legs) {
      CHECK(seen.insert(leg.interval).second);
      ++legs;
    }
  }
  CHECK(legs == f.ccs->intervalCount());
  CHECK(all[0].interval(0).lower < all[1].interval(0).lower);

  const auto sampled = oracle::sampleConnectivity(f.linkage);
  const auto cmp = oracle::comparePartition(*f.ccs, all, sampled);
  CHECK_MESSAGE(cmp.equal, cmp.detail);

  SUBCASE("component membership is the same from every sample") {
    for (const auto& c : all)
      for (const auto& r : sampleRealizations(c, UniformSampler(8)))
        if (!r.type().hasZero()) CHECK(legSet(findComponent(f.ccs, r)) == legSet(c));
  }
}

TEST_CASE("empty space has no components") {
  LinkageSpec s;
  s.vertices = {"a", "b", "c", "d"};
  s.bars = {{"a", "b", 1}, {"b", "c", 2}, {"a", "d", 10}, {"d", "c", 15}};
  s.baseNonedge = std::make_pair(std::string("a"), std::string("c"));
  const auto ccs = computeCCS(TDLinkage::create(s));
  CHECK(findAllComponents(ccs).empty());
}

TEST_CASE("realizations outside the space") {
  const Fixture f("fourbar.json");
  const Realization outside(f.linkage, 7.9, RealizationType::parse("++"), forwardSolve(*f.linkage, 7.9, {}).points);
  CHECK(errorName([&] { findComponent(f.ccs, outside); }) == "NotRealizable");
}

TEST_CASE("paths between the four-bar mirror configurations") {
  const Fixture f("fourbar.json");
  const Realization r1 = f.at(5.0, "++");
  const Realization r2 = f.at(5.0, "+-");
  const auto paths = findPath(f.ccs, r1, r2);
  REQUIRE(paths.size() == 2);
  for (const auto& p : paths) {
    CHECK(p.kind == MotionKind::Path);
    REQUIRE(p.legs.size() == 2);
    checkChain(p);
    CHECK(p.legs.front().clipStart == std::optional<double>(5.0));
    CHECK(p.legs.back().clipEnd == std::optional<double>(5.0));
    CHECK(p.interval(0).type.str() == "++");
    CHECK(p.interval(1).type.str() == "+-");
  }
  // One path turns at 4 (flip b), the other at 7.5 (flip d); shorter first.
  CHECK(paths[0].legs[0].exitAt == Side::Lower);
  CHECK(paths[1].legs[0].exitAt == Side::Upper);
  CHECK(std::abs(paths[0].arcLength() - 2.0) <= 1e-8);
  CHECK(std::abs(paths[1].arcLength() - 5.0) <= 1e-8);

  const auto back = findPath(f.ccs, r2, r1);
  REQUIRE(back.size() == 2);
  std::vector<std::vector<MotionLeg>> forward, backward;
  for (const auto& p : paths) forward.push_back(reversed(p).legs);
  for (const auto& p : back) backward.push_back(p.legs);
  std::sort(forward.begin(), forward.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  for (const auto& legs : forward) CHECK(std::find(backward.begin(), backward.end(), legs) != backward.end());

  const auto trivial = findPath(f.ccs, r1, r1);
  REQUIRE(trivial.size() == 1);
  REQUIRE(trivial[0].legs.size() == 1);
  CHECK(trivial[0].arcLength() == 0.0);

  const auto inside = findPath(f.ccs, r1, f.at(6.0, "++"));
  REQUIRE_FALSE(inside.empty());
  CHECK(inside[0].legs.size() == 1);
  CHECK(std::abs(inside[0].arcLength() - 1.0) <= 1e-12);
  CHECK(inside.size() <= 2);
}

TEST_CASE("paths across components are refused with the nearest pair") {
  const Fixture f("threestep.json");
  const auto all = findAllComponents(f.ccs);
  REQUIRE(all.size() == 2);
  const double l1 = 0.5 * (all[0].interval(0).lower + all[0].interval(0).upper);
  const double l2 = 0.5 * (all[1].interval(0).lower + all[1].interval(0).upper);
  const Realization r1 = realize(f.linkage, l1, all[0].interval(0).type);
  const Realization r2 = realize(f.linkage, l2, all[1].interval(0).type);
  try {
    findPath(f.ccs, r1, r2);
    FAIL("expected NotConnected");
  } catch (const NotConnected& e) {
    CHECK(legSet(e.fromComponent()) == legSet(all[0]));
    CHECK(legSet(e.toComponent()) == legSet(all[1]));
    const auto direct = nearestRealizations(all[0], all[1]);
    CHECK(e.nearest().distance == direct.distance);
    CHECK(e.nearest().distance > 0.0);
  }

  const auto label = classifyPair(f.ccs, r1, r2);
  CHECK_FALSE(label.sameComponent);
  CHECK_FALSE(label.sameNonOrientedInterval);
  CHECK(label.pathCount == 0);
  CHECK(label.label == "3b");
}

TEST_CASE("pair classification on the four-bar fixture") {
  const Fixture f("fourbar.json");
  const auto same = classifyPair(f.ccs, f.at(5.0, "++"), f.at(6.0, "++"));
  CHECK(same.label == "1");
  CHECK(same.sameOrientedInterval);
  CHECK(same.sameType);
  const auto mirror = classifyPair(f.ccs, f.at(5.0, "++"), f.at(5.0, "+-"));
  CHECK(mirror.label == "2a");
  CHECK(mirror.sameNonOrientedInterval);
  CHECK_FALSE(mirror.sameOrientedInterval);
  CHECK_FALSE(mirror.sameType);
  CHECK(mirror.sameComponent);
  CHECK(mirror.pathCount == 2);
}

TEST_CASE("sampling") {
  const Fixture f("fourbar.json");
  const ContinuousMotion c = findAllComponents(f.ccs).at(0);
  const auto samples = sampleMotion(c);
  CHECK(samples.size() == 126);
  checkSamples(samples);
  CHECK(samples.front().leg == 0);
  CHECK(samples.back().leg == 1);
  // Junction at 7.5 appears once with d collinear.
  std::size_t zeros = 0;
  for (const auto& s : samples) zeros += s.realization.type().hasZero() ? 1 : 0;
  CHECK(zeros == 2);
  for (std::size_t i = 1; i < samples.size(); ++i)
    CHECK(cayleyDistance(samples[i - 1].realization, samples[i].realization) > 0.0);

  const auto ends = sampleRealizations(c, UniformSampler(2));
  REQUIRE(ends.size() == 2);
  CHECK(std::abs(ends[0].baseLength() - 4.0) <= 1e-9);
  CHECK(std::abs(ends[1].baseLength() - 7.5) <= 1e-9);

  const auto clustered = EndpointClusteredSampler(5).parameters(0.0, 1.0);
  REQUIRE(clustered.size() == 5);
  CHECK(clustered.front() == 0.0);
  CHECK(clustered.back() == 1.0);
  CHECK(std::abs(clustered[2] - 0.5) <= 1e-12);
  CHECK(clustered[1] < 0.25);
  const auto uniform = UniformSampler(5).parameters(2.0, 0.0);
  CHECK(uniform == std::vector<double>{2.0, 1.5, 1.0, 0.5, 0.0});

  ContinuousMotion empty;
  empty.ccs = f.ccs;
  CHECK(sampleRealizations(empty).empty());
}

TEST_CASE("Cayley curves") {
  const Fixture four("fourbar.json");
  const auto& g4 = four.linkage->graph();
  const ContinuousMotion c4 = findAllComponents(four.ccs).at(0);
  const VertexPair ac(g4.id("a"), g4.id("c")), bd(g4.id("b"), g4.id("d")), ab(g4.id("a"), g4.id("b"));
  CHECK(errorName([&] { curve3D(c4, ac, bd, ac); }) == "NonedgeNotInVector");
  CHECK(errorName([&] { curve3D(c4, ac, bd, ab); }) == "NonedgeNotInVector");

  const Fixture three("threestep.json");
  const auto& g = three.linkage->graph();
  const auto& vec = three.linkage->completeCayleyVector();
  REQUIRE(vec.size() == 3);
  for (const auto& c : findAllComponents(three.ccs)) {
    const Curve3D curve = curve3D(c, vec[0], vec[1], vec[2]);
    REQUIRE(!curve.points.empty());
    CHECK(curve.points.size() == curve.typeLabels.size());
    CHECK(curve.points.size() == curve.sampleParams.size());
    for (std::size_t i = 0; i < curve.points.size(); ++i) CHECK(curve.points[i][0] == curve.sampleParams[i].second);
    // Closed: the gap between the last and first samples shrinks like the
    // square root of the pitch (the curve has a vertical tangent at the
    // collinear junction).
    auto closingGap = [&](std::size_t n) {
      const Curve3D dense = curve3D(c, vec[0], vec[1], vec[2], UniformSampler(n));
      const auto& p = dense.points.front();
      const auto& q = dense.points.back();
      return std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]);
    };
    CHECK(closingGap(1024) < 0.3 * closingGap(64));
    CHECK(closingGap(16384) < 0.1 * closingGap(64));
  }
  CHECK(g.pairName(vec[0]) == "(a,b)");
}

TEST_CASE("traced vertex curves") {
  SUBCASE("base vertex stays at the origin") {
    const Fixture f("fourbar.json");
    const auto curves = tracedCurves(findAllComponents(f.ccs).at(0), {"a", "d"});
    for (const auto& p : curves.curves.at("a")) {
      CHECK(p.x == 0.0);
      CHECK(p.y == 0.0);
    }
    // d runs around a closed loop.
    const auto& d = curves.curves.at("d");
    REQUIRE(d.size() > 3);
    double step = 0.0;
    for (std::size_t i = 1; i < d.size(); ++i) step = std::max(step, distance(d[i - 1], d[i]));
    CHECK(distance(d.front(), d.back()) <= step + 1e-12);
    CHECK(curves.sampleParams.size() == d.size());
    CHECK(curves.typeLabels.size() == d.size());
    CHECK(errorName([&] { tracedCurves(findAllComponents(f.ccs).at(0), {"zz"}); }) == "UnknownVertex");
  }
  SUBCASE("two-bar apex sweeps the upper half plane") {
    const Fixture f("twobar.json");
    const auto curves = tracedCurves(findAllComponents(f.ccs).at(0), {"c"});
    const auto& c = curves.curves.at("c");
    REQUIRE(c.size() >= 2);
    for (const auto& p : c) CHECK(p.y >= 0.0);
    CHECK(std::abs(c.front().y) <= 1e-6);
    CHECK(std::abs(c.back().y) <= 1e-6);
  }
  SUBCASE("cluster passengers can be traced") {
    const Fixture f("cluster.json");
    const auto curves = tracedCurves(findAllComponents(f.ccs).at(0), {"m", "b"});
    const auto& m = curves.curves.at("m");
    const auto& b = curves.curves.at("b");
    REQUIRE(m.size() == b.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(std::abs(norm(m[i]) - std::sqrt(1.64)) <= 1e-9);
      CHECK(std::abs(distance(m[i], b[i]) - std::sqrt(1.64)) <= 1e-9);
    }
  }
}

TEST_CASE("nearest realizations") {
  const Fixture f("threestep.json");
  const auto all = findAllComponents(f.ccs);
  REQUIRE(all.size() == 2);
  const auto self = nearestRealizations(all[0], all[0]);
  CHECK(self.distance == 0.0);

  for (std::size_t n : {8, 64}) {
    const UniformSampler sampler(n);
    const auto best = nearestRealizations(all[0], all[1], sampler);
    const auto scan = oracle::exhaustiveNearest(sampleRealizations(all[0], sampler), sampleRealizations(all[1], sampler));
    CHECK(best.firstIndex == scan.first);
    CHECK(best.secondIndex == scan.second);
    CHECK(best.distance == scan.distance);
    CHECK(best.distance > 0.0);
    CHECK(cayleyDistance(best.first, best.second) == doctest::Approx(best.distance).epsilon(1e-12));
  }

  const Fixture four("fourbar.json");
  const auto c = findAllComponents(four.ccs).at(0);
  CHECK(nearestRealizations(c, c).distance == 0.0);
}

TEST_CASE("random linkages: partition and leg multisets") {
  std::mt19937 rng(99);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 25; ++trial) {
    auto linkage = TDLinkage::create(oracle::randomLinkage(rng, 2 + trial % 3));
    if (!isLow(*linkage)) continue;
    ++checked;
    auto ccs = computeCCS(linkage);
    const auto all = findAllComponents(ccs);
    std::set<IntervalRef> seen;
    for (const auto& c : all) {
      checkChain(c);
      const auto legs = legSet(c);
      for (const auto& ref : std::set<IntervalRef>(legs.begin(), legs.end())) CHECK(seen.insert(ref).second);
      checkSamples(sampleMotion(c, UniformSampler(6)));
      for (const auto& r : sampleRealizations(c, UniformSampler(4)))
        if (!r.type().hasZero()) CHECK(legSet(findComponent(ccs, r)) == legSet(c));
    }
    CHECK(seen.size() == ccs->intervalCount());
  }
  CHECK(checked == 25);
}
