#include <cmath>
#include <functional>
#include <random>

#include "cayrs/cayley_space.hpp"
#include "cayrs/errors.hpp"
#include "cayrs/realization.hpp"
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

void checkBars(const Realization& r) {
  const auto& g = r.linkage()->graph();
  double largest = 0.0;
  for (const auto& b : g.bars()) largest = std::max(largest, b.length);
  for (const auto& b : g.bars()) {
    const double got = distance(r.points()[b.u], r.points()[b.v]);
    CHECK(std::abs(got - b.length) <= 1e-9 * largest);
  }
  const auto base = r.linkage()->baseNonedge();
  CHECK(r.points()[base.first].x == 0.0);
  CHECK(r.points()[base.first].y == 0.0);
  CHECK(r.points()[base.second].y == 0.0);
  CHECK(std::abs(r.length(base) - r.baseLength()) <= 1e-12 * r.baseLength());
}

Realization mirrorOf(const Realization& r) {
  std::vector<Vec2> points = r.points();
  for (auto& p : points) p.y = -p.y;
  return Realization(r.linkage(), r.baseLength(), r.type(), points);
}

}  // namespace

TEST_CASE("realization types are canonical") {
  CHECK(RealizationType::parse("-+").str() == "+-");
  CHECK(RealizationType::parse("0-+").str() == "0+-");
  CHECK(RealizationType::parse("--").str() == "++");
  CHECK(RealizationType::parse("").size() == 0);
  CHECK(RealizationType::parse("+-").flipped(0).str() == "++");
  CHECK(RealizationType::parse("+-").collinearAt(0).str() == "0+");
  CHECK(RealizationType::parse("0+").hasZero());
  CHECK_FALSE(RealizationType::parse("+-").hasZero());
  CHECK(errorName([] { RealizationType::parse("+x"); }) == "InvalidArgument");
  CHECK(errorName([] { RealizationType(std::vector<std::int8_t>{2}); }) == "InvalidArgument");

  std::vector<std::int8_t> signs{-1, 1, 0};
  CHECK(RealizationType::canonicalize(signs));
  CHECK(signs == std::vector<std::int8_t>{1, -1, 0});
  CHECK_FALSE(RealizationType::canonicalize(signs));

  const auto three = canonicalTypes(3);
  REQUIRE(three.size() == 4);
  CHECK(three[0].str() == "+++");
  CHECK(three[1].str() == "++-");
  CHECK(three[2].str() == "+-+");
  CHECK(three[3].str() == "+--");
  for (const auto& t : canonicalTypes(5)) CHECK(t[0] == 1);
  CHECK(canonicalTypes(5).size() == 16);
}

TEST_CASE("two-bar realization is the 3-4-5 triangle") {
  auto linkage = loadFixture("twobar.json");
  const Realization r = realize(linkage, 5.0, RealizationType::parse("+"));
  CHECK(r.point("c").x == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(r.point("c").y == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(std::abs(r.point("c").x - 1.8) <= 1e-9);
  CHECK(std::abs(r.point("c").y - 2.4) <= 1e-9);
  checkBars(r);
  CHECK(completeCayleyDistanceVector(r) == CayleyDistanceVector{5.0});

  try {
    realize(linkage, 8.0, RealizationType::parse("+"));
    FAIL("expected Unrealizable");
  } catch (const Unrealizable& e) {
    CHECK(e.step() == 0);
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
  CHECK(errorName([&] { realize(linkage, 0.5, RealizationType::parse("+")); }) == "Unrealizable");
  CHECK(errorName([&] { realize(linkage, 0.0, RealizationType::parse("+")); }) == "InvalidArgument");
  CHECK(errorName([&] { realize(linkage, -1.0, RealizationType::parse("+")); }) == "InvalidArgument");
  CHECK(errorName([&] { realize(linkage, std::nan(""), RealizationType::parse("+")); }) == "InvalidArgument");
  CHECK(errorName([&] { realize(linkage, 5.0, RealizationType::parse("++")); }) == "InvalidArgument");
}

TEST_CASE("four-bar fixture realization at base length 5") {
  auto linkage = loadFixture("fourbar.json");
  const Realization pp = realize(linkage, 5.0, RealizationType::parse("++"));
  const Realization pm = realize(linkage, 5.0, RealizationType::parse("+-"));

  CHECK(std::abs(pp.point("b").x - (-0.7)) <= 1e-9);
  CHECK(std::abs(pp.point("b").y - std::sqrt(3.51)) <= 1e-9);
  CHECK(std::abs(pp.point("b").y - 1.87350) <= 1e-5);
  CHECK(std::abs(pp.point("d").x - 1.375) <= 1e-9);
  CHECK(std::abs(pp.point("d").y - std::sqrt(7.109375)) <= 1e-9);
  CHECK(std::abs(pp.point("d").y - 2.66634) <= 1e-5);
  CHECK(std::abs(pm.point("d").y + std::sqrt(7.109375)) <= 1e-9);

  SUBCASE("angle sweep agrees") {
    for (const auto* r : {&pp, &pm}) {
      std::vector<int> signs(r->type().signs().begin(), r->type().signs().end());
      auto sweep = oracle::angleSweepRealize(*linkage, 5.0, signs);
      REQUIRE(sweep.has_value());
      for (std::size_t v = 0; v < sweep->size(); ++v) {
        CHECK(std::abs((*sweep)[v].x - r->points()[v].x) <= 1e-9);
        CHECK(std::abs((*sweep)[v].y - r->points()[v].y) <= 1e-9);
      }
    }
  }

  SUBCASE("orientation") {
    CHECK(stepOrientation(pp, 0) == 1);
    CHECK(stepOrientation(pp, 1) == 1);
    CHECK(stepOrientation(pm, 1) == -1);
    CHECK(orientationOf(pm.point("d"), pm.point("a"), pm.point("c")) == -1);
  }

  SUBCASE("Cayley vectors and distance") {
    const auto vpp = completeCayleyDistanceVector(pp);
    const auto vpm = completeCayleyDistanceVector(pm);
    REQUIRE(vpp.size() == 2);
    REQUIRE(vpm.size() == 2);
    CHECK(vpp[0] == 5.0);
    CHECK(vpm[0] == 5.0);
    const double bdUp = std::hypot(1.375 + 0.7, std::sqrt(7.109375) - std::sqrt(3.51));
    const double bdDown = std::hypot(1.375 + 0.7, std::sqrt(7.109375) + std::sqrt(3.51));
    CHECK(std::abs(vpp[1] - bdUp) <= 1e-9);
    CHECK(std::abs(vpm[1] - bdDown) <= 1e-9);
    CHECK(std::abs(vpp[1] - 2.22131) <= 1e-5);
    CHECK(std::abs(vpm[1] - 4.99157) <= 1e-5);
    CHECK(std::abs(cayleyDistance(pp, pm) - (bdDown - bdUp)) <= 1e-9);
    CHECK(std::abs(cayleyDistance(pp, pm) - 2.77026) <= 1e-5);
    CHECK(cayleyDistance(pp, pp) == 0.0);
  }

  SUBCASE("mirror images share the Cayley vector") {
    CHECK(realize(linkage, 5.0, RealizationType(std::vector<std::int8_t>{-1, 1})).type().str() == "+-");
    CHECK(cayleyDistance(pp, mirrorOf(pp)) == 0.0);
    CHECK(cayleyDistance(pm, mirrorOf(pm)) == 0.0);
  }

  SUBCASE("sign zero") {
    // b is collinear with a, c at base length 4 (2 + 4 = 6).
    const Realization z = realize(linkage, 4.0, RealizationType::parse("0+"));
    CHECK(std::abs(z.point("b").y) <= 1e-9);
    CHECK(stepOrientation(z, 0) == 0);
    CHECK(errorName([&] { realize(linkage, 5.0, RealizationType::parse("0+")); }) == "AmbiguousZeroSign");
    CHECK(realizableAt(*linkage, 4.0, RealizationType::parse("0+")));
  }

  SUBCASE("out of range") {
    CHECK(errorName([&] { realize(linkage, 9.0, RealizationType::parse("++")); }) == "Unrealizable");
    try {
      realize(linkage, 3.0, RealizationType::parse("++"));
      FAIL("expected Unrealizable");
    } catch (const Unrealizable& e) {
      CHECK(e.step() == 0);
    }
    CHECK_FALSE(realizableAt(*linkage, 9.0, RealizationType::parse("++")));
    CHECK(realizableAt(*linkage, 5.0, RealizationType::parse("+-")));
  }

  SUBCASE("mismatched linkages") {
    const Realization other = realize(loadFixture("twobar.json"), 5.0, RealizationType::parse("+"));
    CHECK(errorName([&] { cayleyDistance(pp, other); }) == "MismatchedLinkage");
  }
}

TEST_CASE("orientation predicate") {
  CHECK(orientationOf({0, 1}, {0, 0}, {1, 0}) == 1);
  CHECK(orientationOf({0, -1}, {0, 0}, {1, 0}) == -1);
  CHECK(orientationOf({2, 0}, {0, 0}, {1, 0}) == 0);
  CHECK(orientationOf({2, 1e-12}, {0, 0}, {1, 0}) == 0);
}

TEST_CASE("cluster passengers follow their anchors") {
  // The four-bar fixture with bar a-b replaced by a rigid triangle a, b, m.
  auto linkage = loadFixture("cluster.json");
  CHECK(linkage->graph().vertexCount() == 4);
  const Realization r = realize(linkage, 5.0, RealizationType::parse("++"));
  const auto all = restoreDecorations(r);
  REQUIRE(all.size() == 5);
  const Vec2 a = all.at("a");
  const Vec2 b = all.at("b");
  const Vec2 m = all.at("m");
  CHECK(std::abs(b.x + 0.7) <= 1e-9);
  CHECK(std::abs(b.y - std::sqrt(3.51)) <= 1e-9);
  CHECK(std::abs(distance(a, m) - std::sqrt(1.64)) <= 1e-9);
  CHECK(std::abs(distance(b, m) - std::sqrt(1.64)) <= 1e-9);
  CHECK(orientationOf(m, a, b) == 1);
  const auto mirrored = restoreDecorations(realize(linkage, 5.0, RealizationType::parse("+-")));
  CHECK(std::abs(mirrored.at("m").x - m.x) <= 1e-12);
  CHECK(std::abs(mirrored.at("m").y - m.y) <= 1e-12);

  const std::array<Vec2, 2> local{Vec2{0, 0}, Vec2{4, 0}};
  const Vec2 same = placeRigid(local, local, {2, 1});
  CHECK(std::abs(same.x - 2.0) <= 1e-12);
  CHECK(std::abs(same.y - 1.0) <= 1e-12);
  const Vec2 turned = placeRigid(local, {Vec2{0, 0}, Vec2{0, 4}}, {2, 1});
  CHECK(std::abs(turned.x + 1.0) <= 1e-12);
  CHECK(std::abs(turned.y - 2.0) <= 1e-12);

  const Realization plain = realize(loadFixture("fourbar.json"), 5.0, RealizationType::parse("++"));
  const auto restored = restoreDecorations(plain);
  CHECK(restored.size() == 4);
  CHECK(restored.at("b").x == plain.point("b").x);
  CHECK(restored.at("d").y == plain.point("d").y);
}

TEST_CASE("random realizations: bars, orientation, distance axioms") {
  std::mt19937 rng(20261016);
  std::size_t realized = 0;
  std::size_t linkages = 0;
  for (int trial = 0; trial < 400 && linkages < 40; ++trial) {
    auto linkage = TDLinkage::create(oracle::randomLinkage(rng, 2 + trial % 3));
    if (!isLow(*linkage)) continue;
    ++linkages;
    auto ccs = computeCCS(linkage);
    std::vector<Realization> pool;
    for (const auto& ref : ccs->intervals()) {
      const auto& iv = ccs->at(ref);
      if (iv.isolated()) continue;
      for (double t : {0.1, 0.5, 0.9}) {
        const double length = iv.lower + t * (iv.upper - iv.lower);
        const Realization r = realize(linkage, length, iv.type);
        checkBars(r);
        const auto solve = forwardSolve(*linkage, length, iv.type.signs());
        for (std::size_t k = 0; k < linkage->stepCount(); ++k)
          if (solve.steps[k].discriminant > linkage->tolerances().geometric)
            CHECK(stepOrientation(r, k) == iv.type[k]);
        const auto vec = completeCayleyDistanceVector(r);
        CHECK(vec.size() == linkage->completeCayleyVector().size());
        CHECK(vec[0] == length);
        CHECK(cayleyDistance(r, mirrorOf(r)) <= 1e-12 * linkage->scale());
        pool.push_back(r);
        ++realized;
      }
    }
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = 0; j < pool.size(); ++j) {
        const double dij = cayleyDistance(pool[i], pool[j]);
        CHECK(dij == cayleyDistance(pool[j], pool[i]));
        for (std::size_t k = 0; k < pool.size(); k += 3)
          CHECK(dij <= cayleyDistance(pool[i], pool[k]) + cayleyDistance(pool[k], pool[j]) + 1e-12);
      }
  }
  CHECK(realized > 100);
}
