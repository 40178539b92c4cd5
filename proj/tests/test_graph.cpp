#include "doctest.h"

#include "test_support.hpp"

using namespace sbg;
using tsup::affineOn;
using tsup::iv;
using tsup::iv2;

namespace {

// Source / ground / N-stage ladder: R chained through C to ground.
SBGraph ladder(Coord n) {
  SBGraph g;
  g.dim = 1;
  Coord B = 1;
  while (B < n) B *= 10;
  if (B < 10) B = 10;
  std::size_t sp = g.addVertex("S.p", iv(1, 1, 1));
  std::size_t sn = g.addVertex("S.n", iv(2, 1, 2));
  std::size_t gp = g.addVertex("G.p", iv(3, 1, 3));
  std::size_t rp = g.addVertex("R.p", iv(B + 1, 1, B + n));
  std::size_t rn = g.addVertex("R.n", iv(2 * B + 1, 1, 2 * B + n));
  std::size_t cp = g.addVertex("C.p", iv(3 * B + 1, 1, 3 * B + n));
  std::size_t cn = g.addVertex("C.n", iv(4 * B + 1, 1, 4 * B + n));
  g.addEdge({"E1", sp, rp, affineOn(iv(1, 1, 1), 0, 1),
             affineOn(iv(1, 1, 1), 0, B + 1)});
  g.addEdge({"E2", sn, gp, affineOn(iv(1, 1, 1), 0, 2),
             affineOn(iv(1, 1, 1), 0, 3)});
  g.addEdge({"E3", rn, rp, affineOn(iv(1, 1, n - 1), 1, 2 * B),
             affineOn(iv(1, 1, n - 1), 1, B + 1)});
  g.addEdge({"E4", cp, rn, affineOn(iv(1, 1, n), 1, 3 * B),
             affineOn(iv(1, 1, n), 1, 2 * B)});
  g.addEdge({"E5", cn, gp, affineOn(iv(1, 1, n), 1, 4 * B),
             affineOn(iv(1, 1, n), 0, 3)});
  return g;
}

// Ladder variant whose capacitor grounds chain through each other.
SBGraph chainedGrounds(Coord n, Coord B) {
  SBGraph g;
  g.dim = 1;
  std::size_t sp = g.addVertex("S.p", iv(1, 1, 1));
  std::size_t sn = g.addVertex("S.n", iv(2, 1, 2));
  std::size_t gp = g.addVertex("G.p", iv(3, 1, 3));
  std::size_t rp = g.addVertex("R.p", iv(B + 1, 1, B + n));
  std::size_t rn = g.addVertex("R.n", iv(2 * B + 1, 1, 2 * B + n));
  std::size_t cp = g.addVertex("C.p", iv(3 * B + 1, 1, 3 * B + n));
  std::size_t cn = g.addVertex("C.n", iv(4 * B + 1, 1, 4 * B + n));
  g.addEdge({"E1", sp, rp, affineOn(iv(1, 1, 1), 0, 1),
             affineOn(iv(1, 1, 1), 0, B + 1)});
  g.addEdge({"E2", sn, gp, affineOn(iv(1, 1, 1), 0, 2),
             affineOn(iv(1, 1, 1), 0, 3)});
  g.addEdge({"E3", cn, gp, affineOn(iv(1, 1, 1), 0, 4 * B + 1),
             affineOn(iv(1, 1, 1), 0, 3)});
  g.addEdge({"E4", rn, rp, affineOn(iv(1, 1, n - 1), 1, 2 * B),
             affineOn(iv(1, 1, n - 1), 1, B + 1)});
  g.addEdge({"E5", cn, cn, affineOn(iv(1, 1, n - 1), 1, 4 * B + 1),
             affineOn(iv(1, 1, n - 1), 1, 4 * B)});
  g.addEdge({"E6", cp, rn, affineOn(iv(1, 1, n), 1, 3 * B),
             affineOn(iv(1, 1, n), 1, 2 * B)});
  return g;
}

} // namespace

TEST_CASE("validation catches each restriction violation") {
  SBGraph ok = ladder(5);
  CHECK(validate(ok).ok());

  SUBCASE("overlapping vertex sets") {
    SBGraph g;
    g.addVertex("a", iv(1, 1, 10));
    g.addVertex("b", iv(10, 1, 20));
    CHECK(!validate(g).ok());
  }
  SUBCASE("mismatched side domains") {
    SBGraph g;
    std::size_t a = g.addVertex("a", iv(1, 1, 10));
    std::size_t b = g.addVertex("b", iv(11, 1, 20));
    g.addEdge({"E1", a, b, affineOn(iv(1, 1, 5), 1, 0),
               affineOn(iv(1, 1, 4), 1, 10)});
    CHECK(!validate(g).ok());
  }
  SUBCASE("image escapes the vertex set") {
    SBGraph g;
    std::size_t a = g.addVertex("a", iv(1, 1, 10));
    std::size_t b = g.addVertex("b", iv(11, 1, 20));
    g.addEdge({"E1", a, b, affineOn(iv(1, 1, 5), 1, 0),
               affineOn(iv(1, 1, 5), 1, 16)});
    CHECK(!validate(g).ok());
  }
  SUBCASE("unequal nonzero gains") {
    SBGraph g;
    std::size_t a = g.addVertex("a", iv(1, 1, 10));
    std::size_t b = g.addVertex("b", iv(11, 1, 30));
    g.addEdge({"E1", a, b, affineOn(iv(1, 1, 10), 1, 0),
               affineOn(iv(1, 1, 10), 2, 9)});
    ValidationReport rep = validate(g);
    CHECK(!rep.ok());
    CHECK(rep.str().find("scale") != std::string::npos);
  }
  SUBCASE("self-loop") {
    SBGraph g;
    std::size_t a = g.addVertex("a", iv(1, 1, 10));
    g.addEdge({"E1", a, a, affineOn(iv(1, 1, 5), 1, 0),
               affineOn(iv(1, 1, 5), 1, 0)});
    CHECK(!validate(g).ok());
  }
  SUBCASE("duplicate vertex pair") {
    SBGraph g;
    std::size_t a = g.addVertex("a", iv(1, 1, 10));
    std::size_t b = g.addVertex("b", iv(11, 1, 20));
    g.addEdge({"E1", a, b, affineOn(iv(1, 1, 5), 1, 0),
               affineOn(iv(1, 1, 5), 1, 10)});
    g.addEdge({"E2", b, a, affineOn(iv(1, 1, 5), 1, 10),
               affineOn(iv(1, 1, 5), 1, 0)});
    CHECK(!validate(g).ok());
  }
}

TEST_CASE("edge maps live in one shared index space") {
  SBGraph g = ladder(4);
  EdgeMaps em = edgeMaps(g);
  CHECK(setEquals(em.emap1.wholeDomain(), em.emap2.wholeDomain()));
  // no two edges share indices and every edge keeps its cardinality
  unsigned long long total = 0;
  for (const auto& e : g.edges) total += e.map1.wholeDomain().cardinality();
  CHECK(em.emap1.wholeDomain().cardinality() == total);
}

TEST_CASE("ladder components collapse in one productive pass") {
  SBGraph g = ladder(1000);
  REQUIRE(validate(g).ok());
  ConnectResult r = connectComp(g);

  std::vector<PWLMap::Piece> gold;
  auto idp = [&](Coord a, Coord b) {
    gold.push_back({iv(a, 1, b), AffineFn::identity(1)});
  };
  auto cst = [&](Coord a, Coord b, Coord c) {
    gold.push_back({iv(a, 1, b), AffineFn{{Rat(0)}, {Rat(c)}}});
  };
  auto aff = [&](Coord a, Coord b, Coord off) {
    gold.push_back({iv(a, 1, b), AffineFn{{Rat(1)}, {Rat(off)}}});
  };
  idp(1002, 2000);
  aff(4000, 4000, -1000);
  aff(3001, 3999, -1999);
  cst(3, 3, 2);
  cst(1001, 1001, 1);
  cst(4001, 5000, 2);
  idp(3000, 3000);
  aff(2001, 2999, -999);
  idp(2, 2);
  idp(1, 1);
  CHECK(r.rmap.semanticallyEqual(PWLMap::fromPieces(1, gold)));
  CHECK(r.stats.iterations == 1);
  CHECK(r.stats.passes == 2);
  CHECK(r.stats.finalPieces == r.rmap.pieces().size());

  CHECK(r.rmap.apply({2500}) == Point{1501});
  CHECK(r.rmap.apply({4500}) == Point{2});
  CHECK(r.rmap.apply({4000}) == Point{3000});
  CHECK(r.rmap.apply({1001}) == Point{1});
}

TEST_CASE("chained grounds still collapse in one productive pass") {
  SBGraph g = chainedGrounds(1000, 1000);
  REQUIRE(validate(g).ok());
  ConnectResult r = connectComp(g);

  std::vector<PWLMap::Piece> gold;
  auto idp = [&](Coord a, Coord b) {
    gold.push_back({iv(a, 1, b), AffineFn::identity(1)});
  };
  auto cst = [&](Coord a, Coord b, Coord c) {
    gold.push_back({iv(a, 1, b), AffineFn{{Rat(0)}, {Rat(c)}}});
  };
  auto aff = [&](Coord a, Coord b, Coord off) {
    gold.push_back({iv(a, 1, b), AffineFn{{Rat(1)}, {Rat(off)}}});
  };
  cst(5000, 5000, 2);
  idp(1002, 2000);
  aff(4000, 4000, -1000);
  aff(3001, 3999, -1999);
  cst(3, 3, 2);
  cst(1001, 1001, 1);
  cst(4001, 4001, 2);
  idp(3000, 3000);
  aff(2001, 2999, -999);
  idp(2, 2);
  idp(1, 1);
  cst(4002, 4999, 2);
  CHECK(r.rmap.semanticallyEqual(PWLMap::fromPieces(1, gold)));
  CHECK(r.stats.iterations == 1);

  OracleCheck oc = checkAgainstOracle(chainedGrounds(4, 10),
                                      connectComp(chainedGrounds(4, 10)).rmap);
  CHECK(oc.ok());
}

TEST_CASE("degenerate graphs") {
  SUBCASE("no vertices") {
    SBGraph g;
    ConnectResult r = connectComp(g);
    CHECK(r.rmap.empty());
    CHECK(r.stats.iterations == 0);
  }
  SUBCASE("vertices without edges map to themselves") {
    SBGraph g;
    g.addVertex("a", iv(5, 2, 11));
    g.addVertex("b", iv(20, 1, 29));
    ConnectResult r = connectComp(g);
    CHECK(r.rmap.semanticallyEqual(
        PWLMap::identityOn(setUnion(iv(5, 2, 11), iv(20, 1, 29)))));
  }
  SUBCASE("two-vertex bridge") {
    SBGraph g;
    std::size_t a = g.addVertex("a", iv(1, 1, 10));
    std::size_t b = g.addVertex("b", iv(11, 1, 20));
    g.addEdge({"E1", a, b, affineOn(iv(1, 1, 10), 1, 0),
               affineOn(iv(1, 1, 10), 1, 10)});
    REQUIRE(validate(g).ok());
    ConnectResult r = connectComp(g);
    // every b element folds onto its a partner
    for (Coord v = 11; v <= 20; ++v)
      CHECK(r.rmap.apply({v}) == Point{v - 10});
  }
}

TEST_CASE("representative map properties hold on random graphs") {
  tsup::Rng rng(606);
  for (int trial = 0; trial < 60; ++trial) {
    SBGraph g = tsup::randGraph(rng, trial % 3 == 2 ? 2 : 1);
    REQUIRE(validate(g).ok());
    ConnectResult r = connectComp(g);

    IntervalSet all(g.dim);
    for (const auto& v : g.vertices) all = setUnion(all, v.set);
    CHECK(setEquals(r.rmap.wholeDomain(), all));

    // rmap(v) <= v and rmap is already closed under composition
    for (const auto& p : tsup::enumerate(all)) {
      Point q = r.rmap.apply(p);
      CHECK(q <= p);
      CHECK(r.rmap.apply(q) == q);
    }
    CHECK(compose(r.rmap, r.rmap).semanticallyEqual(r.rmap));
  }
}
