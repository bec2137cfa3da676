#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "oog/ku.hpp"
#include "oog/registry.hpp"

using namespace oog;

namespace {

Cylinder cyl(std::vector<Literal> lits) { return Cylinder::from(std::move(lits)); }
ClopenSet w(std::vector<Literal> lits) { return ClopenSet::of(cyl(std::move(lits))); }
ClopenSet whole() { return ClopenSet::whole(); }
CantorBasic vb(std::vector<ClopenSet> parts) { return CantorBasic::make(std::move(parts)); }

template <class R>
bool has(const std::vector<R>& v, const R& r) {
  return std::find(v.begin(), v.end(), r) != v.end();
}

bool has_set(const std::vector<ClopenSet>& v, const ClopenSet& r) {
  return std::any_of(v.begin(), v.end(), [&](const ClopenSet& s) { return equivalent(s, r); });
}

}  // namespace

// --- canonical C_J ------------------------------------------------------------

TEST(CanonicalCj, Sizes) {
  EXPECT_EQ(canonical_cj({0}, 1).sets.size(), 3u);
  EXPECT_EQ(canonical_cj({0, 1}, 2).sets.size(), 9u);
  EXPECT_EQ(canonical_cj({}, 0).sets, std::vector<ClopenSet>{whole()});
  EXPECT_THROW(canonical_cj({0}, 2), ConfigError);
}

TEST(CanonicalCj, ClosedUnderNonemptyIntersection) {
  const CantorCube c;
  EXPECT_FALSE(intersection_gap(c, canonical_cj({0, 1, 2}, 3)));
  EXPECT_TRUE(intersection_gap(c, FilterElement<ClopenSet>{{w({{0, 0}}), w({{1, 0}})}, {}}));
}

TEST(CjSource, ExtendsWithSeedSupports) {
  const CantorCube c;
  CjSource src({0}, 1);
  const auto p = src.extend(c, {w({{3, 1}})});
  EXPECT_TRUE(has_set(p.sets, w({{3, 1}})));
  EXPECT_TRUE(has_set(p.sets, w({{0, 0}})));
  EXPECT_TRUE(has_set(p.sets, w({{3, 0}})));
  EXPECT_TRUE(has_set(p.sets, whole()));
}

// --- condition (3) --------------------------------------------------------------

TEST(Condition3, WitnessInCj) {
  const CantorCube c;
  const auto p = canonical_cj({0}, 1);
  const Condition3Checker<CantorCube> chk(c, p);
  const auto rep = chk.check(w({{1, 1}}));
  ASSERT_TRUE(rep.holds);
  EXPECT_TRUE(chk.verify(w({{1, 1}}), *rep.witness));
}

TEST(Condition3, CounterexampleHasBlockers) {
  const CantorCube c;
  const FilterElement<ClopenSet> p{{w({{1, 0}})}, {}};
  const auto rep = check_condition3(c, p, w({{1, 1}}));
  EXPECT_FALSE(rep.holds);
  ASSERT_EQ(rep.blockers.size(), 1u);
  EXPECT_EQ(rep.blockers[0], (std::pair<std::size_t, std::size_t>{0, 0}));
}

TEST(Condition3, WholeVUsesFirstMember) {
  const CantorCube c;
  const auto rep = check_condition3(c, canonical_cj({0, 1}, 2), whole());
  ASSERT_TRUE(rep.holds);
  EXPECT_EQ(*rep.witness, 0u);
}

TEST(Condition3, EmptyVIsRejected) {
  const CantorCube c;
  EXPECT_THROW(check_condition3(c, canonical_cj({0}, 1), ClopenSet{}), ContractViolation);
}

TEST(Condition3, MatchesBruteForce) {
  const CantorCube c;
  const CoordSet j{0, 1, 2};
  const oracle::Points pts(j);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    FilterElement<ClopenSet> p;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      auto s = oracle::random_clopen(j, rng);
      if (!s.empty()) p.sets.push_back(std::move(s));
    }
    auto v = oracle::random_clopen(j, rng);
    if (v.empty() || p.sets.empty()) continue;
    const Condition3Checker<CantorCube> chk(c, p);
    const auto rep = chk.check(v);
    EXPECT_EQ(rep.holds, oracle::condition3(pts, p.sets, v)) << trial;
    if (rep.holds) {
      EXPECT_TRUE(oracle::condition3_witness(pts, p.sets, v, *rep.witness));
    } else {
      for (const auto& [wi, ui] : rep.blockers) {
        EXPECT_EQ(pts.mask(p.sets[ui]) & ~pts.mask(p.sets[wi]), 0u);
        EXPECT_EQ(pts.mask(p.sets[ui]) & pts.mask(v), 0u);
      }
    }
  }
}

TEST(OmegaChain, Containment) {
  const CantorCube c;
  const std::vector<FilterElement<ClopenSet>> up{canonical_cj({0}, 1), canonical_cj({0, 1}, 2)};
  EXPECT_TRUE(check_omega_chain(c, up));
  const std::vector<FilterElement<ClopenSet>> down{up[1], up[0]};
  EXPECT_FALSE(check_omega_chain(c, down));
}

// --- club filter to strategy ----------------------------------------------------

TEST(BbbStrategy, FamilySizes) {
  const CantorCube c;
  BbbStrategy<CantorCube> p1(std::make_unique<CjSource>(CoordSet{0, 1}, 2));
  RandomPlayerTwo<CantorCube> p2(1);
  const auto t = run_game(p1, p2, c, 3, 5);
  EXPECT_EQ(t.a(0).sets, std::vector<ClopenSet>{whole()});
  EXPECT_EQ(t.a(1).sets.size(), 1u);
  EXPECT_LE(t.a(2).sets.size(), 4u);
  EXPECT_NO_THROW(check_transcript(c, t));
}

TEST(BbbStrategy, WinsOnDepthTwo) {
  const CantorCube c;
  const auto tf = make_test_family(c, "depth:2");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto sp = make_strategies(c, "club-p1:cj:0,1:2", "random-p2:1");
    const auto t = run_game(*sp.one, *sp.two, c, 4, seed);
    EXPECT_TRUE(adjudicate(c, t, tf, 0).pass) << seed;
  }
}

// --- strategy to club filter -----------------------------------------------------

TEST(AaaClosure, ContainsSigmaMoves) {
  const CantorCube c;
  CantorPlayerOne sigma;
  const auto p = aaa_closure(c, std::vector<ClopenSet>{w({{0, 1}})}, sigma, 1, 1, 1);
  EXPECT_TRUE(has_set(p.sets, whole()));
  EXPECT_TRUE(has_set(p.sets, w({{0, 0}})));
  EXPECT_TRUE(has_set(p.sets, w({{0, 1}})));
  EXPECT_FALSE(intersection_gap(c, p));
}

TEST(AaaClosure, EmptySeedStillHasFirstMove) {
  const CantorCube c;
  CantorPlayerOne sigma;
  const auto p = aaa_closure(c, std::vector<ClopenSet>{}, sigma, 1, 1, 1);
  EXPECT_TRUE(has_set(p.sets, whole()));
}

TEST(AaaClosure, RejectsBadParameters) {
  const CantorCube c;
  CantorPlayerOne sigma;
  EXPECT_THROW(aaa_closure(c, std::vector<ClopenSet>{}, sigma, 0, 1, 1), ConfigError);
  EXPECT_THROW(aaa_closure(c, std::vector<ClopenSet>{ClopenSet{}}, sigma, 1, 1, 1), ContractViolation);
}

TEST(AaaClosure, SatisfiesCondition3AgainstSmallRegions) {
  const CantorCube c;
  CantorPlayerOne sigma;
  const auto p = aaa_closure(c, std::vector<ClopenSet>{w({{0, 1}}), w({{1, 0}})}, sigma, 2, 1, 1);
  const Condition3Checker<CantorCube> chk(c, p);
  CoordSet j;
  for (const auto& s : p.sets) add_support(j, s);
  for (const auto& v : cylinder_regions(j, j.size())) EXPECT_TRUE(chk.check(v).holds) << c.str(v);
}

// --- products and hyperspaces ----------------------------------------------------

TEST(ProductFilter, EmbedsSelectedFactors) {
  const auto cube = CantorCube::product({std::nullopt, std::nullopt});
  const std::vector<FilterElement<ClopenSet>> f{{{whole(), w({{3, 1}})}, {}}, {{whole()}, {}}};
  const auto p = product_filter_element(cube, f, {0});
  ASSERT_EQ(p.sets.size(), 2u);
  EXPECT_TRUE(has(p.sets, whole()));
  EXPECT_TRUE(has(p.sets, cube.embed_region(0, w({{3, 1}}))));
  EXPECT_EQ(product_filter_element(cube, f, {}).sets, std::vector<ClopenSet>{whole()});
  EXPECT_THROW(product_filter_element(cube, f, {2}), ConfigError);
  EXPECT_THROW(product_filter_element(CantorCube(), f, {0}), ConfigError);
}

TEST(ProductFilter, DescriptorWithCoordinateLists) {
  const auto src = make_cantor_source("prod(cj:0:1,cj:0,1:1)");
  EXPECT_EQ(src->descriptor(), "prod(cj:0:1,cj:0,1:1)");
  EXPECT_EQ(detail::split_factors("cj:0,1:2,aaa:cantor-p1:1:1:1,prod(cj:0:0,cj:1,2:1)").size(), 3u);
  EXPECT_THROW(make_cantor_source("prod(cj:0:1,bogus)"), ConfigError);
}

TEST(HyperspaceFilter, Lifts) {
  const Hyperspace<CantorCube> h{CantorCube()};
  const auto one = hyperspace_filter_element(h, FilterElement<ClopenSet>{{whole()}, {}}, 2);
  ASSERT_EQ(one.sets.size(), 1u);
  EXPECT_EQ(one.sets[0], vb({whole()}));
  const auto c0 = hyperspace_filter_element(h, canonical_cj({0}, 1), 1);
  EXPECT_EQ(c0.sets.size(), 3u);
  EXPECT_THROW(hyperspace_filter_element(h, FilterElement<ClopenSet>{{w({{0, 0}}), w({{1, 0}})}, {}}, 1),
               ConfigError);
}

TEST(HyperspaceFilter, Condition3WithPoints) {
  const Hyperspace<CantorCube> h{CantorCube()};
  const auto pstar = hyperspace_filter_element(h, canonical_cj({0, 1}, 2), 2);
  const auto rep = check_condition3_hyperspace(h, pstar, vb({w({{2, 1}}), w({{3, 0}})}));
  ASSERT_TRUE(rep.report.holds);
  EXPECT_TRUE(rep.verified);
  EXPECT_EQ(rep.points.size(), rep.below.size());
  const FilterElement<CantorBasic> bad{{vb({w({{1, 0}})})}, {}};
  EXPECT_FALSE(check_condition3_hyperspace(h, bad, vb({w({{1, 1}})})).report.holds);
}

// --- dense open oracles ---------------------------------------------------------

TEST(GraphOracle, DiagonalRefine) {
  const GraphComplementOracle e;
  const auto box = e.refine(whole(), {whole()});
  EXPECT_EQ(box.u, w({{0, 0}}));
  EXPECT_EQ(box.vs, std::vector<ClopenSet>{w({{0, 1}})});
  EXPECT_TRUE(e.contains_box(box.u, box.vs[0]));
  EXPECT_FALSE(e.contains_box(w({{0, 0}}), w({{0, 0}})));
  EXPECT_FALSE(e.contains_box(whole(), w({{4, 1}})));
  EXPECT_EQ(e.name(), "diag");
}

TEST(GraphOracle, SwapPermutation) {
  const GraphComplementOracle e(std::map<Coord, Coord>{{0, 1}, {1, 0}});
  EXPECT_TRUE(e.contains_box(w({{0, 0}}), w({{1, 1}})));
  EXPECT_FALSE(e.contains_box(w({{0, 0}}), w({{0, 1}})));
  const auto box = e.refine(whole(), {whole()});
  EXPECT_EQ(box.u, w({{0, 0}}));
  EXPECT_EQ(box.vs[0], w({{1, 1}}));
  EXPECT_THROW(GraphComplementOracle(std::map<Coord, Coord>{{0, 1}}), ConfigError);
}

TEST(GraphOracle, RefineLandsInEForRandomBoxes) {
  const GraphComplementOracle e(std::map<Coord, Coord>{{0, 2}, {2, 0}});
  std::mt19937_64 rng(3);
  const CoordSet j{0, 1, 2, 3};
  for (int i = 0; i < 300; ++i) {
    const auto u = ClopenSet::of(oracle::random_cylinder(j, rng));
    std::vector<ClopenSet> vs{ClopenSet::of(oracle::random_cylinder(j, rng)),
                              ClopenSet::of(oracle::random_cylinder(j, rng))};
    const auto box = e.refine(u, vs);
    EXPECT_TRUE(subset(box.u, u));
    for (std::size_t k = 0; k < vs.size(); ++k) {
      EXPECT_TRUE(subset(box.vs[k], vs[k]));
      EXPECT_TRUE(e.contains_box(box.u, box.vs[k]));
    }
  }
}

TEST(HyperspaceOracle, ForcesFreshCoordinateInEveryPart) {
  const HyperspaceOffDiagonalOracle e;
  const auto box = e.refine(w({{0, 1}}), {vb({w({{1, 0}}), w({{1, 1}})})});
  EXPECT_EQ(box.u, w({{0, 1}, {2, 0}}));
  EXPECT_EQ(box.vs[0], vb({w({{1, 0}, {2, 1}}), w({{1, 1}, {2, 1}})}));
  EXPECT_TRUE(e.contains_box(box.u, box.vs[0]));
  EXPECT_FALSE(e.contains_box(whole(), vb({w({{1, 0}})})));
}

namespace {

class OutsideBox : public ClosedSetHandle<CantorCube> {
 public:
  std::string name() const override { return "faulty"; }
  Box<CantorCube> avoid(const ClopenSet&, const std::vector<ClopenSet>& vs) const override {
    return {w({{9, 1}}), vs};
  }
  std::optional<bool> meets_box(const ClopenSet&, const ClopenSet&) const override { return std::nullopt; }
};

}  // namespace

TEST(NowhereDense, EmptySetIsIdentity) {
  const NowhereDenseAdapter<CantorCube> e(std::make_shared<EmptyClosedSet<CantorCube>>(), CantorCube());
  const auto box = e.refine(w({{0, 1}}), {w({{1, 1}})});
  EXPECT_EQ(box.u, w({{0, 1}}));
  EXPECT_EQ(box.vs, std::vector<ClopenSet>{w({{1, 1}})});
  EXPECT_TRUE(e.contains_box(whole(), whole()));
  EXPECT_EQ(e.name(), "nd:empty");
}

TEST(NowhereDense, FaultyCallbackIsContractViolation) {
  const NowhereDenseAdapter<CantorCube> e(std::make_shared<OutsideBox>(), CantorCube());
  EXPECT_THROW(e.refine(w({{9, 0}}), {whole()}), ContractViolation);
  EXPECT_THROW(e.contains_box(whole(), whole()), ContractViolation);
}

TEST(NowhereDense, DiagonalAvoids) {
  const NowhereDenseAdapter<CantorCube> e(std::make_shared<DiagonalSet>(), CantorCube());
  const auto box = e.refine(whole(), {whole()});
  EXPECT_TRUE(e.contains_box(box.u, box.vs[0]));
}

// --- refinement tree ------------------------------------------------------------

TEST(KuTree, SingleBranch) {
  const CantorCube x, y;
  const GraphComplementOracle e;
  CantorPlayerOne p1;
  const auto r = run_ku_construction(x, y, e, p1, 1, 1, 0);
  EXPECT_EQ(r.branches.size(), 1u);
  EXPECT_TRUE(audit_ku(y, e, r).ok());
  const TestFamily<ClopenSet> tf{{whole()}, "whole"};
  const auto rep = verify_sections(y, r, e, 3, tf, 0);
  EXPECT_EQ(rep.failed, 0u);
  EXPECT_EQ(rep.passed, 3u);
}

TEST(KuTree, TwoRoundsAuditAndSections) {
  const CantorCube x, y;
  const GraphComplementOracle e;
  CantorPlayerOne p1;
  const auto r = run_ku_construction(x, y, e, p1, 2, 2, 1);
  EXPECT_EQ(r.branches.size(), 4u);
  EXPECT_FALSE(r.p_report.empty());
  const auto a = audit_ku(y, e, r);
  EXPECT_TRUE(a.ok());
  EXPECT_GT(a.box_checks, 0u);
  const auto rep = verify_sections(y, r, e, 2, make_test_family(y, "depth:2"), 1);
  EXPECT_EQ(rep.failed, 0u);
  EXPECT_EQ(rep.passed, 4u * 2u * 9u);
}

TEST(KuTree, SameSeedSameTree) {
  const CantorCube x, y;
  const GraphComplementOracle e;
  CantorPlayerOne p1a, p1b;
  const auto a = run_ku_construction(x, y, e, p1a, 2, 2, 7);
  const auto b = run_ku_construction(x, y, e, p1b, 2, 2, 7);
  EXPECT_EQ(ku_to_json(y, a), ku_to_json(y, b));
}

TEST(KuTree, HoleIsDetected) {
  const CantorCube x, y;
  auto base = std::make_shared<GraphComplementOracle>();
  CantorPlayerOne p1;
  const auto r = run_ku_construction(x, y, *base, p1, 2, 2, 0);
  const BoxRemovedOracle<CantorCube> holed(base, y, w({{0, 0}}), w({{0, 0}}));
  const auto rep = verify_sections(y, r, holed, 3, make_test_family(y, "depth:2"), 0);
  EXPECT_GT(rep.failed, 0u);
  for (const auto& c : rep.checks)
    if (!c.pass) {
      EXPECT_TRUE(c.x.fixes(0));
    }
}

TEST(KuTree, RejectsBadArguments) {
  const CantorCube x, y;
  const GraphComplementOracle e;
  CantorPlayerOne p1;
  EXPECT_THROW(run_ku_construction(x, y, e, p1, 0, 1, 0), ConfigError);
  EXPECT_THROW(run_ku_construction(x, y, e, p1, 1, 0, 0), ConfigError);
  EXPECT_THROW(run_ku_construction(CantorCube(5), y, e, p1, 1, 1, 0), ConfigError);
}

TEST(KuTree, HyperspaceSections) {
  const CantorCube x;
  const Hyperspace<CantorCube> y{CantorCube()};
  const HyperspaceOffDiagonalOracle e;
  auto p1 = make_strategy(y, "club-p1:exp(cj:0:1):1", Player::one);
  const auto r = run_ku_construction(x, y, e, *p1, 2, 2, 0);
  EXPECT_TRUE(audit_ku(y, e, r).ok());
  const auto rep = verify_sections(y, r, e, 2, make_test_family(y, "depth:1"), 0);
  EXPECT_EQ(rep.failed, 0u);
  EXPECT_GT(rep.passed, 0u);
}
