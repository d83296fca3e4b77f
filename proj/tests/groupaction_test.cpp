#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "growthlab/groupaction.hpp"
#include "oracles/oracles.hpp"

using namespace growthlab;

namespace {

std::vector<Code> iota_codes(Code lo, Code hi) {
  std::vector<Code> out;
  for (Code c = lo; c <= hi; ++c) out.push_back(c);
  return out;
}

ActionSubset all_points(const GroupAction& act) { return ActionSubset::point_side(iota_codes(0, act.point_count() - 1)); }
ActionSubset all_elements(const GroupAction& act) {
  return ActionSubset::group_side(iota_codes(0, act.group_order() - 1));
}

ActionSubset cyclic_interval(std::uint64_t n, std::int64_t lo, std::int64_t hi, Role role = Role::group) {
  std::vector<Code> out;
  for (std::int64_t v = lo; v <= hi; ++v) out.push_back(static_cast<Code>(((v % static_cast<std::int64_t>(n)) + n) % n));
  return role == Role::group ? ActionSubset::group_side(out) : ActionSubset::point_side(out);
}

void check_axioms(const GroupAction& act) {
  const Code e = act.identity();
  const auto n = act.group_order();
  for (Code g = 0; g < n; ++g) {
    ASSERT_EQ(act.mul(g, e), g);
    ASSERT_EQ(act.mul(e, g), g);
    ASSERT_EQ(act.mul(g, act.inv(g)), e);
    for (Code x = 0; x < act.point_count(); ++x) ASSERT_LT(act.act(g, x), act.point_count());
  }
  for (Code x = 0; x < act.point_count(); ++x) ASSERT_EQ(act.act(e, x), x);
  for (Code g = 0; g < n; ++g) {
    for (Code h = 0; h < n; ++h) {
      const Code gh = act.mul(g, h);
      for (Code x = 0; x < act.point_count(); ++x) ASSERT_EQ(act.act(gh, x), act.act(g, act.act(h, x)));
    }
  }
}

void check_associativity_sampled(const GroupAction& act, int samples) {
  std::mt19937_64 rng(3);
  const auto n = act.group_order();
  for (int i = 0; i < samples; ++i) {
    const Code a = rng() % n, b = rng() % n, c = rng() % n;
    ASSERT_EQ(act.mul(act.mul(a, b), c), act.mul(a, act.mul(b, c)));
  }
}

bool faithful(const GroupAction& act) {
  for (Code g = 0; g < act.group_order(); ++g) {
    if (g == act.identity()) continue;
    bool moves = false;
    for (Code x = 0; x < act.point_count() && !moves; ++x) moves = act.act(g, x) != x;
    if (!moves) return false;
  }
  return true;
}

}  // namespace

TEST(MakeAction, Orders) {
  EXPECT_EQ(make_action(ActionKind::cyclic, 10)->group_order(), 10u);
  EXPECT_EQ(make_action(ActionKind::cyclic, 10)->point_count(), 10u);
  EXPECT_EQ(make_action(ActionKind::agl1, 5)->group_order(), 20u);
  EXPECT_EQ(make_action(ActionKind::agl1, 5)->point_count(), 5u);
  EXPECT_EQ(make_action(ActionKind::psl2, 5)->group_order(), 60u);
  EXPECT_EQ(make_action(ActionKind::psl2, 5)->point_count(), 6u);
  for (std::uint64_t p : {3u, 7u, 11u, 13u}) EXPECT_EQ(make_action(ActionKind::psl2, p)->group_order(), p * (p * p - 1) / 2);
  EXPECT_THROW(make_action(ActionKind::agl1, 6), PreconditionError);
  EXPECT_THROW(make_action(ActionKind::psl2, 9), PreconditionError);
  EXPECT_THROW(make_action(ActionKind::psl2, 2), PreconditionError);
}

TEST(MakeAction, AxiomsExhaustive) {
  for (std::uint64_t n = 1; n <= 50; ++n) check_axioms(CyclicAdd(n));
  for (std::uint64_t p : {2u, 3u, 5u, 7u, 11u}) {
    const Agl1 act(p);
    check_axioms(act);
    check_associativity_sampled(act, 2000);
    EXPECT_TRUE(faithful(act));
  }
  for (std::uint64_t p : {3u, 5u, 7u}) {
    const Psl2 act(p);
    check_axioms(act);
    check_associativity_sampled(act, 5000);
    EXPECT_TRUE(faithful(act));
  }
}

TEST(MakeAction, TextForms) {
  const Agl1 agl(7);
  const Code g = agl.parse_element("3,5");
  EXPECT_EQ(agl.element_str(g), "3,5");
  EXPECT_EQ(agl.act(g, 2), 4u);  // 3*2 + 5 = 11 = 4 mod 7
  const Psl2 psl(5);
  const Code m = psl.parse_element("4 0 0 4");  // -identity normalizes to the identity
  EXPECT_EQ(m, psl.identity());
  EXPECT_EQ(psl.element_str(psl.parse_element("0 4 1 0")), "0 1 4 0");
  EXPECT_THROW(psl.parse_element("1 1 1 1"), PreconditionError);
  EXPECT_EQ(psl.parse_point("inf"), 5u);
  EXPECT_EQ(psl.point_str(5), "inf");
  // z -> 1/z swaps 0 and infinity.
  const Code inv = psl.parse_element("0 1 4 0");
  EXPECT_EQ(psl.act(inv, 0), 5u);
  EXPECT_EQ(psl.act(inv, 5), 0u);
  const CyclicAdd cyc(10);
  EXPECT_EQ(cyc.parse_element("-1"), 9u);
}

TEST(PermAction, ParsesAndValidates) {
  std::istringstream s3("points 3 groupsize 6\n0 1 2\n1 0 2\n0 2 1\n2 1 0\n1 2 0\n2 0 1\n");
  const auto act = load_perm_action(s3);
  EXPECT_EQ(act->group_order(), 6u);
  check_axioms(*act);
  std::istringstream not_closed("points 3 groupsize 2\n0 1 2\n1 2 0\n");
  EXPECT_THROW(load_perm_action(not_closed), PreconditionError);
  std::istringstream not_bijective("points 3 groupsize 2\n0 1 2\n0 0 2\n");
  EXPECT_THROW(load_perm_action(not_bijective), PreconditionError);
  std::istringstream bad_header("pts 3 groupsize 1\n0 1 2\n");
  EXPECT_THROW(load_perm_action(bad_header), ParseError);
}

TEST(ActIncidence, Examples) {
  const CyclicAdd c10(10);
  EXPECT_EQ(act_incidence(c10, ActionSubset::group_side({0}), all_points(c10), all_points(c10)), 10u);
  const CyclicAdd c100(100);
  const auto a = ActionSubset::point_side(iota_codes(0, 4));
  EXPECT_EQ(act_incidence(c100, ActionSubset::group_side({0, 1, 2}), a, a), 12u);
  const Agl1 agl(5);
  EXPECT_EQ(act_incidence(agl, all_elements(agl), all_points(agl), all_points(agl)), 100u);
  EXPECT_THROW(act_incidence(c10, a, a, a), PreconditionError);
}

TEST(ActIncidence, MatchesDoubleLoop) {
  std::mt19937_64 rng(211);
  const std::vector<std::shared_ptr<const GroupAction>> acts{make_action(ActionKind::cyclic, 97),
                                                             make_action(ActionKind::agl1, 11),
                                                             make_action(ActionKind::psl2, 7)};
  for (int trial = 0; trial < 60; ++trial) {
    const auto& act = *acts[trial % acts.size()];
    std::vector<Code> s, a, b;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 30); ++i) s.push_back(rng() % act.group_order());
    for (int i = 0; i < 1 + static_cast<int>(rng() % 30); ++i) a.push_back(rng() % act.point_count());
    for (int i = 0; i < 1 + static_cast<int>(rng() % 30); ++i) b.push_back(rng() % act.point_count());
    const auto S = ActionSubset::group_side(s), A = ActionSubset::point_side(a), B = ActionSubset::point_side(b);
    const auto want = oracle::act_incidence(act, S.elems, A.elems, B.elems);
    for (unsigned t : {1u, 2u, 3u}) EXPECT_EQ(act_incidence(act, S, A, B, t), want);
  }
}

TEST(ProductSet, Examples) {
  const CyclicAdd c7(7);
  for (unsigned k : {1u, 2u, 5u}) EXPECT_EQ(product_set(c7, ActionSubset::group_side({0}), k).elems, std::vector<Code>{0});
  const auto s = product_set(c7, cyclic_interval(7, -1, 1), 2);
  EXPECT_EQ(s.elems, cyclic_interval(7, -2, 2).elems);
  EXPECT_EQ(product_set(c7, ActionSubset::group_side({1}), 1).elems, (std::vector<Code>{0, 1, 6}));
}

TEST(ProductSet, PowersMultiply) {
  const Psl2 act(5);
  const auto s = ActionSubset::group_side({act.parse_element("1 1 0 1"), act.parse_element("2 0 0 3")});
  for (unsigned k1 = 1; k1 <= 3; ++k1) {
    for (unsigned k2 = 1; k2 <= 3; ++k2) {
      const auto lhs = product_set(act, s, k1 + k2);
      const auto rhs = set_product(act, product_set(act, s, k1), product_set(act, s, k2));
      EXPECT_EQ(lhs.elems, rhs.elems);
    }
  }
}

TEST(GeneratedSubgroup, ReachesFixpoint) {
  const CyclicAdd c12(12);
  const auto g = generated_subgroup(c12, ActionSubset::group_side({4}), 6);
  EXPECT_TRUE(g.fixpoint);
  EXPECT_EQ(g.set.elems, (std::vector<Code>{0, 4, 8}));
  const CyclicAdd c1000(1000);
  const auto h = generated_subgroup(c1000, ActionSubset::group_side({1}), 6);
  EXPECT_FALSE(h.fixpoint);
  EXPECT_EQ(h.set.size(), 13u);
}

TEST(StabCount, Examples) {
  const CyclicAdd c9(9);
  EXPECT_EQ(stab_count(c9, all_elements(c9), all_points(c9), 1).nontrivial, 0u);
  const Agl1 agl(7);
  const auto r = stab_count(agl, all_elements(agl), all_points(agl), 2);
  EXPECT_EQ(r.nontrivial, 7u);
  EXPECT_EQ(r.tuples, 49u);
  EXPECT_EQ(r.histogram.at(6), 7u);
  EXPECT_EQ(r.histogram.at(1), 42u);
  const Psl2 psl(5);
  const auto t = stab_count(psl, all_elements(psl), all_points(psl), 3);
  EXPECT_EQ(t.nontrivial, 96u);
  EXPECT_EQ(t.nontrivial, 6u * 6 * 6 - 6 * 5 * 4);
  EXPECT_LE(t.nontrivial, 3u * 36);
  EXPECT_EQ(t.count_at_least(2), 96u);
  EXPECT_THROW(stab_count(psl, all_elements(psl), all_points(psl), 12, 1000), BudgetExceeded);
}

TEST(StabCount, MatchesBruteForceAndThreadCount) {
  for (std::uint64_t p : {5u, 7u}) {
    const Psl2 psl(p);
    const Agl1 agl(p);
    for (unsigned n = 1; n <= 3; ++n) {
      const auto want_psl = oracle::nontrivial_stabilizers(psl, all_points(psl).elems, n);
      const auto want_agl = oracle::nontrivial_stabilizers(agl, all_points(agl).elems, n);
      for (unsigned t : {1u, 3u}) {
        EXPECT_EQ(stab_count(psl, all_elements(psl), all_points(psl), n, 10'000'000, t).nontrivial, want_psl);
        EXPECT_EQ(stab_count(agl, all_elements(agl), all_points(agl), n, 10'000'000, t).nontrivial, want_agl);
      }
    }
    // Sharp transitivity: only tuples with a repeated coordinate can be fixed.
    const auto pts = all_points(psl).size();
    EXPECT_EQ(stab_count(psl, all_elements(psl), all_points(psl), 3).nontrivial, pts * pts * pts - pts * (pts - 1) * (pts - 2));
    EXPECT_EQ(stab_count(agl, all_elements(agl), all_points(agl), 2).nontrivial, p);
  }
}

TEST(ApproxSubgroup, SubgroupNeedsOneTranslate) {
  const CyclicAdd c12(12);
  const auto cert = verify_approx_subgroup(c12, ActionSubset::group_side({0, 3, 6, 9}), 1);
  EXPECT_TRUE(cert.ok());
  EXPECT_EQ(cert.cover, std::vector<Code>{0});
  const Psl2 psl(5);
  const auto full = verify_approx_subgroup(psl, all_elements(psl), 1);
  EXPECT_TRUE(full.ok());
  EXPECT_EQ(full.cover, std::vector<Code>{psl.identity()});
}

TEST(ApproxSubgroup, IntervalsNeedTwoTranslates) {
  const CyclicAdd c(1009);
  for (std::int64_t L : {1, 5, 27, 100}) {
    const auto h = cyclic_interval(1009, -L, L);
    const auto two = verify_approx_subgroup(c, h, 2);
    EXPECT_TRUE(two.ok()) << L;
    EXPECT_LE(two.cover.size(), 2u);
    EXPECT_FALSE(verify_approx_subgroup(c, h, 1).ok());
    EXPECT_TRUE(verify_approx_subgroup(c, h, 3).ok());
    EXPECT_EQ(min_cover_size(c, h), oracle::interval_cover_size(1009, static_cast<std::uint64_t>(L)));
  }
}

TEST(ApproxSubgroup, FailedPreconditionsAreRecorded) {
  const CyclicAdd c(20);
  const auto asym = verify_approx_subgroup(c, ActionSubset::group_side({0, 1, 2}), 5);
  EXPECT_FALSE(asym.symmetric);
  EXPECT_TRUE(asym.has_identity);
  EXPECT_TRUE(asym.cover.empty());
  EXPECT_FALSE(asym.ok());
  const auto no_id = verify_approx_subgroup(c, ActionSubset::group_side({1, 19}), 5);
  EXPECT_FALSE(no_id.has_identity);
  EXPECT_FALSE(no_id.ok());
  EXPECT_THROW(verify_approx_subgroup(c, ActionSubset::group_side({}), 5), PreconditionError);
}

TEST(Bsg, LargeCyclicInstance) {
  const CyclicAdd c(10007);
  const auto s = ActionSubset::group_side(iota_codes(0, 99));
  const auto a = ActionSubset::point_side(iota_codes(0, 999));
  const auto r = bsg_extract(c, s, a);
  std::uint64_t closed_form = 0;
  for (std::uint64_t k = 0; k < 100; ++k) closed_form += 1000 - k;
  EXPECT_EQ(r.incidences, 95050u);
  EXPECT_EQ(r.incidences, closed_form);
  EXPECT_LE(r.size_HT, 2 * r.size_T);
  EXPECT_TRUE(verify_approx_subgroup(c, r.H, 3).ok());
  const auto check = verify_bsg(c, r, a, s, 0.3, 1, 0.0);
  EXPECT_TRUE(check.ok());
}

TEST(Bsg, TrivialS) {
  const Agl1 act(7);
  const auto a = ActionSubset::point_side({0, 2, 3, 5});
  const auto r = bsg_extract(act, ActionSubset::group_side({act.identity()}), a);
  EXPECT_EQ(r.H.elems, std::vector<Code>{act.identity()});
  EXPECT_EQ(r.T.elems, a.elems);
  EXPECT_EQ(r.size_HT, a.size());
}

TEST(Bsg, NoIncidenceIsAnError) {
  const CyclicAdd c(100);
  EXPECT_THROW(bsg_extract(c, ActionSubset::group_side({50}), ActionSubset::point_side({0, 1})), PreconditionError);
}

TEST(Bsg, CosetProgression) {
  // S = A = {0, 5, 10, ..., 5*39} in Z/1000, a progression in the subgroup 5Z/1000.
  const CyclicAdd c(1000);
  std::vector<Code> codes;
  for (Code k = 0; k < 40; ++k) codes.push_back(5 * k);
  const auto r = bsg_extract(c, ActionSubset::group_side(codes), ActionSubset::point_side(codes));
  EXPECT_TRUE(verify_approx_subgroup(c, r.H, 3).ok());
}

TEST(Bsg, SmallInstanceMatchesIntervalOracle) {
  const CyclicAdd c(13);
  const auto s = ActionSubset::group_side({0, 1, 2});
  const auto a = ActionSubset::point_side(iota_codes(0, 5));
  const auto r = bsg_extract(c, s, a);
  const double got = certificate_delta(c, r, a, s, 1, 0.0);
  const double best = oracle::interval_bsg_best(13, 6, 3, 1, 0.0);
  EXPECT_LE(got, best + 1e-9);
  EXPECT_NEAR(best, std::log(2.0) / std::log(6.0), 1e-12);
}

TEST(VerifyBsg, SubgroupSaturation) {
  const CyclicAdd c(12);
  const auto h = ActionSubset::group_side(iota_codes(0, 11));
  const auto a = ActionSubset::point_side(iota_codes(0, 11));
  BsgResult r;
  r.H = h;
  r.T = a;
  r.h = 0;
  for (double delta : {0.0, 0.1, 0.5}) EXPECT_TRUE(verify_bsg(c, r, a, h, delta, 1, 0.0).ok());
}

TEST(VerifyBsg, ExpandingResultFails) {
  std::mt19937_64 rng(5);
  const CyclicAdd c(100003);
  std::vector<Code> hs, ts;
  for (int i = 0; i < 200; ++i) hs.push_back(rng() % 100003);
  for (int i = 0; i < 200; ++i) ts.push_back(rng() % 100003);
  BsgResult r;
  r.H = ActionSubset::group_side(hs);
  r.T = ActionSubset::point_side(ts);
  r.h = hs.front();
  const auto a = r.T;
  const auto check = verify_bsg(c, r, a, r.H, 0.1, 1, 0.0);
  EXPECT_FALSE(check.non_expansion);
  EXPECT_FALSE(check.ok());
}
