#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "growthlab/constructions.hpp"
#include "growthlab/family.hpp"

using namespace growthlab;

namespace {

void expect_partition_with_certificates(const PolyFamily& fam, const std::vector<FamilyClass>& classes) {
  std::set<std::size_t> seen;
  for (const auto& cls : classes) {
    EXPECT_EQ(cls.inner.leading(), BigRat(1));
    EXPECT_TRUE(cls.inner.coeff(0).is_zero());
    for (const auto& m : cls.members) {
      EXPECT_TRUE(seen.insert(m.index).second) << "index " << m.index << " in two classes";
      const UniPoly arg = cls.kind == ClassKind::additive ? cls.inner + UniPoly::constant(m.a) : cls.inner * m.a;
      EXPECT_EQ(compose(cls.outer, arg), fam.members()[m.index]);
    }
  }
  EXPECT_EQ(seen.size(), fam.size());
}

PolyFamily parse_family(const std::string& text) {
  std::istringstream in(text);
  return PolyFamily::parse(in);
}

}  // namespace

TEST(PolyFamily, RejectsConstantsAndParsesComments) {
  EXPECT_THROW(PolyFamily({parse_uni("3")}), DegenerateError);
  EXPECT_THROW(PolyFamily({parse_uni("x^3")}, 2), PreconditionError);
  const PolyFamily f = parse_family("# squares\nx^2\n\n(x+1)^2  # shifted\n");
  EXPECT_EQ(f.size(), 2u);
  EXPECT_EQ(f.degree_bound(), 2u);
}

TEST(ClassifyFamily, ShiftedSquaresFormOneClass) {
  const PolyFamily fam({parse_uni("x^2"), parse_uni("(x+1)^2"), parse_uni("(x+2)^2")});
  const auto classes = classify_family(fam, ClassKind::additive);
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0].inner, UniPoly::identity());
  EXPECT_EQ(classes[0].outer, parse_uni("x^2"));
  std::vector<BigRat> shifts;
  for (const auto& m : classes[0].members) shifts.push_back(m.a);
  EXPECT_EQ(shifts, (std::vector<BigRat>{BigRat(0), BigRat(1), BigRat(2)}));
  expect_partition_with_certificates(fam, classes);
}

TEST(ClassifyFamily, DifferentDegreesAreSingletons) {
  const PolyFamily fam({parse_uni("x^2"), parse_uni("x^3")});
  const auto classes = classify_family(fam, ClassKind::additive);
  EXPECT_EQ(classes.size(), 2u);
  expect_partition_with_certificates(fam, classes);
}

TEST(ClassifyFamily, ScalingIsNotTranslation) {
  const PolyFamily fam({parse_uni("2*x^2"), parse_uni("(x+1)^2")});
  const auto add = classify_family(fam, ClassKind::additive);
  EXPECT_EQ(add.size(), 2u);
  expect_partition_with_certificates(fam, add);
}

TEST(ClassifyFamily, ScalingClass) {
  const PolyFamily fam({parse_uni("x^2 + x"), parse_uni("4*x^2 + 2*x"), parse_uni("1/4*x^2 - 1/2*x")});
  const auto mul = classify_family(fam, ClassKind::multiplicative);
  ASSERT_EQ(mul.size(), 1u);
  expect_partition_with_certificates(fam, mul);
}

TEST(ClassifyFamily, ThroughNontrivialInner) {
  // h(g(t) + a) with g = t^2 + t, h = t^2.
  const UniPoly g = parse_uni("x^2 + x");
  std::vector<UniPoly> members;
  for (int a = 0; a < 5; ++a) members.push_back(compose(parse_uni("x^2"), g + UniPoly::constant(BigRat(a))));
  members.push_back(parse_uni("x^4 + 1"));
  const PolyFamily fam(members);
  const auto classes = classify_family(fam, ClassKind::additive);
  ASSERT_GE(classes.size(), 2u);
  EXPECT_EQ(classes[0].members.size(), 5u);
  expect_partition_with_certificates(fam, classes);
}

TEST(ClassifyFamily, RandomFamiliesArePartitions) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long> c(-3, 3);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<UniPoly> members;
    for (int i = 0; i < 6; ++i) {
      const int deg = 1 + static_cast<int>(rng() % 4);
      std::vector<BigRat> co;
      for (int k = 0; k <= deg; ++k) co.push_back(BigRat(c(rng)));
      if (co.back().is_zero()) co.back() = BigRat(1);
      members.push_back(UniPoly(co));
    }
    const PolyFamily fam(members);
    expect_partition_with_certificates(fam, classify_family(fam, ClassKind::additive));
    expect_partition_with_certificates(fam, classify_family(fam, ClassKind::multiplicative));
  }
}

TEST(EpsStructured, ThresholdArithmetic) {
  EXPECT_TRUE(meets_class_threshold(4, 8, 0.5));
  EXPECT_FALSE(meets_class_threshold(2, 8, 0.5));
  // 8^(1/3) = 2 exactly: the slack accepts the boundary.
  EXPECT_TRUE(meets_class_threshold(2, 8, 2.0 / 3.0));
}

TEST(EpsStructured, EightMembersLargestFour) {
  std::vector<UniPoly> members;
  for (int a = 0; a < 4; ++a) members.push_back(compose(parse_uni("x^3"), parse_uni("x") + UniPoly::constant(BigRat(a))));
  for (int k = 0; k < 4; ++k) members.push_back(UniPoly::monomial(static_cast<unsigned>(4 + k)));
  const PolyFamily fam(members);
  const auto v = eps_structured(fam, 0.5);
  EXPECT_EQ(v.largest_additive, 4u);
  EXPECT_TRUE(v.eps_additive);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->members.size(), 4u);
}

TEST(EpsStructured, SingletonAlwaysStructured) {
  const PolyFamily fam({parse_uni("x^3 + x")});
  for (double eps : {0.01, 0.5, 0.99}) {
    const auto v = eps_structured(fam, eps);
    EXPECT_TRUE(v.eps_additive);
    EXPECT_TRUE(v.eps_multiplicative);
  }
}

TEST(EpsStructured, TowerFamilyIsUnstructured) {
  const PolyFamily fam = counterexample_polys(8);
  const auto v = eps_structured(fam, 0.5);
  EXPECT_FALSE(v.eps_additive);
  EXPECT_FALSE(v.eps_multiplicative);
  EXPECT_EQ(v.largest_additive, 1u);
  EXPECT_EQ(v.largest_multiplicative, 1u);
}

TEST(EpsStructured, MonotoneInEps) {
  std::vector<UniPoly> members;
  for (int a = 0; a < 3; ++a) members.push_back(compose(parse_uni("x^2"), parse_uni("x") + UniPoly::constant(BigRat(a))));
  for (int k = 3; k < 12; ++k) members.push_back(UniPoly::monomial(static_cast<unsigned>(k)));
  const PolyFamily fam(members);
  bool seen_true = false;
  for (int i = 1; i < 100; ++i) {
    const bool v = eps_structured(fam, i / 100.0).eps_additive;
    if (seen_true) EXPECT_TRUE(v) << "eps = " << i / 100.0;
    seen_true = seen_true || v;
  }
  EXPECT_TRUE(seen_true);
}
