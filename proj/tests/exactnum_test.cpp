#include <gtest/gtest.h>

#include <random>
#include <unordered_set>

#include "growthlab/exactnum.hpp"

using namespace growthlab;

namespace {

BigRat random_rat(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-50, 50), den(1, 30);
  return BigRat(BigInt(num(rng)), BigInt(den(rng)));
}

}  // namespace

TEST(BigRat, AddsFractions) { EXPECT_EQ(rat_arith(RatOp::add, BigRat::parse("1/2"), BigRat::parse("1/3")).str(), "5/6"); }

TEST(BigRat, ZeroAbsorbs) {
  for (const char* x : {"7/3", "-1", "0", "123456789012345678901234567890"}) {
    EXPECT_TRUE(rat_arith(RatOp::mul, BigRat(0), BigRat::parse(x)).is_zero());
  }
}

TEST(BigRat, DivisionByZeroThrows) {
  EXPECT_THROW(rat_arith(RatOp::div, BigRat(1), BigRat(0)), ArithmeticError);
  EXPECT_THROW(BigRat(BigInt(1), BigInt(0)), ArithmeticError);
  EXPECT_THROW(inverse(BigRat(0)), ArithmeticError);
}

TEST(BigRat, KeepsLowestTerms) {
  const BigRat r(BigInt(6), BigInt(-4));
  EXPECT_EQ(r.num(), BigInt(-3));
  EXPECT_EQ(r.den(), BigInt(2));
  EXPECT_EQ(r.str(), "-3/2");
  EXPECT_EQ(BigRat::parse("-6/4"), r);
  EXPECT_EQ(BigRat::parse("-6/4").hash(), r.hash());
}

TEST(BigRat, ParseRejectsGarbage) {
  EXPECT_THROW(BigRat::parse("1/"), ParseError);
  EXPECT_THROW(BigRat::parse("abc"), ParseError);
  EXPECT_THROW(BigRat::parse("1/0"), ArithmeticError);
}

TEST(BigRat, FieldAxiomsOnRandomTriples) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const BigRat a = random_rat(rng), b = random_rat(rng), c = random_rat(rng);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a - a, BigRat(0));
    if (!a.is_zero()) EXPECT_EQ(a * inverse(a), BigRat(1));
  }
}

TEST(BigRat, ExactRoot) {
  BigRat r;
  ASSERT_TRUE(exact_root(BigRat::parse("8/27"), 3, r));
  EXPECT_EQ(r, BigRat::parse("2/3"));
  ASSERT_TRUE(exact_root(BigRat::parse("-8/27"), 3, r));
  EXPECT_EQ(r, BigRat::parse("-2/3"));
  ASSERT_TRUE(exact_root(BigRat::parse("9/4"), 2, r));
  EXPECT_EQ(r, BigRat::parse("3/2"));
  EXPECT_FALSE(exact_root(BigRat::parse("-4"), 2, r));
  EXPECT_FALSE(exact_root(BigRat::parse("2"), 2, r));
}

TEST(TowerInt, PowExamples) {
  EXPECT_EQ(tower_pow(TowerInt(1), 2).exponent(), 3u);
  EXPECT_EQ(tower_pow(TowerInt(0), 0).exponent(), 0u);
  // 4^4 = 256 = 2^(2^3)
  EXPECT_EQ(TowerInt(1).value() * TowerInt(1).value() * TowerInt(1).value() * TowerInt(1).value(), BigInt(256));
  EXPECT_EQ(tower_pow(TowerInt(1), 2).value(), BigInt(256));
}

TEST(TowerInt, PowComposes) {
  for (std::uint64_t e = 0; e < 4; ++e) {
    for (std::uint64_t j1 = 0; j1 <= 10; ++j1) {
      for (std::uint64_t j2 = 0; j2 <= 10; ++j2) {
        EXPECT_EQ(tower_pow(TowerInt(e), j1 + j2), tower_pow(tower_pow(TowerInt(e), j1), j2));
      }
    }
  }
}

TEST(TowerInt, BigIntegerEvaluationAgrees) {
  for (std::uint64_t e = 0; e <= 5; ++e) {
    for (std::uint64_t j = 0; e + j <= 5; ++j) {
      BigInt direct = TowerInt(e).value();
      for (std::uint64_t k = 0; k < j; ++k) direct = direct * direct;
      EXPECT_EQ(tower_pow(TowerInt(e), j).value(), direct);
      BigInt by_shift = 1;
      by_shift <<= (1u << (e + j));
      EXPECT_EQ(direct, by_shift);
    }
  }
}

TEST(TowerInt, TextForm) {
  EXPECT_EQ(TowerInt(4).str(), "T(4)");
  EXPECT_EQ(TowerInt::parse("T(12)"), TowerInt(12));
  EXPECT_THROW(TowerInt::parse("T(x)"), ParseError);
}

TEST(BasisVector, AddExamples) {
  EXPECT_EQ(vec_add(BasisVector::unit(0, 2), BasisVector::unit(1, 3)), BasisVector({{0, 2}, {1, 3}}));
  EXPECT_TRUE(vec_add(BasisVector::unit(0, 2), BasisVector::unit(0, -2)).is_zero());
  EXPECT_EQ(vec_add(BasisVector({{0, 1}, {1, 1}}), BasisVector({{1, -1}, {2, 5}})), BasisVector({{0, 1}, {2, 5}}));
}

TEST(BasisVector, PrunesZeros) {
  EXPECT_TRUE(BasisVector(BasisVector::Coeffs{{3, 0}}).is_zero());
  EXPECT_EQ(BasisVector::unit(2, 0), BasisVector());
}

TEST(BasisVector, GroupLaws) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> idx(0, 4), val(-3, 3);
  auto rnd = [&] {
    BasisVector::Coeffs c;
    for (int i = 0; i < 3; ++i) c[static_cast<std::uint32_t>(idx(rng))] = val(rng);
    return BasisVector(c);
  };
  for (int i = 0; i < 300; ++i) {
    const auto u = rnd(), v = rnd(), w = rnd();
    EXPECT_EQ(vec_add(u, v), vec_add(v, u));
    EXPECT_EQ(vec_add(vec_add(u, v), w), vec_add(u, vec_add(v, w)));
    EXPECT_EQ(vec_add(u, BasisVector()), u);
    EXPECT_TRUE(vec_add(u, vec_neg(u)).is_zero());
    // Equal sums iff equal coefficient maps.
    EXPECT_EQ(vec_add(u, v) == vec_add(u, w), v == w);
  }
}

TEST(BasisVector, TextRoundTrip) {
  const BasisVector v({{0, 1}, {2, -5}});
  EXPECT_EQ(v.str(), "0:1,2:-5");
  EXPECT_EQ(BasisVector::parse(v.str()), v);
  EXPECT_THROW(BasisVector::parse("0:"), ParseError);
}

TEST(Hashing, AgreesWithEquality) {
  std::unordered_set<BigRat> rats{BigRat::parse("1/2"), BigRat::parse("2/4"), BigRat(1)};
  EXPECT_EQ(rats.size(), 2u);
  std::unordered_set<BasisVector> vecs{BasisVector::unit(1, 2), vec_add(BasisVector::unit(1, 1), BasisVector::unit(1, 1))};
  EXPECT_EQ(vecs.size(), 1u);
}
