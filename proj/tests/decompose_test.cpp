#include <gtest/gtest.h>

#include <random>

#include "growthlab/decompose.hpp"
#include "oracles/oracles.hpp"

using namespace growthlab;

namespace {

UniPoly random_uni(std::mt19937_64& rng, int degree) {
  std::uniform_int_distribution<long> c(-9, 9);
  std::vector<BigRat> coeffs;
  for (int i = 0; i <= degree; ++i) coeffs.push_back(BigRat(c(rng)));
  while (coeffs.back().is_zero()) coeffs.back() = BigRat(c(rng));
  return UniPoly(coeffs);
}

bool normalized(const UniPoly& inner) { return inner.leading() == BigRat(1) && inner.coeff(0).is_zero(); }

}  // namespace

TEST(DecomposeUni, SquareOfQuadratic) {
  const auto ds = decompose_uni(parse_uni("x^4 + 2*x^2 + 1"));
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].inner, parse_uni("x^2"));
  EXPECT_EQ(ds[0].outer, parse_uni("x^2 + 2*x + 1"));
}

TEST(DecomposeUni, MonomialSplits) {
  const auto ds = decompose_uni(parse_uni("x^6"));
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds[0].inner, parse_uni("x^3"));
  EXPECT_EQ(ds[0].outer, parse_uni("x^2"));
  EXPECT_EQ(ds[1].inner, parse_uni("x^2"));
  EXPECT_EQ(ds[1].outer, parse_uni("x^3"));
}

TEST(DecomposeUni, PrimeDegreeIsIndecomposable) {
  EXPECT_TRUE(decompose_uni(parse_uni("x^5 + x")).empty());
  EXPECT_TRUE(decompose_uni(parse_uni("x")).empty());
}

TEST(DecomposeUni, IndecomposableComposite) {
  // x^4 + x is not outer(quadratic): the x^3 coefficient forces inner x^2 + 0*x.
  EXPECT_TRUE(decompose_uni(parse_uni("x^4 + x")).empty());
}

TEST(DecomposeUni, TrivialSplits) {
  const UniPoly f = parse_uni("3*x^2 + 6*x + 5");
  auto lin_outer = decompose_at(f, 2);
  ASSERT_TRUE(lin_outer);
  EXPECT_TRUE(lin_outer->trivial);
  EXPECT_EQ(compose(lin_outer->outer, lin_outer->inner), f);
  auto lin_inner = decompose_at(f, 1);
  ASSERT_TRUE(lin_inner);
  EXPECT_EQ(compose(lin_inner->outer, lin_inner->inner), f);
  EXPECT_FALSE(decompose_at(f, 3));
}

TEST(DecomposeUni, RandomRoundTrip) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> deg(2, 4);
  for (int i = 0; i < 150; ++i) {
    const UniPoly g = random_uni(rng, deg(rng));
    const UniPoly h = random_uni(rng, deg(rng));
    const UniPoly f = compose(g, h);
    const auto ds = decompose_uni(f);
    bool found = false;
    for (const auto& d : ds) {
      EXPECT_EQ(compose(d.outer, d.inner), f);
      EXPECT_TRUE(normalized(d.inner));
      found = found || d.inner.degree() == h.degree();
    }
    EXPECT_TRUE(found) << f.str();
    for (std::size_t k = 1; k < ds.size(); ++k) EXPECT_GT(ds[k - 1].inner.degree(), ds[k].inner.degree());
  }
}

TEST(DecomposeUni, NormalizationIsLinearInvariant) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 60; ++i) {
    const UniPoly g = random_uni(rng, 2);
    const UniPoly h = random_uni(rng, 3);
    // alpha(t) = a t + b; (g o alpha^-1) o (alpha o h) is the same polynomial.
    const BigRat a(1 + i % 5), b(i % 7 - 3);
    const UniPoly alpha(std::vector<BigRat>{b, a});
    const UniPoly alpha_inv(std::vector<BigRat>{-b / a, inverse(a)});
    const UniPoly f1 = compose(g, h);
    const UniPoly f2 = compose(compose(g, alpha_inv), compose(alpha, h));
    ASSERT_EQ(f1, f2);
    const auto d1 = decompose_at(f1, 3);
    ASSERT_TRUE(d1);
    EXPECT_EQ(d1->inner, normalize_affine(h));
  }
}

TEST(SeriesRoot, SquareRootOfOnePlusW) {
  // (1 + w)^(1/2) = 1 + w/2 - w^2/8 + w^3/16 - ...
  const auto c = series_root_coefficients(parse_uni("x + 1"), 2, 3);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], BigRat::parse("1/2"));
  EXPECT_EQ(c[1], BigRat::parse("-1/8"));
  EXPECT_EQ(c[2], BigRat::parse("1/16"));
}

TEST(ExactPolyRoot, FindsAndRejects) {
  const MultiPoly p = parse_poly("y0 + 2*y1 - 1/3", 3);
  auto r = exact_poly_root(pow(p, 3), 3);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, p);
  EXPECT_FALSE(exact_poly_root(parse_poly("y0^2 + 1", 2), 2));
}

TEST(DetectAddMul, ProductIsMultiplicative) {
  const auto w = detect_addmul(parse_poly("x*y0", 2));
  EXPECT_EQ(w.kind, FormKind::multiplicative);
  EXPECT_EQ(w.g, UniPoly::identity());
  EXPECT_EQ(w.h, UniPoly::identity());
  ASSERT_TRUE(w.s);
  EXPECT_EQ(*w.s, parse_poly("x", 1));  // y0 of the y-block prints as its own variable 0
}

TEST(DetectAddMul, CubeOfShiftIsAdditive) {
  const MultiPoly f = parse_poly("(x + y0^2)^3 + 1", 2);
  const auto w = detect_addmul(f);
  EXPECT_EQ(w.kind, FormKind::additive);
  EXPECT_EQ(w.g, parse_uni("x^3 + 1"));
  EXPECT_EQ(w.h, UniPoly::identity());
  ASSERT_TRUE(w.s);
  EXPECT_EQ(w.s->terms(), (MultiPoly::Terms{{{2}, BigRat(1)}}));
  EXPECT_EQ(recompose(w), f);
}

TEST(DetectAddMul, QuadraticFormIsNone) {
  const MultiPoly f = parse_poly("x^2 + x*y0 + y0^2", 2);
  EXPECT_EQ(detect_addmul(f).kind, FormKind::none);
  EXPECT_EQ(oracle::detect(f).kind, FormKind::none);
}

TEST(DetectAddMul, Degenerate) {
  EXPECT_THROW(detect_addmul(parse_poly("y0^2 + 1", 2)), DegenerateError);
  EXPECT_THROW(detect_addmul(parse_poly("x^2 + 1", 2)), DegenerateError);
  EXPECT_THROW(detect_addmul(parse_poly("x^2 + 1", 1)), DegenerateError);
}

TEST(DetectAddMul, SeveralYVariables) {
  const MultiPoly add = parse_poly("(x^2 + x + y0*y1 - y2)^2 - 3", 4);
  auto w = detect_addmul(add);
  EXPECT_EQ(w.kind, FormKind::additive);
  EXPECT_EQ(recompose(w), add);
  EXPECT_EQ(w.h, parse_uni("x^2 + x"));

  const MultiPoly mul = parse_poly("(x^2 + 1/2*x)^3*(y0 + y1^2)^3 + 2*(x^2 + 1/2*x)*(y0 + y1^2)", 3);
  w = detect_addmul(mul);
  EXPECT_EQ(w.kind, FormKind::multiplicative);
  EXPECT_EQ(recompose(w), mul);

  EXPECT_EQ(detect_addmul(parse_poly("x*y0 + x^2*y1", 3)).kind, FormKind::none);
}

TEST(DetectAddMul, WitnessRecomposesOnRandomStructuredInputs) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> c(-3, 3), deg(1, 3);
  for (int i = 0; i < 80; ++i) {
    const UniPoly g = random_uni(rng, deg(rng));
    const UniPoly h = random_uni(rng, deg(rng));
    MultiPoly s = parse_poly("y0^2 - 2*y1", 3) + MultiPoly::constant(3, BigRat(c(rng)));
    if (i % 2 == 1) s = s + parse_poly("y1^2", 3);
    const MultiPoly hx = MultiPoly::from_uni(h, 3, 0);
    const bool additive = i % 3 != 0;
    const MultiPoly inner = additive ? hx + s : hx * s;
    MultiPoly f(3);
    for (int k = g.degree(); k >= 0; --k) f = f * inner + MultiPoly::constant(3, g.coeff(static_cast<std::size_t>(k)));
    const auto w = detect_addmul(f);
    ASSERT_NE(w.kind, FormKind::none) << f.str();
    EXPECT_EQ(recompose(w), f);
    EXPECT_EQ(w.h.leading(), BigRat(1));
    if (w.kind == FormKind::additive) EXPECT_TRUE(w.h.coeff(0).is_zero());
  }
}

TEST(DetectAddMul, MatchesBruteForceOracle) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> c(-1, 1);
  int checked = 0;
  while (checked < 1500) {
    MultiPoly::Terms t;
    for (unsigned i = 0; i <= 3; ++i) {
      for (unsigned j = 0; j <= 3; ++j) {
        if (rng() % 3 == 0) t[{i, j}] = BigRat(c(rng));
      }
    }
    const MultiPoly f(2, t);
    if (!f.depends_on(0) || !f.depends_on(1)) continue;
    ++checked;
    const auto got = detect_addmul(f);
    const auto want = oracle::detect(f);
    ASSERT_EQ(got.kind, want.kind) << f.str();
    if (got.kind == FormKind::none) continue;
    EXPECT_EQ(got.g, want.g) << f.str();
    EXPECT_EQ(got.h, want.h) << f.str();
    EXPECT_EQ(*got.s, MultiPoly::from_uni(want.s, 1, 0)) << f.str();
    EXPECT_EQ(recompose(got), f);
  }
}
