#include "growthlab/constructions.hpp"

#include <gmp.h>

#include <string>

#include "growthlab/errors.hpp"

namespace growthlab {

FiniteSet gen_ap(const BigRat& start, const BigRat& step, std::uint64_t n) {
  if (step.is_zero()) throw PreconditionError("progression step must be nonzero");
  if (n == 0) throw PreconditionError("progression length must be positive");
  std::vector<BigRat> out;
  out.reserve(n);
  BigRat cur = start;
  for (std::uint64_t k = 0; k < n; ++k) {
    out.push_back(cur);
    cur += step;
  }
  return FiniteSet::of_rationals(out);
}

FiniteSet gen_gp(const BigRat& start, const BigRat& ratio, std::uint64_t n) {
  if (start.is_zero()) throw PreconditionError("geometric progression start must be nonzero");
  if (ratio.is_zero() || ratio == BigRat(1) || ratio == BigRat(-1)) {
    throw PreconditionError("geometric progression ratio must not be 0, 1 or -1");
  }
  std::vector<BigRat> out;
  out.reserve(n);
  BigRat cur = start;
  for (std::uint64_t k = 0; k < n; ++k) {
    out.push_back(cur);
    cur *= ratio;
  }
  return FiniteSet::of_rationals(out);
}

PolyFamily gen_structured_family(ClassKind kind, const UniPoly& g, const UniPoly& h, const FiniteSet& params) {
  if (g.is_constant() || h.is_constant()) throw PreconditionError("g and h must be nonconstant");
  if (params.kind() != ElementKind::rational) throw PreconditionError("family parameters must be rational");
  if (kind == ClassKind::multiplicative && !g.coeff(0).is_zero()) {
    throw PreconditionError("multiplicative families need g(0) = 0");
  }
  std::vector<UniPoly> members;
  members.reserve(params.size());
  for (const BigRat& a : params.rationals()) {
    if (kind == ClassKind::additive) {
      members.push_back(compose(h, g + UniPoly::constant(a)));
    } else {
      if (a.is_zero()) throw PreconditionError("multiplicative parameter 0 gives a constant member");
      members.push_back(compose(h, g * a));
    }
  }
  return PolyFamily(std::move(members));
}

std::uint64_t integer_root(std::uint64_t n, unsigned k) {
  if (k == 0) throw PreconditionError("root index must be positive");
  BigInt v(static_cast<unsigned long>(n));
  BigInt r;
  mpz_root(r.get_mpz_t(), v.get_mpz_t(), k);
  return r.get_ui();
}

std::uint64_t SpanInstance::expected_size() const {
  std::uint64_t total = 0;
  for (std::uint64_t b : bounds) total += 2 * b + 1;
  return total - (levels - 1);
}

SpanInstance gen_span(std::uint64_t N) {
  if (N < 4) throw PreconditionError("span example needs N >= 4");
  SpanInstance inst;
  inst.N = N;
  // Largest j with 2^(2^j) <= N, i.e. floor(log2 log2 N).
  std::uint32_t levels = 0;
  while (levels < 5 && (std::uint64_t{1} << (std::uint64_t{1} << (levels + 1))) <= N) ++levels;
  inst.levels = levels;
  std::vector<BasisVector> elems;
  elems.emplace_back();
  for (std::uint32_t i = 0; i < levels; ++i) {
    const std::uint64_t b = integer_root(N, 1u << i);
    inst.bounds.push_back(b);
    for (std::uint64_t m = 1; m <= b; ++m) {
      elems.push_back(BasisVector::unit(i, static_cast<std::int64_t>(m)));
      elems.push_back(BasisVector::unit(i, -static_cast<std::int64_t>(m)));
    }
  }
  inst.set = FiniteSet::of_vectors(elems);
  return inst;
}

SumsetMeasure span_iterated_sumset(const SpanInstance& inst, unsigned k, std::uint64_t budget) {
  if (k == 0) throw PreconditionError("sumset needs at least one summand");
  const std::uint64_t base = inst.set.size();
  if (base != 0 && k > budget / base) {
    throw BudgetExceeded("span sumset: k * |S_N| = " + std::to_string(static_cast<unsigned long long>(k) * base) +
                         " exceeds budget " + std::to_string(budget));
  }
  // ways[c] = number of vectors on the axes seen so far with total cost c.
  std::vector<BigInt> ways(k + 1, BigInt(0));
  ways[0] = 1;
  for (std::uint64_t b : inst.bounds) {
    const BigInt width(static_cast<unsigned long>(2 * b));
    std::vector<BigInt> next(k + 1, BigInt(0));
    for (unsigned used = 0; used <= k; ++used) {
      if (ways[used] == 0) continue;
      next[used] += ways[used];
      for (unsigned c = 1; used + c <= k; ++c) next[used + c] += ways[used] * width;
    }
    ways = std::move(next);
  }
  SumsetMeasure out;
  out.size = 0;
  for (const auto& w : ways) out.size += w;
  out.dim = coarse_dim(out.size, static_cast<double>(inst.N));
  return out;
}

CounterexampleInstance gen_counterexample(std::uint64_t n) {
  if (n == 0) throw PreconditionError("counterexample needs n >= 1");
  CounterexampleInstance inst;
  inst.n = n;
  for (std::uint64_t i = 1; i <= n; ++i) inst.family.log2_degrees.push_back(i);
  std::vector<TowerInt> towers;
  for (std::uint64_t i = 0; i <= n; ++i) towers.emplace_back(i);
  inst.set = FiniteSet::of_towers(towers);
  return inst;
}

PolyFamily counterexample_polys(std::uint64_t n) {
  if (n == 0 || n > 16) throw PreconditionError("explicit tower family only for 1 <= n <= 16");
  std::vector<UniPoly> members;
  for (std::uint64_t i = 1; i <= n; ++i) members.push_back(UniPoly::monomial(1u << i));
  return PolyFamily(std::move(members));
}

}  // namespace growthlab
