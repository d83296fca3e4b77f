#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "growthlab/expansion.hpp"
#include "growthlab/family.hpp"

namespace growthlab {

/// {start + k*step : 0 <= k < n}. Throws PreconditionError for step = 0 or n = 0.
FiniteSet gen_ap(const BigRat& start, const BigRat& step, std::uint64_t n);

/// {start * ratio^k : 0 <= k < n}. start != 0, ratio not in {0, 1, -1}.
FiniteSet gen_gp(const BigRat& start, const BigRat& ratio, std::uint64_t n);

/// {h(g(t) + a)} (additive) or {h(g(t) * a)} (multiplicative) for a in params.
/// Multiplicative families need g(0) = 0 so that every member lies in one
/// scaling class of the normalized inner polynomial.
PolyFamily gen_structured_family(ClassKind kind, const UniPoly& g, const UniPoly& h, const FiniteSet& params);

/// Union over i < n_N of the integer multiples m * e_i with |m| <= floor(N^(2^-i)),
/// where n_N = floor(log2 log2 N).
struct SpanInstance {
  std::uint64_t N = 0;
  std::uint32_t levels = 0;
  /// floor(N^(2^-i)) for i < levels.
  std::vector<std::uint64_t> bounds;
  FiniteSet set;

  /// Sum over i of (2 * bounds[i] + 1), minus the repeated zero vector.
  std::uint64_t expected_size() const;
};

/// Throws PreconditionError for N < 4.
SpanInstance gen_span(std::uint64_t N);

/// floor(n^(1/k)) computed exactly.
std::uint64_t integer_root(std::uint64_t n, unsigned k);

struct SumsetMeasure {
  BigInt size;
  CoarseDim dim;
};

/// Exact size of the k-fold sumset S_N + ... + S_N and its coarse dimension
/// at scale N. A vector v lies in the k-fold sumset iff
/// sum_i ceil(|v_i| / bounds[i]) <= k, so the size is a sum over per-axis
/// cost profiles and never materializes the sumset.
/// Throws BudgetExceeded when k * |S_N| exceeds `budget`.
SumsetMeasure span_iterated_sumset(const SpanInstance& inst, unsigned k, std::uint64_t budget = 10'000'000);

/// F = {x^(2^i) : 0 < i <= n} as log2 degrees, A = {T(i) : i <= n}.
struct CounterexampleInstance {
  std::uint64_t n = 0;
  TowerFamily family;
  FiniteSet set;
};

CounterexampleInstance gen_counterexample(std::uint64_t n);

/// Materializes the family as polynomials; only feasible for small n.
PolyFamily counterexample_polys(std::uint64_t n);

}  // namespace growthlab
