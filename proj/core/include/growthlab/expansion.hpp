#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "growthlab/exactnum.hpp"
#include "growthlab/family.hpp"
#include "growthlab/poly.hpp"

namespace growthlab {

enum class ElementKind { rational, tower, vector };

std::string to_string(ElementKind kind);

/// Duplicate-free finite set of one element kind. Insertion order of first
/// occurrences is kept so that iteration is deterministic.
class FiniteSet {
 public:
  FiniteSet() : elems_(std::vector<BigRat>{}) {}
  static FiniteSet of_rationals(const std::vector<BigRat>& elems);
  static FiniteSet of_towers(const std::vector<TowerInt>& elems);
  static FiniteSet of_vectors(const std::vector<BasisVector>& elems);
  /// Integers lo..hi inclusive.
  static FiniteSet integer_range(long lo, long hi);

  /// One element per line in the exactnum text forms; `#` comments and blank
  /// lines are skipped. Without an explicit kind it is inferred from the first
  /// element: "T(e)" is a tower, anything containing ':' a vector.
  static FiniteSet parse(std::istream& in, std::optional<ElementKind> kind = std::nullopt);
  /// Inverse of parse; the zero vector is written as "0:0".
  void write(std::ostream& out) const;

  ElementKind kind() const { return static_cast<ElementKind>(elems_.index()); }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Throw PreconditionError on a kind mismatch.
  const std::vector<BigRat>& rationals() const;
  const std::vector<TowerInt>& towers() const;
  const std::vector<BasisVector>& vectors() const;

 private:
  using Storage = std::variant<std::vector<BigRat>, std::vector<TowerInt>, std::vector<BasisVector>>;
  explicit FiniteSet(Storage s) : elems_(std::move(s)) {}
  Storage elems_;
};

/// The monomial family {x^(2^j) : j in log2_degrees}.
struct TowerFamily {
  std::vector<std::uint64_t> log2_degrees;
};

/// Recognizes a family whose members are all monomials x^(2^j) with
/// coefficient 1.
std::optional<TowerFamily> as_tower_family(const PolyFamily& family);

/// |{f(a) : f in F, a in A}|. Rational sets are evaluated exactly; tower sets
/// require a monomial-power family and go through tower_pow.
std::uint64_t image_size(const PolyFamily& family, const FiniteSet& a, unsigned threads = 1);
std::uint64_t image_size(const TowerFamily& family, const FiniteSet& a);

/// |{f(a, b0, ..., b_{m-1})}| over A x B0 x ... x B_{m-1}.
std::uint64_t image_size_multi(const MultiPoly& f, const FiniteSet& a, std::span<const FiniteSet> bs,
                               unsigned threads = 1);

enum class SurfaceMode { implicit, graph };

/// Graph mode: U = {(x, d, f(x, d))} with f over (x, d).
/// Implicit mode: U = {F(x, d, y0) = 0} with F over (x, d, y0).
struct SurfaceSpec {
  SurfaceMode mode = SurfaceMode::graph;
  MultiPoly poly{2};

  static SurfaceSpec graph(MultiPoly f);
  static SurfaceSpec implicit(MultiPoly f);
  static SurfaceSpec parse_graph(std::string_view text);
  static SurfaceSpec parse_implicit(std::string_view text);
};

/// |U intersect (A x D x B)|.
std::uint64_t incidence_surface(const SurfaceSpec& u, const FiniteSet& a, const FiniteSet& d, const FiniteSet& b,
                                unsigned threads = 1);

struct CoarseDim {
  double value = 0.0;
  double xi = 0.0;
  std::uint64_t size = 0;
};

/// ln(size) / ln(xi). Requires size >= 1 and xi > 1.
CoarseDim coarse_dim(std::uint64_t size, double xi);
/// Same statistic for an arbitrary-precision size; CoarseDim::size saturates.
CoarseDim coarse_dim(const BigInt& size, double xi);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root mean square of the log residuals.
  double residual = 0.0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> points;
};

/// Least-squares line through (ln n, ln m).
ExponentFit fit_exponent(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points);

/// Constants appearing in the exponent formulas. c and c_prime stand for
/// unspecified absolute constants and default to 1.
struct BoundParams {
  double eps = 0.5;
  double eta = 0.0;
  double eta0 = 0.0;
  double delta = 0.0;
  double gamma = 1.0;
  double gamma_prime = 1.0;
  std::uint64_t k = 1;
  std::uint64_t n = 1;
  std::uint64_t M = 1;
  std::uint64_t m = 1;
  double r = 1.0;
  double t = 0.0;
  double c = 1.0;
  double c_prime = 1.0;
};

/// m^-2 * 2^(-c'/eps).
double eta_unbalanced_er(std::uint64_t m, double eps, double c_prime);
/// eps * (1 + 1/eps)^-1 * 2^(-4/(c eps) + 7), with c replaced by min(1, c).
double eta0_main1d(double eps, double c);
/// min(gamma'/k, 2^(-ceil(2kr/(c gamma)) - 2)).
double delta_jz(const BoundParams& p);

/// Largest fiber max_{p, v} |{a in A : p(a) = v}| over the probes.
std::uint64_t gp_statistic(const FiniteSet& a, const std::vector<UniPoly>& probes);

/// Explicit k-fold sumset A + ... + A of a rational or vector set. Throws
/// BudgetExceeded once an intermediate sumset grows past `budget` elements.
FiniteSet iterated_sumset(const FiniteSet& a, unsigned k, std::size_t budget);

}  // namespace growthlab
