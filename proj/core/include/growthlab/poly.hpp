#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "growthlab/exactnum.hpp"

namespace growthlab {

/// Dense univariate polynomial over the rationals; index = degree.
/// The coefficient vector never ends in a zero, so the zero polynomial is
/// the empty vector and has degree -1.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<BigRat> coeffs);

  static UniPoly constant(const BigRat& c);
  static UniPoly monomial(unsigned degree, const BigRat& c = BigRat(1));
  static UniPoly identity() { return monomial(1); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_constant() const { return coeffs_.size() <= 1; }
  const std::vector<BigRat>& coeffs() const { return coeffs_; }
  /// Zero beyond the degree.
  const BigRat& coeff(std::size_t i) const;
  const BigRat& leading() const;

  BigRat eval(const BigRat& x) const;
  UniPoly derivative() const;

  /// Uses `var` as the variable name; output is accepted by parse_poly.
  std::string str(std::string_view var = "x") const;

  UniPoly& operator+=(const UniPoly& o);
  UniPoly& operator-=(const UniPoly& o);
  UniPoly& operator*=(const BigRat& c);
  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator*(UniPoly a, const BigRat& c) { return a *= c; }
  friend UniPoly operator*(const BigRat& c, UniPoly a) { return a *= c; }
  friend UniPoly operator-(const UniPoly& a) { return a * BigRat(-1); }
  friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const UniPoly& a, const UniPoly& b) { return !(a == b); }

 private:
  void trim();
  std::vector<BigRat> coeffs_;
};

UniPoly pow(const UniPoly& p, unsigned exp);
/// outer(inner(t)).
UniPoly compose(const UniPoly& outer, const UniPoly& inner);
/// Euclidean division; throws ArithmeticError for a zero divisor.
std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b);
/// p(t + shift).
UniPoly taylor_shift(const UniPoly& p, const BigRat& shift);
/// p(scale * t).
UniPoly scale_argument(const UniPoly& p, const BigRat& scale);
/// Monic with zero constant term: the representative of p modulo affine
/// post-composition. Requires a nonconstant p.
UniPoly normalize_affine(const UniPoly& p);

using Exponents = std::vector<unsigned>;

/// Ordered variable names. Index 0 is always the distinguished `x` block.
class VarSpace {
 public:
  explicit VarSpace(std::vector<std::string> names) : names_(std::move(names)) {}
  /// x, y0, ..., y_{arity-2}.
  static VarSpace standard(std::size_t arity);
  /// x, d (graph surfaces z = f(x, d)).
  static VarSpace surface_graph();
  /// x, d, y0 (implicit surfaces F(x, d, y0) = 0, y0 standing for the third coordinate).
  static VarSpace surface_implicit();

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  /// -1 when absent.
  int index_of(std::string_view name) const;

 private:
  std::vector<std::string> names_;
};

/// Sparse multivariate polynomial with a fixed number of variables.
class MultiPoly {
 public:
  using Terms = std::map<Exponents, BigRat>;

  explicit MultiPoly(std::size_t arity = 1) : arity_(arity) {}
  MultiPoly(std::size_t arity, const Terms& terms);

  static MultiPoly constant(std::size_t arity, const BigRat& c);
  static MultiPoly variable(std::size_t arity, std::size_t index);
  /// Embeds p(var) into `arity` variables.
  static MultiPoly from_uni(const UniPoly& p, std::size_t arity, std::size_t var);

  std::size_t arity() const { return arity_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  BigRat constant_term() const;
  unsigned degree_in(std::size_t var) const;
  unsigned total_degree() const;
  bool depends_on(std::size_t var) const { return degree_in(var) > 0; }
  /// Leading term in graded order: total degree first, then lexicographic
  /// exponents with variable 0 most significant. Requires a nonzero polynomial.
  const std::pair<const Exponents, BigRat>& leading_term() const;

  /// Converts to a univariate polynomial in `var`; throws if other variables occur.
  UniPoly to_uni(std::size_t var) const;

  std::string str(const VarSpace& vars) const;
  std::string str() const { return str(VarSpace::standard(arity_)); }

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const BigRat& c);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(MultiPoly a, const BigRat& c) { return a *= c; }
  friend MultiPoly operator*(const BigRat& c, MultiPoly a) { return a *= c; }
  friend MultiPoly operator-(const MultiPoly& a) { return a * BigRat(-1); }
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.arity_ == b.arity_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

 private:
  void add_term(const Exponents& e, const BigRat& c);
  std::size_t arity_;
  Terms terms_;
};

MultiPoly pow(const MultiPoly& p, unsigned exp);

/// Parses the polynomial grammar over the given variables. Throws ParseError
/// (syntax, with offset), UnknownVariableError or ArityError.
MultiPoly parse_poly(std::string_view text, const VarSpace& vars);
/// Variables x, y0, ..., y_{arity-2}.
MultiPoly parse_poly(std::string_view text, std::size_t arity);
/// Univariate in x.
UniPoly parse_uni(std::string_view text);

class UnknownVariableError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Throws ArityError unless point.size() == f.arity().
BigRat eval_poly(const MultiPoly& f, std::span<const BigRat> point);

/// Precomputed evaluator for repeated evaluation of one polynomial.
class PolyEvaluator {
 public:
  explicit PolyEvaluator(const MultiPoly& f);
  BigRat operator()(std::span<const BigRat> point) const;
  std::size_t arity() const { return arity_; }

 private:
  struct Term {
    std::vector<std::pair<std::size_t, unsigned>> factors;
    BigRat coeff;
  };
  std::size_t arity_;
  std::vector<unsigned> max_degree_;
  std::vector<Term> terms_;
};

}  // namespace growthlab
