#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "growthlab/errors.hpp"

namespace growthlab {

using BigInt = mpz_class;

std::size_t hash_bigint(const BigInt& v) noexcept;

/// Exact rational number kept in lowest terms with a positive denominator.
class BigRat {
 public:
  BigRat() = default;
  BigRat(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
  BigRat(int v) : q_(v) {}   // NOLINT(google-explicit-constructor)
  explicit BigRat(const BigInt& v) : q_(v) {}
  /// Throws ArithmeticError when `den` is zero.
  BigRat(const BigInt& num, const BigInt& den);

  /// Accepts "p" or "p/q" with optional leading sign.
  static BigRat parse(std::string_view text);

  BigInt num() const { return q_.get_num(); }
  BigInt den() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }

  bool is_zero() const { return sgn(q_) == 0; }
  bool is_one() const { return q_ == 1; }
  bool is_integer() const { return q_.get_den() == 1; }
  int sign() const { return sgn(q_); }
  double to_double() const { return q_.get_d(); }

  /// "p/q", or "p" when the denominator is 1.
  std::string str() const;

  BigRat& operator+=(const BigRat& o) { q_ += o.q_; return *this; }
  BigRat& operator-=(const BigRat& o) { q_ -= o.q_; return *this; }
  BigRat& operator*=(const BigRat& o) { q_ *= o.q_; return *this; }
  BigRat& operator/=(const BigRat& o);

  friend BigRat operator+(BigRat a, const BigRat& b) { return a += b; }
  friend BigRat operator-(BigRat a, const BigRat& b) { return a -= b; }
  friend BigRat operator*(BigRat a, const BigRat& b) { return a *= b; }
  friend BigRat operator/(BigRat a, const BigRat& b) { return a /= b; }
  friend BigRat operator-(const BigRat& a) { return BigRat(mpq_class(-a.q_)); }

  friend bool operator==(const BigRat& a, const BigRat& b) { return a.q_ == b.q_; }
  friend bool operator!=(const BigRat& a, const BigRat& b) { return a.q_ != b.q_; }
  friend bool operator<(const BigRat& a, const BigRat& b) { return a.q_ < b.q_; }
  friend bool operator<=(const BigRat& a, const BigRat& b) { return a.q_ <= b.q_; }
  friend bool operator>(const BigRat& a, const BigRat& b) { return a.q_ > b.q_; }
  friend bool operator>=(const BigRat& a, const BigRat& b) { return a.q_ >= b.q_; }

  std::size_t hash() const noexcept;

 private:
  explicit BigRat(mpq_class q) : q_(std::move(q)) {}
  mpq_class q_;
};

BigRat pow(const BigRat& base, unsigned exp);
BigRat inverse(const BigRat& a);

enum class RatOp { add, sub, mul, div };

/// Single entry point for the four field operations; division by zero throws
/// ArithmeticError.
BigRat rat_arith(RatOp op, const BigRat& a, const BigRat& b);

/// Exact rational k-th root, if one exists. For even k the nonnegative root
/// is returned; negative radicands have no even root.
bool exact_root(const BigRat& value, unsigned k, BigRat& root);

/// The integer 2^(2^e). Only power-of-two exponentiation is supported.
class TowerInt {
 public:
  TowerInt() = default;
  explicit TowerInt(std::uint64_t e) : e_(e) {}

  std::uint64_t exponent() const { return e_; }
  /// Direct evaluation; refuses e > 20 (2^(2^20) has a million bits).
  BigInt value() const;
  /// "T(e)"
  std::string str() const;
  static TowerInt parse(std::string_view text);

  friend bool operator==(TowerInt a, TowerInt b) { return a.e_ == b.e_; }
  friend bool operator!=(TowerInt a, TowerInt b) { return a.e_ != b.e_; }
  friend bool operator<(TowerInt a, TowerInt b) { return a.e_ < b.e_; }

 private:
  std::uint64_t e_ = 0;
};

/// (2^(2^e))^(2^j) = 2^(2^(e+j)).
TowerInt tower_pow(TowerInt t, std::uint64_t j);

/// Integer combination sum m_i * a_i of formal, linearly independent basis
/// elements a_i. Zero coefficients are never stored.
class BasisVector {
 public:
  using Coeffs = std::map<std::uint32_t, std::int64_t>;

  BasisVector() = default;
  explicit BasisVector(const Coeffs& coeffs);
  static BasisVector unit(std::uint32_t index, std::int64_t multiple = 1);

  const Coeffs& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  std::int64_t coeff(std::uint32_t index) const;

  /// Comma-separated "i:m" pairs sorted by i; the zero vector prints as "".
  std::string str() const;
  static BasisVector parse(std::string_view text);

  friend bool operator==(const BasisVector& a, const BasisVector& b) {
    return a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const BasisVector& a, const BasisVector& b) { return !(a == b); }
  friend bool operator<(const BasisVector& a, const BasisVector& b) {
    return a.coeffs_ < b.coeffs_;
  }

  std::size_t hash() const noexcept;

 private:
  Coeffs coeffs_;
};

BasisVector vec_add(const BasisVector& u, const BasisVector& v);
BasisVector vec_neg(const BasisVector& u);

}  // namespace growthlab

template <>
struct std::hash<growthlab::BigRat> {
  std::size_t operator()(const growthlab::BigRat& v) const noexcept { return v.hash(); }
};

template <>
struct std::hash<growthlab::TowerInt> {
  std::size_t operator()(growthlab::TowerInt v) const noexcept {
    return std::hash<std::uint64_t>{}(v.exponent());
  }
};

template <>
struct std::hash<growthlab::BasisVector> {
  std::size_t operator()(const growthlab::BasisVector& v) const noexcept { return v.hash(); }
};
