#include "growthlab/exactnum.hpp"

#include <charconv>
#include <sstream>

namespace growthlab {

namespace {

inline void hash_mix(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

bool parse_int_token(std::string_view text, BigInt& out) {
  if (text.empty()) return false;
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (i == text.size()) return false;
  for (std::size_t j = i; j < text.size(); ++j) {
    if (text[j] < '0' || text[j] > '9') return false;
  }
  std::string digits(text.substr(text[0] == '+' ? 1 : 0));
  return out.set_str(digits, 10) == 0;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::size_t hash_bigint(const BigInt& v) noexcept {
  const mpz_srcptr z = v.get_mpz_t();
  std::size_t seed = static_cast<std::size_t>(z->_mp_size);
  const int n = z->_mp_size < 0 ? -z->_mp_size : z->_mp_size;
  for (int i = 0; i < n; ++i) hash_mix(seed, static_cast<std::size_t>(z->_mp_d[i]));
  return seed;
}

BigRat::BigRat(const BigInt& num, const BigInt& den) {
  if (sgn(den) == 0) throw ArithmeticError("zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

BigRat BigRat::parse(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  BigInt num;
  BigInt den = 1;
  if (slash == std::string_view::npos) {
    if (!parse_int_token(text, num)) throw ParseError("malformed rational '" + std::string(text) + "'", 0);
  } else {
    if (!parse_int_token(text.substr(0, slash), num)) {
      throw ParseError("malformed rational numerator '" + std::string(text) + "'", 0);
    }
    const auto den_text = text.substr(slash + 1);
    if (den_text.empty() || den_text[0] == '-' || den_text[0] == '+' || !parse_int_token(den_text, den)) {
      throw ParseError("malformed rational denominator '" + std::string(text) + "'", slash + 1);
    }
  }
  return BigRat(num, den);
}

std::string BigRat::str() const {
  if (q_.get_den() == 1) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

BigRat& BigRat::operator/=(const BigRat& o) {
  if (o.is_zero()) throw ArithmeticError("division by zero");
  q_ /= o.q_;
  return *this;
}

std::size_t BigRat::hash() const noexcept {
  std::size_t seed = hash_bigint(q_.get_num());
  hash_mix(seed, hash_bigint(q_.get_den()));
  return seed;
}

BigRat pow(const BigRat& base, unsigned exp) {
  BigInt n;
  BigInt d;
  mpz_pow_ui(n.get_mpz_t(), base.raw().get_num_mpz_t(), exp);
  mpz_pow_ui(d.get_mpz_t(), base.raw().get_den_mpz_t(), exp);
  return BigRat(n, d);
}

BigRat inverse(const BigRat& a) {
  if (a.is_zero()) throw ArithmeticError("inverse of zero");
  return BigRat(a.den(), a.num());
}

BigRat rat_arith(RatOp op, const BigRat& a, const BigRat& b) {
  switch (op) {
    case RatOp::add: return a + b;
    case RatOp::sub: return a - b;
    case RatOp::mul: return a * b;
    case RatOp::div: return a / b;
  }
  throw PreconditionError("unknown rational operation");
}

bool exact_root(const BigRat& value, unsigned k, BigRat& root) {
  if (k == 0) return false;
  if (k == 1) {
    root = value;
    return true;
  }
  const bool negative = value.sign() < 0;
  if (negative && k % 2 == 0) return false;
  BigInt num = value.num();
  if (negative) num = -num;
  const BigInt den = value.den();
  BigInt rn;
  BigInt rd;
  if (mpz_root(rn.get_mpz_t(), num.get_mpz_t(), k) == 0) return false;
  if (mpz_root(rd.get_mpz_t(), den.get_mpz_t(), k) == 0) return false;
  if (negative) rn = -rn;
  root = BigRat(rn, rd);
  return true;
}

BigInt TowerInt::value() const {
  if (e_ > 20) throw BudgetExceeded("tower value 2^(2^" + std::to_string(e_) + ") too large to evaluate");
  BigInt v;
  mpz_ui_pow_ui(v.get_mpz_t(), 2, 1UL << e_);
  return v;
}

std::string TowerInt::str() const { return "T(" + std::to_string(e_) + ")"; }

TowerInt TowerInt::parse(std::string_view text) {
  text = trim(text);
  if (text.size() < 4 || text.substr(0, 2) != "T(" || text.back() != ')') {
    throw ParseError("malformed tower '" + std::string(text) + "'", 0);
  }
  const auto body = text.substr(2, text.size() - 3);
  std::uint64_t e = 0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), e);
  if (ec != std::errc() || ptr != body.data() + body.size()) {
    throw ParseError("malformed tower exponent '" + std::string(text) + "'", 2);
  }
  return TowerInt(e);
}

TowerInt tower_pow(TowerInt t, std::uint64_t j) { return TowerInt(t.exponent() + j); }

BasisVector::BasisVector(const Coeffs& coeffs) {
  for (const auto& [i, m] : coeffs) {
    if (m != 0) coeffs_.emplace(i, m);
  }
}

BasisVector BasisVector::unit(std::uint32_t index, std::int64_t multiple) {
  BasisVector v;
  if (multiple != 0) v.coeffs_.emplace(index, multiple);
  return v;
}

std::int64_t BasisVector::coeff(std::uint32_t index) const {
  const auto it = coeffs_.find(index);
  return it == coeffs_.end() ? 0 : it->second;
}

std::string BasisVector::str() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [i, m] : coeffs_) {
    if (!first) out << ',';
    out << i << ':' << m;
    first = false;
  }
  return out.str();
}

BasisVector BasisVector::parse(std::string_view text) {
  text = trim(text);
  BasisVector v;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto pair = trim(text.substr(pos, end - pos));
    const auto colon = pair.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected i:m pair", pos);
    std::uint32_t index = 0;
    std::int64_t mult = 0;
    const auto idx = pair.substr(0, colon);
    const auto mul = pair.substr(colon + 1);
    auto r1 = std::from_chars(idx.data(), idx.data() + idx.size(), index);
    auto r2 = std::from_chars(mul.data(), mul.data() + mul.size(), mult);
    if (r1.ec != std::errc() || r1.ptr != idx.data() + idx.size() || r2.ec != std::errc() ||
        r2.ptr != mul.data() + mul.size()) {
      throw ParseError("malformed basis pair '" + std::string(pair) + "'", pos);
    }
    if (v.coeffs_.count(index) != 0) throw ParseError("repeated basis index", pos);
    if (mult != 0) v.coeffs_.emplace(index, mult);
    pos = end + 1;
  }
  return v;
}

std::size_t BasisVector::hash() const noexcept {
  std::size_t seed = coeffs_.size();
  for (const auto& [i, m] : coeffs_) {
    hash_mix(seed, std::hash<std::uint32_t>{}(i));
    hash_mix(seed, std::hash<std::int64_t>{}(m));
  }
  return seed;
}

BasisVector vec_add(const BasisVector& u, const BasisVector& v) {
  BasisVector::Coeffs out = u.coeffs();
  for (const auto& [i, m] : v.coeffs()) {
    auto [it, inserted] = out.emplace(i, m);
    if (!inserted) {
      it->second += m;
      if (it->second == 0) out.erase(it);
    }
  }
  return BasisVector(out);
}

BasisVector vec_neg(const BasisVector& u) {
  BasisVector::Coeffs out;
  for (const auto& [i, m] : u.coeffs()) out.emplace(i, -m);
  return BasisVector(out);
}

}  // namespace growthlab
