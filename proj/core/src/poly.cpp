#include "growthlab/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace growthlab {

namespace {

const BigRat kZero{0};

unsigned total(const Exponents& e) {
  unsigned s = 0;
  for (unsigned v : e) s += v;
  return s;
}

// True when a precedes b in graded order (larger first).
bool graded_greater(const Exponents& a, const Exponents& b) {
  const unsigned ta = total(a);
  const unsigned tb = total(b);
  if (ta != tb) return ta > tb;
  return a > b;
}

void append_term(std::ostringstream& out, bool first, const BigRat& c, const std::string& mono) {
  const bool negative = c.sign() < 0;
  const BigRat mag = negative ? -c : c;
  if (first) {
    if (negative) out << '-';
  } else {
    out << (negative ? " - " : " + ");
  }
  if (mono.empty()) {
    out << mag.str();
  } else if (mag.is_one()) {
    out << mono;
  } else {
    out << mag.str() << '*' << mono;
  }
}

class Parser {
 public:
  Parser(std::string_view text, const VarSpace& vars) : text_(text), vars_(vars) {}

  MultiPoly parse() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    MultiPoly result = expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
    return result;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  MultiPoly expr() {
    MultiPoly acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  MultiPoly term() {
    MultiPoly acc = unary();
    while (accept('*')) acc = acc * unary();
    return acc;
  }

  MultiPoly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  MultiPoly power() {
    MultiPoly base = atom();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) throw ParseError("expected nonnegative integer exponent", start);
      if (pos_ - start > 6) throw ParseError("exponent too large", start);
      const unsigned e = static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start))));
      return pow(base, e);
    }
    return base;
  }

  std::string digits() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  MultiPoly atom() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      MultiPoly inner = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::string num = digits();
      BigInt den = 1;
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        const std::size_t den_pos = pos_;
        const std::string d = digits();
        if (d.empty()) throw ParseError("expected denominator", den_pos);
        den = BigInt(d);
        if (den == 0) throw ParseError("zero denominator", den_pos);
      }
      return MultiPoly::constant(vars_.size(), BigRat(BigInt(num), den));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      const int idx = vars_.index_of(name);
      if (idx >= 0) return MultiPoly::variable(vars_.size(), static_cast<std::size_t>(idx));
      if (is_grammar_variable(name)) {
        throw ArityError("variable '" + std::string(name) + "' not available with " +
                         std::to_string(vars_.size()) + " variables");
      }
      throw UnknownVariableError("unknown variable '" + std::string(name) + "'", start);
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  static bool is_grammar_variable(std::string_view name) {
    if (name == "x" || name == "d") return true;
    return name.size() == 2 && name[0] == 'y' && name[1] >= '0' && name[1] <= '9';
  }

  std::string_view text_;
  const VarSpace& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

// ---------------------------------------------------------------- UniPoly

UniPoly::UniPoly(std::vector<BigRat> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void UniPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

UniPoly UniPoly::constant(const BigRat& c) { return UniPoly(std::vector<BigRat>{c}); }

UniPoly UniPoly::monomial(unsigned degree, const BigRat& c) {
  std::vector<BigRat> v(degree + 1);
  v[degree] = c;
  return UniPoly(std::move(v));
}

const BigRat& UniPoly::coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : kZero; }

const BigRat& UniPoly::leading() const { return coeffs_.empty() ? kZero : coeffs_.back(); }

BigRat UniPoly::eval(const BigRat& x) const {
  BigRat acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= x;
    acc += *it;
  }
  return acc;
}

UniPoly UniPoly::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<BigRat> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * BigRat(static_cast<long>(i));
  return UniPoly(std::move(d));
}

std::string UniPoly::str(std::string_view var) const {
  if (coeffs_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const BigRat& c = coeffs_[static_cast<std::size_t>(i)];
    if (c.is_zero()) continue;
    std::string mono;
    if (i == 1) {
      mono = std::string(var);
    } else if (i > 1) {
      mono = std::string(var) + "^" + std::to_string(i);
    }
    append_term(out, first, c, mono);
    first = false;
  }
  return out.str();
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  trim();
  return *this;
}

UniPoly& UniPoly::operator-=(const UniPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  trim();
  return *this;
}

UniPoly& UniPoly::operator*=(const BigRat& c) {
  if (c.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  for (auto& v : coeffs_) v *= c;
  return *this;
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigRat> out(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return UniPoly(std::move(out));
}

UniPoly pow(const UniPoly& p, unsigned exp) {
  UniPoly result = UniPoly::constant(BigRat(1));
  UniPoly base = p;
  while (exp > 0) {
    if (exp & 1U) result = result * base;
    exp >>= 1U;
    if (exp > 0) base = base * base;
  }
  return result;
}

UniPoly compose(const UniPoly& outer, const UniPoly& inner) {
  UniPoly acc;
  const auto& c = outer.coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    acc = acc * inner;
    acc += UniPoly::constant(*it);
  }
  return acc;
}

std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
  if (b.is_zero()) throw ArithmeticError("polynomial division by zero");
  if (a.degree() < b.degree()) return {UniPoly{}, a};
  std::vector<BigRat> rem = a.coeffs();
  std::vector<BigRat> quot(static_cast<std::size_t>(a.degree() - b.degree() + 1));
  const BigRat lead_inv = inverse(b.leading());
  const std::size_t db = static_cast<std::size_t>(b.degree());
  for (std::size_t k = quot.size(); k-- > 0;) {
    const BigRat q = rem[k + db] * lead_inv;
    quot[k] = q;
    if (q.is_zero()) continue;
    for (std::size_t j = 0; j <= db; ++j) rem[k + j] -= q * b.coeff(j);
  }
  rem.resize(db);
  return {UniPoly(std::move(quot)), UniPoly(std::move(rem))};
}

UniPoly taylor_shift(const UniPoly& p, const BigRat& shift) {
  return compose(p, UniPoly(std::vector<BigRat>{shift, BigRat(1)}));
}

UniPoly scale_argument(const UniPoly& p, const BigRat& scale) {
  std::vector<BigRat> c = p.coeffs();
  BigRat factor{1};
  for (auto& v : c) {
    v *= factor;
    factor *= scale;
  }
  return UniPoly(std::move(c));
}

UniPoly normalize_affine(const UniPoly& p) {
  if (p.is_constant()) throw DegenerateError("cannot normalize a constant polynomial");
  std::vector<BigRat> c = p.coeffs();
  const BigRat lead_inv = inverse(p.leading());
  c[0] = BigRat(0);
  for (auto& v : c) v *= lead_inv;
  return UniPoly(std::move(c));
}

// ---------------------------------------------------------------- VarSpace

VarSpace VarSpace::standard(std::size_t arity) {
  std::vector<std::string> names{"x"};
  for (std::size_t i = 0; i + 1 < arity; ++i) names.push_back("y" + std::to_string(i));
  return VarSpace(std::move(names));
}

VarSpace VarSpace::surface_graph() { return VarSpace({"x", "d"}); }
VarSpace VarSpace::surface_implicit() { return VarSpace({"x", "d", "y0"}); }

int VarSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

// ---------------------------------------------------------------- MultiPoly

MultiPoly::MultiPoly(std::size_t arity, const Terms& terms) : arity_(arity) {
  for (const auto& [e, c] : terms) {
    if (e.size() != arity) throw ArityError("exponent vector length does not match arity");
    add_term(e, c);
  }
}

MultiPoly MultiPoly::constant(std::size_t arity, const BigRat& c) {
  MultiPoly p(arity);
  p.add_term(Exponents(arity, 0), c);
  return p;
}

MultiPoly MultiPoly::variable(std::size_t arity, std::size_t index) {
  if (index >= arity) throw ArityError("variable index out of range");
  MultiPoly p(arity);
  Exponents e(arity, 0);
  e[index] = 1;
  p.add_term(e, BigRat(1));
  return p;
}

MultiPoly MultiPoly::from_uni(const UniPoly& q, std::size_t arity, std::size_t var) {
  if (var >= arity) throw ArityError("variable index out of range");
  MultiPoly p(arity);
  for (std::size_t i = 0; i < q.coeffs().size(); ++i) {
    Exponents e(arity, 0);
    e[var] = static_cast<unsigned>(i);
    p.add_term(e, q.coeffs()[i]);
  }
  return p;
}

void MultiPoly::add_term(const Exponents& e, const BigRat& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

bool MultiPoly::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && total(terms_.begin()->first) == 0;
}

BigRat MultiPoly::constant_term() const {
  const auto it = terms_.find(Exponents(arity_, 0));
  return it == terms_.end() ? BigRat(0) : it->second;
}

unsigned MultiPoly::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

unsigned MultiPoly::total_degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, total(e));
  return d;
}

const std::pair<const Exponents, BigRat>& MultiPoly::leading_term() const {
  if (terms_.empty()) throw DegenerateError("zero polynomial has no leading term");
  auto best = terms_.begin();
  for (auto it = std::next(terms_.begin()); it != terms_.end(); ++it) {
    if (graded_greater(it->first, best->first)) best = it;
  }
  return *best;
}

UniPoly MultiPoly::to_uni(std::size_t var) const {
  std::vector<BigRat> c(degree_in(var) + 1);
  for (const auto& [e, v] : terms_) {
    for (std::size_t i = 0; i < arity_; ++i) {
      if (i != var && e[i] != 0) throw ArityError("polynomial is not univariate in the requested variable");
    }
    c[e[var]] = v;
  }
  return UniPoly(std::move(c));
}

std::string MultiPoly::str(const VarSpace& vars) const {
  if (vars.size() != arity_) throw ArityError("variable space does not match arity");
  if (terms_.empty()) return "0";
  std::vector<const Terms::value_type*> order;
  order.reserve(terms_.size());
  for (const auto& t : terms_) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const auto* a, const auto* b) { return graded_greater(a->first, b->first); });
  std::ostringstream out;
  bool first = true;
  for (const auto* t : order) {
    std::string mono;
    for (std::size_t i = 0; i < arity_; ++i) {
      const unsigned e = t->first[i];
      if (e == 0) continue;
      if (!mono.empty()) mono += '*';
      mono += vars.name(i);
      if (e > 1) mono += "^" + std::to_string(e);
    }
    append_term(out, first, t->second, mono);
    first = false;
  }
  return out.str();
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (o.arity_ != arity_) throw ArityError("arity mismatch in addition");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  if (o.arity_ != arity_) throw ArityError("arity mismatch in subtraction");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const BigRat& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.arity_ != b.arity_) throw ArityError("arity mismatch in multiplication");
  MultiPoly out(a.arity_);
  Exponents e(a.arity_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < a.arity_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

MultiPoly pow(const MultiPoly& p, unsigned exp) {
  MultiPoly result = MultiPoly::constant(p.arity(), BigRat(1));
  MultiPoly base = p;
  while (exp > 0) {
    if (exp & 1U) result = result * base;
    exp >>= 1U;
    if (exp > 0) base = base * base;
  }
  return result;
}

MultiPoly parse_poly(std::string_view text, const VarSpace& vars) { return Parser(text, vars).parse(); }

MultiPoly parse_poly(std::string_view text, std::size_t arity) {
  if (arity == 0 || arity > 11) throw ArityError("arity must be between 1 and 11");
  return parse_poly(text, VarSpace::standard(arity));
}

UniPoly parse_uni(std::string_view text) { return parse_poly(text, 1).to_uni(0); }

BigRat eval_poly(const MultiPoly& f, std::span<const BigRat> point) {
  return PolyEvaluator(f)(point);
}

PolyEvaluator::PolyEvaluator(const MultiPoly& f) : arity_(f.arity()), max_degree_(f.arity(), 0) {
  for (const auto& [e, c] : f.terms()) {
    Term t;
    t.coeff = c;
    for (std::size_t i = 0; i < arity_; ++i) {
      if (e[i] == 0) continue;
      t.factors.emplace_back(i, e[i]);
      max_degree_[i] = std::max(max_degree_[i], e[i]);
    }
    terms_.push_back(std::move(t));
  }
}

BigRat PolyEvaluator::operator()(std::span<const BigRat> point) const {
  if (point.size() != arity_) {
    throw ArityError("point has " + std::to_string(point.size()) + " coordinates, polynomial has arity " +
                     std::to_string(arity_));
  }
  std::vector<std::vector<BigRat>> powers(arity_);
  for (std::size_t i = 0; i < arity_; ++i) {
    if (max_degree_[i] == 0) continue;
    auto& pw = powers[i];
    pw.resize(max_degree_[i] + 1);
    pw[0] = BigRat(1);
    for (unsigned k = 1; k <= max_degree_[i]; ++k) pw[k] = pw[k - 1] * point[i];
  }
  BigRat acc;
  for (const auto& t : terms_) {
    BigRat v = t.coeff;
    for (const auto& [var, e] : t.factors) v *= powers[var][e];
    acc += v;
  }
  return acc;
}

}  // namespace growthlab
