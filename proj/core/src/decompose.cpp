#include "growthlab/decompose.hpp"

#include <algorithm>
#include <cstdint>

namespace growthlab {

namespace {

std::vector<unsigned> divisors(unsigned n) {
  std::vector<unsigned> out;
  for (unsigned d = 1; d <= n; ++d) {
    if (n % d == 0) out.push_back(d);
  }
  return out;
}

unsigned total(const Exponents& e) {
  unsigned s = 0;
  for (unsigned v : e) s += v;
  return s;
}

bool graded_greater(const Exponents& a, const Exponents& b) {
  const unsigned ta = total(a);
  const unsigned tb = total(b);
  if (ta != tb) return ta > tb;
  return a > b;
}

MultiPoly single_term(std::size_t arity, const Exponents& e, const BigRat& c) {
  MultiPoly::Terms t;
  t.emplace(e, c);
  return MultiPoly(arity, t);
}

// A polynomial in x with coefficients in Q[ybar]; index = degree in x.
using XPoly = std::vector<MultiPoly>;

XPoly split_x(const MultiPoly& f) {
  const std::size_t m = f.arity() - 1;
  XPoly out(f.degree_in(0) + 1, MultiPoly(m));
  for (const auto& [e, c] : f.terms()) {
    Exponents ye(e.begin() + 1, e.end());
    out[e[0]] += single_term(m, ye, c);
  }
  return out;
}

bool all_zero(const XPoly& p) {
  return std::all_of(p.begin(), p.end(), [](const MultiPoly& q) { return q.is_zero(); });
}

// Digits a_i with f = sum a_i(ybar) h(x)^i, or nullopt when some digit
// depends on x. h must be monic.
std::optional<XPoly> h_adic(XPoly f, const UniPoly& h) {
  const std::size_t r = static_cast<std::size_t>(h.degree());
  const std::size_t m = f.front().arity();
  XPoly digits;
  while (!all_zero(f)) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
    XPoly quot;
    if (f.size() > r) {
      quot.assign(f.size() - r, MultiPoly(m));
      for (std::size_t k = quot.size(); k-- > 0;) {
        MultiPoly q = f[k + r];
        if (q.is_zero()) continue;
        for (std::size_t j = 0; j <= r; ++j) {
          if (!h.coeff(j).is_zero()) f[k + j] -= q * h.coeff(j);
        }
        quot[k] = std::move(q);
      }
    }
    for (std::size_t j = 1; j < std::min(r, f.size()); ++j) {
      if (!f[j].is_zero()) return std::nullopt;
    }
    digits.push_back(f.empty() ? MultiPoly(m) : f[0]);
    if (quot.empty()) break;
    f = std::move(quot);
  }
  return digits;
}

std::vector<BigRat> pseudo_random_point(std::size_t m, unsigned attempt) {
  std::vector<BigRat> pt(m);
  if (attempt == 0) return pt;
  if (attempt == 1) {
    for (auto& v : pt) v = BigRat(1);
    return pt;
  }
  std::uint64_t state = 0x243f6a8885a308d3ULL ^ (static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL);
  for (auto& v : pt) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    v = BigRat(static_cast<long>((state >> 33) % 201) - 100);
  }
  return pt;
}

// A point where `lead` does not vanish.
std::vector<BigRat> nonvanishing_point(const MultiPoly& lead) {
  const PolyEvaluator eval(lead);
  for (unsigned attempt = 0; attempt < 256; ++attempt) {
    auto pt = pseudo_random_point(lead.arity(), attempt);
    if (!eval(pt).is_zero()) return pt;
  }
  // Kronecker points: a nonzero polynomial with per-variable degree < B
  // cannot vanish at (z, z^B, z^(B^2), ...) for B^m + 1 consecutive z.
  unsigned b = 1;
  for (std::size_t i = 0; i < lead.arity(); ++i) b = std::max(b, lead.degree_in(i) + 1);
  for (long z = 2;; ++z) {
    std::vector<BigRat> pt(lead.arity());
    BigInt power = z;
    for (auto& v : pt) {
      v = BigRat(power);
      BigInt next;
      mpz_pow_ui(next.get_mpz_t(), power.get_mpz_t(), b);
      power = next;
    }
    if (!eval(pt).is_zero()) return pt;
  }
}

std::optional<AddMulForm> try_additive(const XPoly& a, const UniPoly& h) {
  const std::size_t e = a.size() - 1;
  if (e == 0 || !a[e].is_constant() || a[e].is_zero()) return std::nullopt;
  const std::size_t m = a[e].arity();
  const BigRat lead = a[e].constant_term();
  MultiPoly w = a[e - 1] * inverse(lead * BigRat(static_cast<long>(e)));
  MultiPoly s = w - MultiPoly::constant(m, w.constant_term());
  if (s.is_zero()) return std::nullopt;
  // G(u) = sum a_i (u - s)^i, by Horner in u.
  XPoly acc{a[e]};
  for (std::size_t i = e; i-- > 0;) {
    XPoly next(acc.size() + 1, MultiPoly(m));
    for (std::size_t j = 0; j < acc.size(); ++j) {
      next[j + 1] += acc[j];
      next[j] -= acc[j] * s;
    }
    next[0] += a[i];
    acc = std::move(next);
  }
  std::vector<BigRat> g(acc.size());
  for (std::size_t j = 0; j < acc.size(); ++j) {
    if (!acc[j].is_constant()) return std::nullopt;
    g[j] = acc[j].constant_term();
  }
  return AddMulForm{FormKind::additive, UniPoly(std::move(g)), h, std::move(s)};
}

// Digits are taken against the normalized inner u = h - h(0). A
// multiplicative form g((u + c) * s) shows up as a shifted expansion, so c is
// read off the top two digits and the digits are re-expanded in u + c.
std::optional<AddMulForm> try_multiplicative(const XPoly& a, const UniPoly& h) {
  const std::size_t e = a.size() - 1;
  if (e == 0 || a[e].is_constant()) return std::nullopt;
  const BigRat gamma = a[e].leading_term().second;
  const auto root = exact_poly_root(a[e] * inverse(gamma), static_cast<unsigned>(e));
  if (!root || root->is_constant()) return std::nullopt;
  const MultiPoly& s = *root;
  BigRat shift;
  if (!a[e - 1].is_zero() && a[e - 1].leading_term().first == a[e].leading_term().first) {
    shift = a[e - 1].leading_term().second / (gamma * BigRat(static_cast<long>(e)));
  }
  // b_j = sum_{i >= j} a_i C(i, j) (-shift)^(i - j)
  XPoly b(e + 1, MultiPoly(s.arity()));
  for (std::size_t i = 0; i <= e; ++i) {
    BigRat binom(1);
    BigRat power(1);
    for (std::size_t j = i + 1; j-- > 0;) {
      if (!a[i].is_zero()) b[j] += a[i] * (binom * power);
      if (j == 0) break;
      binom = binom * BigRat(static_cast<long>(j)) / BigRat(static_cast<long>(i - j + 1));
      power = power * -shift;
    }
  }
  std::vector<BigRat> g(e + 1);
  g[e] = gamma;
  MultiPoly s_pow = MultiPoly::constant(s.arity(), BigRat(1));
  for (std::size_t i = 0; i < e; ++i) {
    if (i > 0) s_pow = s_pow * s;
    if (b[i].is_zero()) continue;
    const BigRat ratio = b[i].leading_term().second / s_pow.leading_term().second;
    if (b[i] != s_pow * ratio) return std::nullopt;
    g[i] = ratio;
  }
  return AddMulForm{FormKind::multiplicative, UniPoly(std::move(g)), h + UniPoly::constant(shift), s};
}

}  // namespace

std::vector<BigRat> series_root_coefficients(const UniPoly& monic, unsigned k, unsigned count) {
  const int n = monic.degree();
  auto u = [&](int i) -> BigRat {
    if (i > n) return BigRat(0);
    return monic.coeff(static_cast<std::size_t>(n - i));
  };
  const BigRat alpha = BigRat(1) / BigRat(static_cast<long>(k));
  std::vector<BigRat> v(count + 1);
  v[0] = BigRat(1);
  for (unsigned j = 1; j <= count; ++j) {
    BigRat acc;
    for (unsigned i = 1; i <= j; ++i) {
      const BigRat ui = u(static_cast<int>(i));
      if (ui.is_zero()) continue;
      const BigRat weight = (alpha + BigRat(1)) * BigRat(static_cast<long>(i)) - BigRat(static_cast<long>(j));
      acc += weight * ui * v[j - i];
    }
    v[j] = acc / BigRat(static_cast<long>(j));
  }
  v.erase(v.begin());
  return v;
}

std::optional<Decomposition> decompose_at(const UniPoly& f, unsigned inner_degree) {
  const int n = f.degree();
  if (n < 1 || inner_degree == 0 || static_cast<unsigned>(n) % inner_degree != 0) return std::nullopt;
  const unsigned r = inner_degree;
  if (r == 1) return Decomposition{f, UniPoly::identity(), true};
  if (r == static_cast<unsigned>(n)) {
    return Decomposition{UniPoly(std::vector<BigRat>{f.coeff(0), f.leading()}), normalize_affine(f), true};
  }
  const unsigned outer_degree = static_cast<unsigned>(n) / r;
  const UniPoly monic = f * inverse(f.leading());
  const auto b = series_root_coefficients(monic, outer_degree, r - 1);
  std::vector<BigRat> inner_c(r + 1);
  inner_c[r] = BigRat(1);
  for (unsigned k = 1; k < r; ++k) inner_c[r - k] = b[k - 1];
  UniPoly inner(std::move(inner_c));

  std::vector<BigRat> outer_c;
  UniPoly q = f;
  while (!q.is_zero()) {
    auto [quot, rem] = divmod(q, inner);
    if (rem.degree() > 0) return std::nullopt;
    outer_c.push_back(rem.coeff(0));
    q = std::move(quot);
  }
  UniPoly outer(std::move(outer_c));
  if (outer.degree() != static_cast<int>(outer_degree)) return std::nullopt;
  return Decomposition{std::move(outer), std::move(inner), false};
}

std::vector<Decomposition> decompose_uni(const UniPoly& f) {
  std::vector<Decomposition> out;
  const int n = f.degree();
  if (n < 4) return out;
  auto divs = divisors(static_cast<unsigned>(n));
  std::reverse(divs.begin(), divs.end());
  for (unsigned r : divs) {
    if (r < 2 || r == static_cast<unsigned>(n) || static_cast<unsigned>(n) / r < 2) continue;
    if (auto d = decompose_at(f, r)) out.push_back(std::move(*d));
  }
  return out;
}

std::optional<MultiPoly> exact_poly_root(const MultiPoly& p, unsigned k) {
  const std::size_t m = p.arity();
  if (k == 0) return std::nullopt;
  if (p.is_zero() || k == 1) return p;
  const auto& [lead_e, lead_c] = p.leading_term();
  Exponents root_e(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (lead_e[i] % k != 0) return std::nullopt;
    root_e[i] = lead_e[i] / k;
  }
  BigRat root_c;
  if (!exact_root(lead_c, k, root_c)) return std::nullopt;
  MultiPoly root = single_term(m, root_e, root_c);
  // k * LT(root)^(k-1)
  Exponents denom_e(m);
  for (std::size_t i = 0; i < m; ++i) denom_e[i] = root_e[i] * (k - 1);
  const BigRat denom_c = BigRat(static_cast<long>(k)) * pow(root_c, k - 1);
  Exponents last = root_e;
  for (;;) {
    const MultiPoly diff = p - pow(root, k);
    if (diff.is_zero()) return root;
    const auto& [de, dc] = diff.leading_term();
    Exponents te(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (de[i] < denom_e[i]) return std::nullopt;
      te[i] = de[i] - denom_e[i];
    }
    if (!graded_greater(last, te)) return std::nullopt;
    root += single_term(m, te, dc / denom_c);
    last = te;
  }
}

std::string to_string(FormKind kind) {
  switch (kind) {
    case FormKind::additive: return "additive";
    case FormKind::multiplicative: return "multiplicative";
    case FormKind::none: return "none";
  }
  return "none";
}

MultiPoly recompose(const AddMulForm& form) {
  if (form.kind == FormKind::none || !form.s) throw PreconditionError("no witness to recompose");
  const MultiPoly& s = *form.s;
  const std::size_t arity = s.arity() + 1;
  MultiPoly::Terms shifted;
  for (const auto& [e, c] : s.terms()) {
    Exponents full(arity, 0);
    std::copy(e.begin(), e.end(), full.begin() + 1);
    shifted.emplace(full, c);
  }
  const MultiPoly s_full(arity, shifted);
  const MultiPoly h_full = MultiPoly::from_uni(form.h, arity, 0);
  const MultiPoly inner = form.kind == FormKind::additive ? h_full + s_full : h_full * s_full;
  MultiPoly acc(arity);
  const auto& g = form.g.coeffs();
  for (auto it = g.rbegin(); it != g.rend(); ++it) {
    acc = acc * inner;
    acc += MultiPoly::constant(arity, *it);
  }
  return acc;
}

AddMulForm detect_addmul(const MultiPoly& f) {
  if (f.arity() < 2) throw DegenerateError("polynomial has no y variables");
  if (!f.depends_on(0)) throw DegenerateError("polynomial is constant in x");
  bool depends_on_y = false;
  for (std::size_t i = 1; i < f.arity(); ++i) depends_on_y = depends_on_y || f.depends_on(i);
  if (!depends_on_y) throw DegenerateError("polynomial does not depend on the y variables");

  const XPoly x_coeffs = split_x(f);
  const unsigned deg_x = static_cast<unsigned>(x_coeffs.size() - 1);
  const auto point = nonvanishing_point(x_coeffs.back());
  std::vector<BigRat> special(x_coeffs.size());
  for (std::size_t i = 0; i < x_coeffs.size(); ++i) special[i] = eval_poly(x_coeffs[i], point);
  const UniPoly f0(std::move(special));

  struct Candidate {
    UniPoly h;
    XPoly digits;
  };
  std::vector<Candidate> candidates;
  for (unsigned r : divisors(deg_x)) {
    const auto dec = decompose_at(f0, r);
    if (!dec) continue;
    auto digits = h_adic(x_coeffs, dec->inner);
    if (!digits) continue;
    candidates.push_back({dec->inner, std::move(*digits)});
  }
  for (const auto& c : candidates) {
    if (auto form = try_additive(c.digits, c.h)) return *form;
  }
  for (const auto& c : candidates) {
    if (auto form = try_multiplicative(c.digits, c.h)) return *form;
  }
  return {};
}

}  // namespace growthlab
