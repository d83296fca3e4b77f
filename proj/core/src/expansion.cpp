#include "growthlab/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "growthlab/parallel.hpp"

namespace growthlab {

namespace {

template <class T>
std::vector<T> dedup(const std::vector<T>& in) {
  std::unordered_set<T> seen;
  std::vector<T> out;
  out.reserve(in.size());
  for (const auto& v : in) {
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

template <class T>
std::uint64_t merged_size(std::vector<std::unordered_set<T>>& parts) {
  if (parts.empty()) return 0;
  auto& into = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    into.insert(parts[i].begin(), parts[i].end());
    parts[i].clear();
  }
  return into.size();
}

const std::vector<BigRat>& rationals_or_throw(const FiniteSet& s, const char* what) {
  if (s.kind() != ElementKind::rational) {
    throw PreconditionError(std::string(what) + " requires rational elements, got " + to_string(s.kind()));
  }
  return s.rationals();
}

double log_of(const BigInt& v) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace

std::string to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::rational: return "rational";
    case ElementKind::tower: return "tower";
    case ElementKind::vector: return "vector";
  }
  return "rational";
}

FiniteSet FiniteSet::of_rationals(const std::vector<BigRat>& elems) { return FiniteSet(Storage(dedup(elems))); }
FiniteSet FiniteSet::of_towers(const std::vector<TowerInt>& elems) { return FiniteSet(Storage(dedup(elems))); }
FiniteSet FiniteSet::of_vectors(const std::vector<BasisVector>& elems) { return FiniteSet(Storage(dedup(elems))); }

FiniteSet FiniteSet::integer_range(long lo, long hi) {
  std::vector<BigRat> v;
  for (long i = lo; i <= hi; ++i) v.emplace_back(i);
  return of_rationals(v);
}

FiniteSet FiniteSet::parse(std::istream& in, std::optional<ElementKind> kind) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    lines.push_back(line.substr(first, last - first + 1));
  }
  if (!kind) {
    if (lines.empty()) {
      kind = ElementKind::rational;
    } else if (lines.front().rfind("T(", 0) == 0) {
      kind = ElementKind::tower;
    } else if (lines.front().find(':') != std::string::npos) {
      kind = ElementKind::vector;
    } else {
      kind = ElementKind::rational;
    }
  }
  switch (*kind) {
    case ElementKind::rational: {
      std::vector<BigRat> v;
      for (const auto& l : lines) v.push_back(BigRat::parse(l));
      return of_rationals(v);
    }
    case ElementKind::tower: {
      std::vector<TowerInt> v;
      for (const auto& l : lines) v.push_back(TowerInt::parse(l));
      return of_towers(v);
    }
    case ElementKind::vector: {
      std::vector<BasisVector> v;
      for (const auto& l : lines) v.push_back(BasisVector::parse(l));
      return of_vectors(v);
    }
  }
  return {};
}

void FiniteSet::write(std::ostream& out) const {
  std::visit(
      [&](const auto& elems) {
        for (const auto& e : elems) {
          std::string text = e.str();
          if (text.empty()) text = "0:0";
          out << text << '\n';
        }
      },
      elems_);
}

std::size_t FiniteSet::size() const {
  return std::visit([](const auto& v) { return v.size(); }, elems_);
}

const std::vector<BigRat>& FiniteSet::rationals() const {
  if (const auto* v = std::get_if<std::vector<BigRat>>(&elems_)) return *v;
  throw PreconditionError("set is not rational");
}

const std::vector<TowerInt>& FiniteSet::towers() const {
  if (const auto* v = std::get_if<std::vector<TowerInt>>(&elems_)) return *v;
  throw PreconditionError("set is not a tower set");
}

const std::vector<BasisVector>& FiniteSet::vectors() const {
  if (const auto* v = std::get_if<std::vector<BasisVector>>(&elems_)) return *v;
  throw PreconditionError("set is not a vector set");
}

std::optional<TowerFamily> as_tower_family(const PolyFamily& family) {
  TowerFamily out;
  for (const auto& p : family.members()) {
    const int d = p.degree();
    if (d < 1 || (d & (d - 1)) != 0) return std::nullopt;
    if (!p.leading().is_one()) return std::nullopt;
    for (int i = 0; i < d; ++i) {
      if (!p.coeff(static_cast<std::size_t>(i)).is_zero()) return std::nullopt;
    }
    std::uint64_t j = 0;
    while ((1 << j) < d) ++j;
    out.log2_degrees.push_back(j);
  }
  return out;
}

std::uint64_t image_size(const PolyFamily& family, const FiniteSet& a, unsigned threads) {
  if (a.kind() == ElementKind::tower) {
    const auto tf = as_tower_family(family);
    if (!tf) throw PreconditionError("tower sets require a family of monomials x^(2^j)");
    return image_size(*tf, a);
  }
  const auto& elems = rationals_or_throw(a, "image_size");
  const auto& members = family.members();
  std::vector<std::unordered_set<BigRat>> parts(resolve_threads(threads));
  const std::size_t used = parallel_chunks(elems.size(), threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    auto& out = parts[c];
    for (std::size_t i = lo; i < hi; ++i) {
      for (const auto& f : members) out.insert(f.eval(elems[i]));
    }
  });
  parts.resize(used);
  return merged_size(parts);
}

std::uint64_t image_size(const TowerFamily& family, const FiniteSet& a) {
  if (a.kind() != ElementKind::tower) throw PreconditionError("tower family requires a tower set");
  std::unordered_set<std::uint64_t> out;
  for (const auto& t : a.towers()) {
    for (std::uint64_t j : family.log2_degrees) {
      if (t.exponent() > std::numeric_limits<std::uint64_t>::max() - j) throw BudgetExceeded("tower exponent overflow");
      out.insert(tower_pow(t, j).exponent());
    }
  }
  return out.size();
}

std::uint64_t image_size_multi(const MultiPoly& f, const FiniteSet& a, std::span<const FiniteSet> bs,
                               unsigned threads) {
  if (f.arity() != 1 + bs.size()) {
    throw ArityError("polynomial arity " + std::to_string(f.arity()) + " does not match 1 + " +
                     std::to_string(bs.size()) + " sets");
  }
  const auto& as = rationals_or_throw(a, "image_size_multi");
  std::vector<const std::vector<BigRat>*> cols;
  for (const auto& b : bs) cols.push_back(&rationals_or_throw(b, "image_size_multi"));
  for (const auto* c : cols) {
    if (c->empty()) return 0;
  }
  const PolyEvaluator eval(f);
  std::vector<std::unordered_set<BigRat>> parts(resolve_threads(threads));
  const std::size_t used = parallel_chunks(as.size(), threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    auto& out = parts[c];
    std::vector<BigRat> point(f.arity());
    std::vector<std::size_t> idx(cols.size());
    for (std::size_t i = lo; i < hi; ++i) {
      point[0] = as[i];
      std::fill(idx.begin(), idx.end(), 0);
      for (;;) {
        for (std::size_t j = 0; j < cols.size(); ++j) point[j + 1] = (*cols[j])[idx[j]];
        out.insert(eval(point));
        std::size_t j = 0;
        while (j < cols.size() && ++idx[j] == cols[j]->size()) idx[j++] = 0;
        if (j == cols.size()) break;
      }
    }
  });
  parts.resize(used);
  return merged_size(parts);
}

SurfaceSpec SurfaceSpec::graph(MultiPoly f) {
  if (f.arity() != 2) throw ArityError("graph surfaces take a polynomial in (x, d)");
  return {SurfaceMode::graph, std::move(f)};
}

SurfaceSpec SurfaceSpec::implicit(MultiPoly f) {
  if (f.arity() != 3) throw ArityError("implicit surfaces take a polynomial in (x, d, y0)");
  return {SurfaceMode::implicit, std::move(f)};
}

SurfaceSpec SurfaceSpec::parse_graph(std::string_view text) {
  return graph(parse_poly(text, VarSpace::surface_graph()));
}

SurfaceSpec SurfaceSpec::parse_implicit(std::string_view text) {
  return implicit(parse_poly(text, VarSpace::surface_implicit()));
}

std::uint64_t incidence_surface(const SurfaceSpec& u, const FiniteSet& a, const FiniteSet& d, const FiniteSet& b,
                                unsigned threads) {
  const auto& as = rationals_or_throw(a, "incidence_surface");
  const auto& ds = rationals_or_throw(d, "incidence_surface");
  const auto& bs = rationals_or_throw(b, "incidence_surface");
  const PolyEvaluator eval(u.poly);
  std::vector<std::uint64_t> counts(resolve_threads(threads), 0);
  if (u.mode == SurfaceMode::graph) {
    if (u.poly.arity() != 2) throw ArityError("graph surface must have arity 2");
    const std::unordered_set<BigRat> targets(bs.begin(), bs.end());
    parallel_chunks(as.size(), threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      std::vector<BigRat> point(2);
      std::uint64_t n = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        point[0] = as[i];
        for (const auto& dv : ds) {
          point[1] = dv;
          n += targets.count(eval(point));
        }
      }
      counts[c] = n;
    });
  } else {
    if (u.poly.arity() != 3) throw ArityError("implicit surface must have arity 3");
    parallel_chunks(as.size(), threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      std::vector<BigRat> point(3);
      std::uint64_t n = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        point[0] = as[i];
        for (const auto& dv : ds) {
          point[1] = dv;
          for (const auto& bv : bs) {
            point[2] = bv;
            if (eval(point).is_zero()) ++n;
          }
        }
      }
      counts[c] = n;
    });
  }
  std::uint64_t total = 0;
  for (auto v : counts) total += v;
  return total;
}

CoarseDim coarse_dim(std::uint64_t size, double xi) {
  if (size < 1) throw PreconditionError("coarse_dim requires size >= 1");
  if (!(xi > 1.0)) throw PreconditionError("coarse_dim requires xi > 1");
  return {std::log(static_cast<double>(size)) / std::log(xi), xi, size};
}

CoarseDim coarse_dim(const BigInt& size, double xi) {
  if (size < 1) throw PreconditionError("coarse_dim requires size >= 1");
  if (!(xi > 1.0)) throw PreconditionError("coarse_dim requires xi > 1");
  const std::uint64_t saturated =
      size.fits_ulong_p() ? size.get_ui() : std::numeric_limits<std::uint64_t>::max();
  return {log_of(size) / std::log(xi), xi, saturated};
}

ExponentFit fit_exponent(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& points) {
  if (points.size() < 2) throw PreconditionError("fit_exponent needs at least 2 points");
  std::set<std::uint64_t> seen;
  for (const auto& [n, m] : points) {
    if (n < 1 || m < 1) throw PreconditionError("fit_exponent needs n, m >= 1");
    if (!seen.insert(n).second) throw PreconditionError("fit_exponent got a repeated n = " + std::to_string(n));
  }
  const double k = static_cast<double>(points.size());
  double sx = 0;
  double sy = 0;
  for (const auto& [n, m] : points) {
    sx += std::log(static_cast<double>(n));
    sy += std::log(static_cast<double>(m));
  }
  const double mx = sx / k;
  const double my = sy / k;
  double sxx = 0;
  double sxy = 0;
  for (const auto& [n, m] : points) {
    const double dx = std::log(static_cast<double>(n)) - mx;
    const double dy = std::log(static_cast<double>(m)) - my;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (const auto& [n, m] : points) {
    const double r = std::log(static_cast<double>(m)) - (fit.intercept + fit.slope * std::log(static_cast<double>(n)));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / k);
  fit.points = points;
  return fit;
}

double eta_unbalanced_er(std::uint64_t m, double eps, double c_prime) {
  if (m < 1 || !(eps > 0) || !(c_prime > 0)) throw PreconditionError("eta_unbalanced_er needs m >= 1, eps > 0, c' > 0");
  const double md = static_cast<double>(m);
  return std::exp2(-c_prime / eps) / (md * md);
}

double eta0_main1d(double eps, double c) {
  if (!(eps > 0) || eps > 1 || !(c > 0)) throw PreconditionError("eta0_main1d needs eps in (0,1] and c > 0");
  c = std::min(c, 1.0);
  return eps / (1.0 + 1.0 / eps) * std::exp2(-4.0 / (c * eps) + 7.0);
}

double delta_jz(const BoundParams& p) {
  if (!(p.gamma > 0) || !(p.gamma_prime > 0) || !(p.r > 0) || p.k < 1 || !(p.c > 0)) {
    throw PreconditionError("delta_jz needs gamma, gamma', r, k, c > 0");
  }
  const double k = static_cast<double>(p.k);
  const double first = p.gamma_prime / k;
  const double ceil_term = std::ceil(2.0 * k * p.r / (p.c * p.gamma));
  const double second = std::ldexp(1.0, -static_cast<int>(ceil_term) - 2);
  return std::min(first, second);
}

std::uint64_t gp_statistic(const FiniteSet& a, const std::vector<UniPoly>& probes) {
  const auto& elems = rationals_or_throw(a, "gp_statistic");
  std::uint64_t best = 0;
  for (const auto& p : probes) {
    if (p.is_constant()) throw DegenerateError("constant probe");
    std::unordered_map<BigRat, std::uint64_t> fibers;
    for (const auto& v : elems) best = std::max(best, ++fibers[p.eval(v)]);
  }
  return best;
}

FiniteSet iterated_sumset(const FiniteSet& a, unsigned k, std::size_t budget) {
  if (k < 1) throw PreconditionError("iterated_sumset needs k >= 1");
  if (a.kind() == ElementKind::tower) throw PreconditionError("tower elements do not support addition");
  if (a.size() > budget) throw BudgetExceeded("sumset budget exceeded");
  auto grow = [&](const auto& base, auto add) {
    using T = typename std::decay_t<decltype(base)>::value_type;
    std::vector<T> current = base;
    for (unsigned step = 1; step < k; ++step) {
      std::unordered_set<T> next;
      for (const auto& x : current) {
        for (const auto& y : base) {
          next.insert(add(x, y));
          if (next.size() > budget) throw BudgetExceeded("sumset budget exceeded");
        }
      }
      current.assign(next.begin(), next.end());
    }
    std::sort(current.begin(), current.end());
    return current;
  };
  if (a.kind() == ElementKind::rational) {
    return FiniteSet::of_rationals(grow(a.rationals(), [](const BigRat& x, const BigRat& y) { return x + y; }));
  }
  return FiniteSet::of_vectors(grow(a.vectors(), [](const BasisVector& x, const BasisVector& y) { return vec_add(x, y); }));
}

}  // namespace growthlab
