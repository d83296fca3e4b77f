#include "growthlab/groupaction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "growthlab/errors.hpp"
#include "growthlab/parallel.hpp"

namespace growthlab {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::int64_t parse_int(std::string_view text) {
  const std::string_view t = trim(text);
  std::int64_t v = 0;
  const char* first = t.data();
  if (!t.empty() && t.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    const std::size_t off = ec == std::errc() ? static_cast<std::size_t>(ptr - t.data()) : 0;
    throw ParseError("expected an integer in '" + std::string(text) + "'", off);
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == ',' || text[i] == '\t')) ++i;
    const std::size_t b = i;
    while (i < text.size() && text[i] != ' ' && text[i] != ',' && text[i] != '\t') ++i;
    if (i > b) out.push_back(text.substr(b, i - b));
  }
  return out;
}

std::uint64_t mod(std::int64_t v, std::uint64_t p) {
  const std::int64_t m = static_cast<std::int64_t>(p);
  return static_cast<std::uint64_t>(((v % m) + m) % m);
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t p) {
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(p), new_r = static_cast<std::int64_t>(a % p);
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (r != 1) throw ArithmeticError("no inverse modulo " + std::to_string(p));
  return mod(t, p);
}

std::vector<Code> sorted_unique(std::vector<Code> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void require_role(const ActionSubset& s, Role role, const char* what) {
  if (s.role != role) throw PreconditionError(std::string("role mismatch: ") + what);
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::string GroupAction::element_str(Code g) const { return std::to_string(g); }

Code GroupAction::parse_element(std::string_view text) const {
  const std::int64_t v = parse_int(text);
  if (v < 0 || static_cast<std::uint64_t>(v) >= group_order()) {
    throw PreconditionError("element index out of range: " + std::string(trim(text)));
  }
  return static_cast<Code>(v);
}

std::string GroupAction::point_str(Code x) const { return std::to_string(x); }

Code GroupAction::parse_point(std::string_view text) const {
  const std::int64_t v = parse_int(text);
  if (v < 0 || static_cast<std::uint64_t>(v) >= point_count()) {
    throw PreconditionError("point index out of range: " + std::string(trim(text)));
  }
  return static_cast<Code>(v);
}

// CyclicAdd

CyclicAdd::CyclicAdd(std::uint64_t n) : n_(n) {
  if (n == 0) throw PreconditionError("cyclic group order must be positive");
}

std::string CyclicAdd::name() const { return "CyclicAdd(" + std::to_string(n_) + ")"; }

Code CyclicAdd::parse_element(std::string_view text) const { return mod(parse_int(text), n_); }

// Agl1

Agl1::Agl1(std::uint64_t p) : p_(p) {
  if (p >= (std::uint64_t{1} << 31) || !is_prime(p)) {
    throw PreconditionError("Agl1 needs a prime modulus below 2^31, got " + std::to_string(p));
  }
}

std::string Agl1::name() const { return "Agl1(" + std::to_string(p_) + ")"; }

Code Agl1::encode(std::uint64_t a, std::uint64_t b) const {
  a %= p_;
  b %= p_;
  if (a == 0) throw PreconditionError("Agl1 element needs a != 0");
  return (a - 1) * p_ + b;
}

Code Agl1::mul(Code g, Code h) const {
  const std::uint64_t a1 = g / p_ + 1, b1 = g % p_;
  const std::uint64_t a2 = h / p_ + 1, b2 = h % p_;
  return encode(mulmod(a1, a2, p_), (mulmod(a1, b2, p_) + b1) % p_);
}

Code Agl1::inv(Code g) const {
  const std::uint64_t a = g / p_ + 1, b = g % p_;
  const std::uint64_t ai = invmod(a, p_);
  return encode(ai, (p_ - mulmod(ai, b, p_)) % p_);
}

Code Agl1::act(Code g, Code x) const {
  const std::uint64_t a = g / p_ + 1, b = g % p_;
  return (mulmod(a, x, p_) + b) % p_;
}

std::string Agl1::element_str(Code g) const {
  return std::to_string(g / p_ + 1) + "," + std::to_string(g % p_);
}

Code Agl1::parse_element(std::string_view text) const {
  const auto f = split_fields(text);
  if (f.size() != 2) throw ParseError("Agl1 element needs 'a,b'", 0);
  return encode(mod(parse_int(f[0]), p_), mod(parse_int(f[1]), p_));
}

// Psl2

Psl2::Psl2(std::uint64_t p) : p_(p) {
  if (p < 3 || p > 127 || !is_prime(p)) {
    throw PreconditionError("Psl2 needs an odd prime up to 127, got " + std::to_string(p));
  }
  std::set<std::uint64_t> packed;
  const auto P = static_cast<std::uint32_t>(p);
  for (std::uint32_t a = 0; a < P; ++a) {
    for (std::uint32_t b = 0; b < P; ++b) {
      if (a != 0) {
        for (std::uint32_t c = 0; c < P; ++c) {
          const auto d = static_cast<std::uint32_t>(mulmod((1 + mulmod(b, c, p)) % p, invmod(a, p), p));
          packed.insert(pack(normalize({a, b, c, d})));
        }
      } else if (b != 0) {
        const auto c = static_cast<std::uint32_t>((p - invmod(b, p)) % p);
        for (std::uint32_t d = 0; d < P; ++d) packed.insert(pack(normalize({a, b, c, d})));
      }
    }
  }
  mats_.reserve(packed.size());
  for (std::uint64_t k : packed) {
    const auto d = static_cast<std::uint32_t>(k % p);
    const auto c = static_cast<std::uint32_t>(k / p % p);
    const auto b = static_cast<std::uint32_t>(k / p / p % p);
    const auto a = static_cast<std::uint32_t>(k / p / p / p);
    index_.emplace(k, mats_.size());
    mats_.push_back({a, b, c, d});
  }
  identity_ = lookup({1, 0, 0, 1});
}

std::string Psl2::name() const { return "Psl2(" + std::to_string(p_) + ")"; }

Psl2::Mat Psl2::normalize(Mat m) const {
  const std::uint32_t first = m.a != 0 ? m.a : (m.b != 0 ? m.b : (m.c != 0 ? m.c : m.d));
  if (first > (p_ - 1) / 2) {
    const auto neg = [&](std::uint32_t v) { return static_cast<std::uint32_t>((p_ - v) % p_); };
    m = {neg(m.a), neg(m.b), neg(m.c), neg(m.d)};
  }
  return m;
}

std::uint64_t Psl2::pack(const Mat& m) const { return ((m.a * p_ + m.b) * p_ + m.c) * p_ + m.d; }

Code Psl2::lookup(const Mat& m) const {
  auto it = index_.find(pack(normalize(m)));
  if (it == index_.end()) throw PreconditionError("matrix does not have determinant 1");
  return it->second;
}

Code Psl2::encode(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) const {
  const Mat m{static_cast<std::uint32_t>(mod(a, p_)), static_cast<std::uint32_t>(mod(b, p_)),
              static_cast<std::uint32_t>(mod(c, p_)), static_cast<std::uint32_t>(mod(d, p_))};
  const std::uint64_t det = (mulmod(m.a, m.d, p_) + p_ - mulmod(m.b, m.c, p_)) % p_;
  if (det != 1) throw PreconditionError("matrix does not have determinant 1");
  return lookup(m);
}

Code Psl2::mul(Code g, Code h) const {
  const Mat& x = mats_[g];
  const Mat& y = mats_[h];
  const auto e = [&](std::uint64_t u, std::uint64_t v, std::uint64_t w, std::uint64_t z) {
    return static_cast<std::uint32_t>((u * v + w * z) % p_);
  };
  return lookup({e(x.a, y.a, x.b, y.c), e(x.a, y.b, x.b, y.d), e(x.c, y.a, x.d, y.c), e(x.c, y.b, x.d, y.d)});
}

Code Psl2::inv(Code g) const {
  const Mat& m = mats_[g];
  const auto neg = [&](std::uint32_t v) { return static_cast<std::uint32_t>((p_ - v) % p_); };
  return lookup({m.d, neg(m.b), neg(m.c), m.a});
}

Code Psl2::act(Code g, Code x) const {
  const Mat& m = mats_[g];
  if (x == p_) return m.c == 0 ? p_ : mulmod(m.a, invmod(m.c, p_), p_);
  const std::uint64_t den = (mulmod(m.c, x, p_) + m.d) % p_;
  if (den == 0) return p_;
  const std::uint64_t num = (mulmod(m.a, x, p_) + m.b) % p_;
  return mulmod(num, invmod(den, p_), p_);
}

std::string Psl2::element_str(Code g) const {
  const Mat& m = mats_.at(g);
  return std::to_string(m.a) + " " + std::to_string(m.b) + " " + std::to_string(m.c) + " " + std::to_string(m.d);
}

Code Psl2::parse_element(std::string_view text) const {
  const auto f = split_fields(text);
  if (f.size() != 4) throw ParseError("Psl2 element needs four matrix entries", 0);
  return encode(parse_int(f[0]), parse_int(f[1]), parse_int(f[2]), parse_int(f[3]));
}

std::string Psl2::point_str(Code x) const { return x == p_ ? "inf" : std::to_string(x); }

Code Psl2::parse_point(std::string_view text) const {
  if (trim(text) == "inf") return p_;
  return GroupAction::parse_point(text);
}

// PermAction

PermAction::PermAction(std::vector<std::vector<std::uint32_t>> perms) : perms_(std::move(perms)) {
  if (perms_.empty()) throw PreconditionError("permutation group must be nonempty");
  points_ = perms_.front().size();
  if (points_ == 0) throw PreconditionError("permutation group needs at least one point");
  std::vector<std::uint32_t> id(points_);
  std::iota(id.begin(), id.end(), 0u);
  for (std::size_t i = 0; i < perms_.size(); ++i) {
    const auto& p = perms_[i];
    if (p.size() != points_) throw PreconditionError("permutation " + std::to_string(i) + " has the wrong length");
    std::vector<bool> seen(points_, false);
    for (std::uint32_t v : p) {
      if (v >= points_ || seen[v]) throw PreconditionError("permutation " + std::to_string(i) + " is not bijective");
      seen[v] = true;
    }
    if (!index_.emplace(p, i).second) throw PreconditionError("permutation " + std::to_string(i) + " is repeated");
  }
  auto it = index_.find(id);
  if (it == index_.end()) throw PreconditionError("permutation group lacks the identity");
  identity_ = it->second;
  inverse_.resize(perms_.size());
  for (std::size_t i = 0; i < perms_.size(); ++i) {
    std::vector<std::uint32_t> q(points_);
    for (std::uint32_t x = 0; x < points_; ++x) q[perms_[i][x]] = x;
    inverse_[i] = lookup(q);
    for (std::size_t j = 0; j < perms_.size(); ++j) mul(i, j);
  }
}

Code PermAction::lookup(const std::vector<std::uint32_t>& perm) const {
  auto it = index_.find(perm);
  if (it == index_.end()) throw PreconditionError("permutation list is not closed under composition and inverses");
  return it->second;
}

Code PermAction::mul(Code g, Code h) const {
  std::vector<std::uint32_t> q(points_);
  for (std::uint32_t x = 0; x < points_; ++x) q[x] = perms_[g][perms_[h][x]];
  return lookup(q);
}

Code PermAction::inv(Code g) const { return inverse_[g]; }

std::string PermAction::name() const {
  return "PermAction(" + std::to_string(points_) + "," + std::to_string(perms_.size()) + ")";
}

PermAction PermAction::parse(std::istream& in) {
  std::string line;
  std::size_t offset = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      const std::size_t start = offset;
      offset += line.size() + 1;
      if (!trim(line).empty()) {
        offset = start + line.size() + 1;
        return true;
      }
    }
    return false;
  };
  if (!next_line()) throw ParseError("empty permutation file", 0);
  std::istringstream head(line);
  std::string kw1, kw2;
  long long m = -1, g = -1;
  if (!(head >> kw1 >> m >> kw2 >> g) || kw1 != "points" || kw2 != "groupsize" || m <= 0 || g <= 0) {
    throw ParseError("expected 'points m groupsize g'", 0);
  }
  std::vector<std::vector<std::uint32_t>> perms;
  for (long long i = 0; i < g; ++i) {
    if (!next_line()) throw ParseError("missing permutation " + std::to_string(i), offset);
    std::vector<std::uint32_t> p;
    for (auto f : split_fields(line)) {
      const std::int64_t v = parse_int(f);
      if (v < 0 || v >= m) throw PreconditionError("permutation entry out of range: " + std::string(f));
      p.push_back(static_cast<std::uint32_t>(v));
    }
    if (static_cast<long long>(p.size()) != m) {
      throw PreconditionError("permutation " + std::to_string(i) + " needs " + std::to_string(m) + " entries");
    }
    perms.push_back(std::move(p));
  }
  return PermAction(std::move(perms));
}

std::shared_ptr<const GroupAction> make_action(ActionKind kind, std::uint64_t param) {
  switch (kind) {
    case ActionKind::cyclic:
      return std::make_shared<CyclicAdd>(param);
    case ActionKind::agl1:
      return std::make_shared<Agl1>(param);
    case ActionKind::psl2:
      return std::make_shared<Psl2>(param);
    case ActionKind::perm:
      break;
  }
  throw PreconditionError("permutation actions are loaded from a file");
}

std::shared_ptr<const GroupAction> load_perm_action(std::istream& in) {
  return std::make_shared<PermAction>(PermAction::parse(in));
}

// Subsets

ActionSubset ActionSubset::group_side(std::vector<Code> codes, bool symmetric) {
  return {Role::group, sorted_unique(std::move(codes)), symmetric};
}

ActionSubset ActionSubset::point_side(std::vector<Code> codes) {
  return {Role::point, sorted_unique(std::move(codes)), false};
}

bool ActionSubset::contains(Code c) const { return std::binary_search(elems.begin(), elems.end(), c); }

ActionSubset parse_subset(const GroupAction& act, Role role, std::istream& in) {
  std::vector<Code> codes;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    codes.push_back(role == Role::group ? act.parse_element(line) : act.parse_point(line));
  }
  return role == Role::group ? ActionSubset::group_side(std::move(codes)) : ActionSubset::point_side(std::move(codes));
}

bool is_symmetric(const GroupAction& act, const ActionSubset& s) {
  require_role(s, Role::group, "symmetry is a group-side property");
  return std::all_of(s.elems.begin(), s.elems.end(), [&](Code g) { return s.contains(act.inv(g)); });
}

ActionSubset symmetrize(const GroupAction& act, const ActionSubset& s) {
  require_role(s, Role::group, "symmetrize needs a group-side set");
  std::vector<Code> out = s.elems;
  for (Code g : s.elems) out.push_back(act.inv(g));
  return ActionSubset::group_side(std::move(out), true);
}

std::uint64_t act_incidence(const GroupAction& act, const ActionSubset& s, const ActionSubset& a,
                            const ActionSubset& b, unsigned threads) {
  require_role(s, Role::group, "S must be group-side");
  require_role(a, Role::point, "A must be point-side");
  require_role(b, Role::point, "B must be point-side");
  std::vector<std::uint64_t> partial(resolve_threads(threads), 0);
  parallel_chunks(s.size(), threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    std::uint64_t count = 0;
    for (std::size_t i = begin; i < end; ++i) {
      for (Code x : a.elems) count += b.contains(act.act(s.elems[i], x)) ? 1 : 0;
    }
    partial[chunk] = count;
  });
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

ActionSubset set_product(const GroupAction& act, const ActionSubset& x, const ActionSubset& y) {
  require_role(x, Role::group, "set_product needs group-side sets");
  require_role(y, Role::group, "set_product needs group-side sets");
  std::vector<Code> out;
  out.reserve(x.size() * y.size());
  for (Code g : x.elems) {
    for (Code h : y.elems) out.push_back(act.mul(g, h));
  }
  return ActionSubset::group_side(std::move(out), false);
}

ActionSubset act_product(const GroupAction& act, const ActionSubset& h, const ActionSubset& t) {
  require_role(h, Role::group, "H must be group-side");
  require_role(t, Role::point, "T must be point-side");
  std::vector<Code> out;
  out.reserve(h.size() * t.size());
  for (Code g : h.elems) {
    for (Code x : t.elems) out.push_back(act.act(g, x));
  }
  return ActionSubset::point_side(std::move(out));
}

namespace {

ActionSubset with_identity_symmetric(const GroupAction& act, const ActionSubset& s) {
  ActionSubset base = symmetrize(act, s);
  base.elems.push_back(act.identity());
  return ActionSubset::group_side(std::move(base.elems), true);
}

}  // namespace

ActionSubset product_set(const GroupAction& act, const ActionSubset& s, unsigned k, std::size_t budget) {
  require_role(s, Role::group, "product_set needs a group-side set");
  if (k == 0) throw PreconditionError("product_set needs k >= 1");
  const ActionSubset base = s.symmetric ? s : with_identity_symmetric(act, s);
  ActionSubset cur = base;
  for (unsigned i = 1; i < k; ++i) {
    if (cur.size() * base.size() > budget && cur.size() > 0) {
      // The raw product list is bounded by the budget, not only its dedup.
      throw BudgetExceeded("product_set: " + std::to_string(cur.size()) + " x " + std::to_string(base.size()) +
                           " products exceed budget " + std::to_string(budget));
    }
    cur = set_product(act, cur, base);
  }
  cur.symmetric = true;
  return cur;
}

GeneratedApprox generated_subgroup(const GroupAction& act, const ActionSubset& s, unsigned k, std::size_t budget) {
  require_role(s, Role::group, "generated_subgroup needs a group-side set");
  if (k == 0) throw PreconditionError("generated_subgroup needs k >= 1");
  const ActionSubset base = with_identity_symmetric(act, s);
  GeneratedApprox out{base, 1, false};
  for (unsigned j = 2; j <= k; ++j) {
    if (out.set.size() * base.size() > budget) throw BudgetExceeded("generated_subgroup exceeds budget");
    ActionSubset next = set_product(act, out.set, base);
    next.symmetric = true;
    if (next.elems == out.set.elems) {
      out.fixpoint = true;
      break;
    }
    out.set = std::move(next);
    out.steps = j;
  }
  return out;
}

std::uint64_t StabReport::count_at_least(std::uint64_t threshold) const {
  std::uint64_t total = 0;
  for (auto it = histogram.lower_bound(threshold); it != histogram.end(); ++it) total += it->second;
  return total;
}

StabReport stab_count(const GroupAction& act, const ActionSubset& w, const ActionSubset& a, unsigned n,
                      std::uint64_t budget, unsigned threads) {
  require_role(w, Role::group, "W must be group-side");
  require_role(a, Role::point, "A must be point-side");
  if (n == 0) throw PreconditionError("stab_count needs n >= 1");
  const std::uint64_t na = a.size();
  std::uint64_t tuples = 1;
  for (unsigned i = 0; i < n; ++i) {
    if (na != 0 && tuples > budget / na) {
      throw BudgetExceeded("stab_count: |A|^n exceeds budget " + std::to_string(budget));
    }
    tuples *= na;
  }
  if (na == 0) tuples = 0;

  // Fixed-point masks over A of the non-identity elements of W, with multiplicity.
  const std::size_t words = (na + 63) / 64;
  std::map<std::vector<std::uint64_t>, std::uint64_t> mask_count;
  const Code id = act.identity();
  for (Code g : w.elems) {
    if (g == id) continue;
    std::vector<std::uint64_t> mask(words, 0);
    bool any = false;
    for (std::uint64_t i = 0; i < na; ++i) {
      if (act.act(g, a.elems[i]) == a.elems[i]) {
        mask[i / 64] |= std::uint64_t{1} << (i % 64);
        any = true;
      }
    }
    if (any) ++mask_count[mask];
  }
  const std::vector<std::pair<std::vector<std::uint64_t>, std::uint64_t>> masks(mask_count.begin(), mask_count.end());
  const std::uint64_t id_in_w = w.contains(id) ? 1 : 0;

  std::vector<std::map<std::uint64_t, std::uint64_t>> partial(resolve_threads(threads));
  parallel_chunks(tuples, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto& hist = partial[chunk];
    std::vector<std::uint64_t> digits(n);
    for (std::size_t t = begin; t < end; ++t) {
      std::uint64_t rest = t;
      for (unsigned i = 0; i < n; ++i) {
        digits[i] = rest % na;
        rest /= na;
      }
      std::uint64_t nonid = 0;
      for (const auto& [mask, count] : masks) {
        bool fixes = true;
        for (std::uint64_t d : digits) {
          if (!((mask[d / 64] >> (d % 64)) & 1)) {
            fixes = false;
            break;
          }
        }
        if (fixes) nonid += count;
      }
      ++hist[nonid + id_in_w];
    }
  });
  StabReport report;
  report.tuples = tuples;
  for (const auto& hist : partial) {
    for (const auto& [size, count] : hist) report.histogram[size] += count;
  }
  for (const auto& [size, count] : report.histogram) {
    if (size > id_in_w) report.nontrivial += count;
  }
  return report;
}

// Covers of H*H by left translates x*H.

namespace {

class CoverSearch {
 public:
  CoverSearch(const GroupAction& act, const ActionSubset& h, std::uint64_t budget)
      : act_(act), h_(h), hh_(set_product(act, h, h)), budget_(budget) {
    for (Code g : h_.elems) h_inv_.push_back(act_.inv(g));
  }

  const ActionSubset& hh() const { return hh_; }

  // Repeatedly takes the first uncovered element y and the translate through
  // y with the largest new coverage; ties prefer the identity, then the
  // smallest code.
  std::vector<Code> greedy() {
    std::vector<char> covered(hh_.size(), 0);
    std::size_t left = hh_.size();
    std::vector<Code> cover;
    std::size_t next = 0;
    while (left > 0) {
      while (covered[next]) ++next;
      Code best = 0;
      std::size_t best_gain = 0;
      for (Code x : candidates(hh_.elems[next])) {
        std::size_t gain = 0;
        for (std::size_t i : hits(x)) gain += covered[i] ? 0 : 1;
        const bool better = gain > best_gain || (gain == best_gain && x == act_.identity());
        if (best_gain == 0 || better) {
          best = x;
          best_gain = gain;
        }
      }
      for (std::size_t i : hits(best)) {
        if (!covered[i]) {
          covered[i] = 1;
          --left;
        }
      }
      cover.push_back(best);
    }
    return cover;
  }

  // Depth-first search for a cover with at most `depth` translates.
  std::optional<std::vector<Code>> exact(std::size_t depth) {
    std::vector<int> covered(hh_.size(), 0);
    std::vector<Code> chosen;
    spent_ = 0;
    if (dfs(covered, hh_.size(), depth, chosen)) return chosen;
    return std::nullopt;
  }

  bool exhausted() const { return spent_ > budget_; }

 private:
  std::vector<Code> candidates(Code y) const {
    std::vector<Code> out;
    out.reserve(h_inv_.size());
    for (Code hi : h_inv_) out.push_back(act_.mul(y, hi));
    return sorted_unique(std::move(out));
  }

  // Indices into H*H of x*h for h in H.
  std::vector<std::size_t> hits(Code x) const {
    std::vector<std::size_t> out;
    out.reserve(h_.size());
    for (Code g : h_.elems) {
      const Code y = act_.mul(x, g);
      auto it = std::lower_bound(hh_.elems.begin(), hh_.elems.end(), y);
      if (it != hh_.elems.end() && *it == y) out.push_back(static_cast<std::size_t>(it - hh_.elems.begin()));
    }
    return out;
  }

  bool dfs(std::vector<int>& covered, std::size_t left, std::size_t depth, std::vector<Code>& chosen) {
    if (left == 0) return true;
    if (depth == 0 || left > depth * h_.size()) return false;
    if (++spent_ > budget_) return false;
    std::size_t y = 0;
    while (covered[y]) ++y;
    for (Code x : candidates(hh_.elems[y])) {
      const auto idx = hits(x);
      spent_ += idx.size();
      std::size_t gained = 0;
      for (std::size_t i : idx) gained += covered[i]++ == 0 ? 1 : 0;
      chosen.push_back(x);
      if (dfs(covered, left - gained, depth - 1, chosen)) return true;
      chosen.pop_back();
      for (std::size_t i : idx) --covered[i];
      if (spent_ > budget_) return false;
    }
    return false;
  }

  const GroupAction& act_;
  const ActionSubset& h_;
  ActionSubset hh_;
  std::vector<Code> h_inv_;
  std::uint64_t budget_;
  std::uint64_t spent_ = 0;
};

bool recheck_cover(const GroupAction& act, const ActionSubset& h, const ActionSubset& hh,
                   const std::vector<Code>& cover) {
  std::vector<Code> cover_inv;
  for (Code x : cover) cover_inv.push_back(act.inv(x));
  return std::all_of(hh.elems.begin(), hh.elems.end(), [&](Code y) {
    return std::any_of(cover_inv.begin(), cover_inv.end(), [&](Code xi) { return h.contains(act.mul(xi, y)); });
  });
}

}  // namespace

ApproxGroupCert verify_approx_subgroup(const GroupAction& act, const ActionSubset& h, std::uint64_t K,
                                       std::uint64_t search_budget) {
  require_role(h, Role::group, "H must be group-side");
  if (h.elems.empty()) throw PreconditionError("H must be nonempty");
  ApproxGroupCert cert;
  cert.H = h;
  cert.K = K;
  cert.symmetric = is_symmetric(act, h);
  cert.has_identity = h.contains(act.identity());
  if (!cert.symmetric || !cert.has_identity) return cert;

  CoverSearch search(act, h, search_budget);
  std::vector<Code> cover = search.greedy();
  if (cover.size() > K) {
    cert.exhaustive = true;
    auto found = search.exact(static_cast<std::size_t>(K));
    cover = found ? std::move(*found) : std::vector<Code>{};
  }
  if (!cover.empty() && recheck_cover(act, h, search.hh(), cover)) {
    cert.cover = std::move(cover);
    cert.covered = true;
  }
  return cert;
}

std::uint64_t min_cover_size(const GroupAction& act, const ActionSubset& h, std::uint64_t search_budget) {
  require_role(h, Role::group, "H must be group-side");
  if (h.elems.empty() || !is_symmetric(act, h) || !h.contains(act.identity())) {
    throw PreconditionError("min_cover_size needs a symmetric H containing the identity");
  }
  CoverSearch search(act, h, search_budget);
  std::size_t best = search.greedy().size();
  while (best > 1) {
    auto found = search.exact(best - 1);
    if (!found) break;
    best = found->size();
  }
  return best;
}

// Balog-Szemeredi-Gowers style extraction.

BsgResult bsg_extract(const GroupAction& act, const ActionSubset& s, const ActionSubset& a, const BsgOptions& opts) {
  require_role(s, Role::group, "S must be group-side");
  require_role(a, Role::point, "A must be point-side");
  if (!(opts.quantile >= 0.0 && opts.quantile <= 1.0)) throw PreconditionError("quantile must be in [0, 1]");

  std::vector<std::uint64_t> s_deg(s.size(), 0);
  std::vector<std::uint64_t> a_deg(a.size(), 0);
  std::uint64_t incidences = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a.contains(act.act(s.elems[i], a.elems[j]))) {
        ++s_deg[i];
        ++a_deg[j];
        ++incidences;
      }
    }
  }
  if (incidences == 0) throw PreconditionError("bsg_extract: S x A has no incidences inside A");

  std::vector<std::size_t> rank(s.size());
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t x, std::size_t y) { return s_deg[x] > s_deg[y]; });

  std::size_t top = opts.top != 0 ? opts.top
                                  : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(s.size()))));
  const auto pair_cap = static_cast<std::size_t>(std::sqrt(static_cast<double>(opts.max_pairs)));
  top = std::max<std::size_t>(1, std::min({top, s.size(), pair_cap}));

  std::vector<Code> e;
  for (std::size_t i = 0; i < top; ++i) {
    const Code si_inv = act.inv(s.elems[rank[i]]);
    for (std::size_t j = 0; j < top; ++j) {
      const Code q = act.mul(si_inv, s.elems[rank[j]]);
      e.push_back(q);
      e.push_back(act.inv(q));
    }
  }
  e.push_back(act.identity());
  const ActionSubset h_prime = ActionSubset::group_side(std::move(e), true);

  BsgResult r;
  r.H = product_set(act, h_prime, 3, opts.product_budget);

  std::vector<std::uint64_t> sorted = a_deg;
  std::sort(sorted.begin(), sorted.end());
  const auto q_index = static_cast<std::size_t>(std::floor(opts.quantile * static_cast<double>(sorted.size() - 1)));
  const std::uint64_t threshold = sorted[q_index];
  std::vector<Code> t;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a_deg[j] >= threshold) t.push_back(a.elems[j]);
  }
  r.T = ActionSubset::point_side(std::move(t));
  r.h = s.elems[rank.front()];

  r.size_H = r.H.size();
  r.size_T = r.T.size();
  std::uint64_t cap = 0;
  for (Code g : s.elems) cap += r.H.contains(act.mul(r.h, g)) ? 1 : 0;
  r.size_H_cap_hS = cap;
  r.size_HT = act_product(act, r.H, r.T).size();
  r.incidences = incidences;
  return r;
}

namespace {

struct RawStats {
  double H, T, HT, cap, S, A;
  bool T_in_A;
};

RawStats recompute(const GroupAction& act, const BsgResult& r, const ActionSubset& a, const ActionSubset& s) {
  require_role(r.H, Role::group, "H must be group-side");
  require_role(r.T, Role::point, "T must be point-side");
  std::uint64_t cap = 0;
  std::vector<Code> hs;
  for (Code g : s.elems) hs.push_back(act.mul(r.h, g));
  for (Code g : sorted_unique(std::move(hs))) cap += r.H.contains(g) ? 1 : 0;
  const bool t_in_a = std::all_of(r.T.elems.begin(), r.T.elems.end(), [&](Code x) { return a.contains(x); });
  return {static_cast<double>(r.H.size()),
          static_cast<double>(r.T.size()),
          static_cast<double>(act_product(act, r.H, r.T).size()),
          static_cast<double>(cap),
          static_cast<double>(s.size()),
          static_cast<double>(a.size()),
          t_in_a};
}

constexpr double kGuard = 1e-9;

}  // namespace

BsgCheck verify_bsg(const GroupAction& act, const BsgResult& r, const ActionSubset& a, const ActionSubset& s,
                    double delta, unsigned n, double t) {
  const RawStats st = recompute(act, r, a, s);
  BsgCheck c;
  if (st.A < 1) return c;
  const auto power = [&](double e) { return std::pow(st.A, e); };
  c.size_H = st.H <= power(n + t + delta) * (1 + kGuard);
  c.size_T = st.T >= power(1 - delta) * (1 - kGuard);
  c.non_expansion = st.HT <= power(1 + delta) * (1 + kGuard);
  c.intersection = st.cap >= power(-delta) * st.S * (1 - kGuard);
  c.T_in_A = st.T_in_A;
  return c;
}

double certificate_delta(const GroupAction& act, const BsgResult& r, const ActionSubset& a, const ActionSubset& s,
                         unsigned n, double t) {
  const RawStats st = recompute(act, r, a, s);
  if (st.A < 2) throw PreconditionError("certificate_delta needs |A| >= 2");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!st.T_in_A || st.T < 1 || st.cap < 1) return inf;
  if (!is_symmetric(act, r.H) || !r.H.contains(act.identity())) return inf;
  const double la = std::log(st.A);
  const double k = static_cast<double>(min_cover_size(act, r.H));
  return std::max({0.0, std::log(st.H) / la - n - t, 1.0 - std::log(st.T) / la, std::log(st.HT) / la - 1.0,
                   (std::log(st.S) - std::log(st.cap)) / la, std::log(k) / la});
}

}  // namespace growthlab
