#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace growthlab {

/// Group elements and points are dense codes 0..order-1.
using Code = std::uint64_t;

/// A finite group G acting on a finite set X.
class GroupAction {
 public:
  virtual ~GroupAction() = default;

  virtual std::string name() const = 0;
  virtual std::uint64_t group_order() const = 0;
  virtual std::uint64_t point_count() const = 0;

  virtual Code identity() const = 0;
  virtual Code mul(Code g, Code h) const = 0;
  virtual Code inv(Code g) const = 0;
  /// act(mul(g, h), x) == act(g, act(h, x)).
  virtual Code act(Code g, Code x) const = 0;

  virtual std::string element_str(Code g) const;
  virtual Code parse_element(std::string_view text) const;
  virtual std::string point_str(Code x) const;
  virtual Code parse_point(std::string_view text) const;
};

/// Z/n acting on itself by addition. Elements parse as possibly negative integers.
class CyclicAdd final : public GroupAction {
 public:
  explicit CyclicAdd(std::uint64_t n);
  std::string name() const override;
  std::uint64_t group_order() const override { return n_; }
  std::uint64_t point_count() const override { return n_; }
  Code identity() const override { return 0; }
  Code mul(Code g, Code h) const override { return (g + h) % n_; }
  Code inv(Code g) const override { return g == 0 ? 0 : n_ - g; }
  Code act(Code g, Code x) const override { return (g + x) % n_; }
  Code parse_element(std::string_view text) const override;
  Code parse_point(std::string_view text) const override { return parse_element(text); }

 private:
  std::uint64_t n_;
};

/// x -> a*x + b over F_p. Element (a, b) has code (a-1)*p + b and prints as "a,b".
class Agl1 final : public GroupAction {
 public:
  explicit Agl1(std::uint64_t p);
  std::string name() const override;
  std::uint64_t group_order() const override { return (p_ - 1) * p_; }
  std::uint64_t point_count() const override { return p_; }
  Code identity() const override { return 0; }
  Code mul(Code g, Code h) const override;
  Code inv(Code g) const override;
  Code act(Code g, Code x) const override;
  std::string element_str(Code g) const override;
  Code parse_element(std::string_view text) const override;

  Code encode(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t prime() const { return p_; }

 private:
  std::uint64_t p_;
};

/// Moebius transformations of P^1(F_p) by determinant-one matrices modulo +-1.
/// Matrices are normalized so that the first nonzero entry in row-major order
/// lies in [1, (p-1)/2]. Point p is the point at infinity, printed "inf".
class Psl2 final : public GroupAction {
 public:
  /// Odd primes up to 127; the element table is built eagerly.
  explicit Psl2(std::uint64_t p);
  std::string name() const override;
  std::uint64_t group_order() const override { return mats_.size(); }
  std::uint64_t point_count() const override { return p_ + 1; }
  Code identity() const override { return identity_; }
  Code mul(Code g, Code h) const override;
  Code inv(Code g) const override;
  Code act(Code g, Code x) const override;
  /// "a b c d" in row-major order.
  std::string element_str(Code g) const override;
  Code parse_element(std::string_view text) const override;
  std::string point_str(Code x) const override;
  Code parse_point(std::string_view text) const override;

  /// Code of the class of [[a, b], [c, d]]; throws PreconditionError unless det = 1.
  Code encode(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) const;

 private:
  struct Mat {
    std::uint32_t a, b, c, d;
  };
  Mat normalize(Mat m) const;
  std::uint64_t pack(const Mat& m) const;
  Code lookup(const Mat& m) const;

  std::uint64_t p_;
  std::vector<Mat> mats_;
  std::map<std::uint64_t, Code> index_;
  Code identity_ = 0;
};

/// An explicit permutation group; element i is the i-th listed permutation.
class PermAction final : public GroupAction {
 public:
  /// Validates bijectivity, presence of the identity and closure under
  /// composition and inversion.
  explicit PermAction(std::vector<std::vector<std::uint32_t>> perms);
  /// "points m groupsize g" followed by g permutation lines.
  static PermAction parse(std::istream& in);

  std::string name() const override;
  std::uint64_t group_order() const override { return perms_.size(); }
  std::uint64_t point_count() const override { return points_; }
  Code identity() const override { return identity_; }
  Code mul(Code g, Code h) const override;
  Code inv(Code g) const override;
  Code act(Code g, Code x) const override { return perms_[g][x]; }

 private:
  Code lookup(const std::vector<std::uint32_t>& perm) const;

  std::uint64_t points_ = 0;
  std::vector<std::vector<std::uint32_t>> perms_;
  std::map<std::vector<std::uint32_t>, Code> index_;
  std::vector<Code> inverse_;
  Code identity_ = 0;
};

enum class ActionKind { cyclic, agl1, psl2, perm };

/// Builds CyclicAdd, Agl1 or Psl2 from its parameter; primality is checked.
std::shared_ptr<const GroupAction> make_action(ActionKind kind, std::uint64_t param);
std::shared_ptr<const GroupAction> load_perm_action(std::istream& in);

bool is_prime(std::uint64_t n);

enum class Role { group, point };

/// Sorted, duplicate-free codes on one side of the action.
struct ActionSubset {
  Role role = Role::group;
  std::vector<Code> elems;
  /// Claims S = S^-1; product_set then skips symmetrization.
  bool symmetric = false;

  static ActionSubset group_side(std::vector<Code> codes, bool symmetric = false);
  static ActionSubset point_side(std::vector<Code> codes);

  std::size_t size() const { return elems.size(); }
  bool contains(Code c) const;
};

/// One element per line, in the action's element or point text form.
ActionSubset parse_subset(const GroupAction& act, Role role, std::istream& in);

/// True when S is closed under inversion.
bool is_symmetric(const GroupAction& act, const ActionSubset& s);
ActionSubset symmetrize(const GroupAction& act, const ActionSubset& s);

/// |{(s, a) in S x A : s*a in B}|.
std::uint64_t act_incidence(const GroupAction& act, const ActionSubset& s, const ActionSubset& a,
                            const ActionSubset& b, unsigned threads = 1);

/// {x*y : x in X, y in Y} for group-side X, Y.
ActionSubset set_product(const GroupAction& act, const ActionSubset& x, const ActionSubset& y);
/// {h*t : h in H, t in T} for group-side H and point-side T.
ActionSubset act_product(const GroupAction& act, const ActionSubset& h, const ActionSubset& t);

/// k-fold product of S, symmetrized to S u S^-1 u {1} first unless S is
/// flagged symmetric. Throws BudgetExceeded if an intermediate product grows
/// past `budget` elements.
ActionSubset product_set(const GroupAction& act, const ActionSubset& s, unsigned k,
                         std::size_t budget = 10'000'000);

struct GeneratedApprox {
  ActionSubset set;
  /// Number of product steps actually taken.
  unsigned steps = 0;
  /// True when S^(j+1) = S^j was observed, so `set` is the generated subgroup.
  bool fixpoint = false;
};

/// <S> approximated by S^k of the symmetrized S, stopping early at a fixpoint.
GeneratedApprox generated_subgroup(const GroupAction& act, const ActionSubset& s, unsigned k = 6,
                                   std::size_t budget = 10'000'000);

struct StabReport {
  std::uint64_t tuples = 0;
  /// Tuples fixed by some non-identity element of W.
  std::uint64_t nontrivial = 0;
  /// Stabilizer size in W -> number of tuples.
  std::map<std::uint64_t, std::uint64_t> histogram;

  std::uint64_t count_at_least(std::uint64_t threshold) const;
};

/// Stabilizer sizes |{w in W : w*a_i = a_i for all i}| over all n-tuples of A.
/// Throws BudgetExceeded when |A|^n exceeds `budget`.
StabReport stab_count(const GroupAction& act, const ActionSubset& w, const ActionSubset& a, unsigned n,
                      std::uint64_t budget = 10'000'000, unsigned threads = 1);

struct ApproxGroupCert {
  ActionSubset H;
  std::uint64_t K = 0;
  /// Translates x with H*H contained in the union of x*H; empty when no claim is made.
  std::vector<Code> cover;
  bool symmetric = false;
  bool has_identity = false;
  /// The cover was rechecked against H*H.
  bool covered = false;
  /// An exact search beyond the greedy pass was run.
  bool exhaustive = false;

  bool ok() const { return symmetric && has_identity && covered && cover.size() <= K; }
};

/// Checks symmetry and the identity, then looks for a cover of H*H by at most
/// K left translates of H: greedy first, then a bounded exact search.
/// Throws PreconditionError for empty or point-side H.
ApproxGroupCert verify_approx_subgroup(const GroupAction& act, const ActionSubset& h, std::uint64_t K,
                                       std::uint64_t search_budget = 5'000'000);

/// Smallest cover size found for H*H by translates of H (greedy, then exact
/// search downward within the budget). Requires H symmetric with identity.
std::uint64_t min_cover_size(const GroupAction& act, const ActionSubset& h,
                             std::uint64_t search_budget = 5'000'000);

struct BsgOptions {
  /// Top-ranked elements of S used for quotients; 0 means ceil(sqrt(|S|)).
  std::size_t top = 0;
  /// Cap on the number of quotient pairs, so top <= sqrt(max_pairs).
  std::size_t max_pairs = 10'000;
  /// T keeps points whose degree reaches this quantile of all degrees in A.
  double quantile = 0.5;
  std::size_t product_budget = 1'000'000;
};

struct BsgResult {
  ActionSubset H;
  ActionSubset T;
  Code h = 0;
  std::uint64_t size_H = 0;
  std::uint64_t size_T = 0;
  std::uint64_t size_H_cap_hS = 0;
  std::uint64_t size_HT = 0;
  std::uint64_t incidences = 0;
};

/// Popularity and quotient heuristic; makes no optimality claim.
/// Throws PreconditionError when S x A has no incidence inside A.
BsgResult bsg_extract(const GroupAction& act, const ActionSubset& s, const ActionSubset& a,
                      const BsgOptions& opts = {});

struct BsgCheck {
  bool size_H = false;
  bool size_T = false;
  bool non_expansion = false;
  bool intersection = false;
  bool T_in_A = false;

  bool ok() const { return size_H && size_T && non_expansion && intersection && T_in_A; }
};

/// Recomputes every cardinality from the raw sets and evaluates
/// |H| <= |A|^(n+t+delta), |T| >= |A|^(1-delta), |H*T| <= |A|^(1+delta) and
/// |H cap h*S| >= |A|^-delta |S| with a 1e-9 relative guard toward acceptance.
BsgCheck verify_bsg(const GroupAction& act, const BsgResult& r, const ActionSubset& a, const ActionSubset& s,
                    double delta, unsigned n, double t);

/// Smallest delta >= 0 for which verify_bsg passes and H is an |A|^delta
/// approximate subgroup (cover size from min_cover_size). Infinity when H
/// misses h*S or is not symmetric with identity. Requires |A| >= 2.
double certificate_delta(const GroupAction& act, const BsgResult& r, const ActionSubset& a, const ActionSubset& s,
                         unsigned n, double t);

}  // namespace growthlab
