#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <vector>

#include "growthlab/poly.hpp"

namespace growthlab {

/// Finite family of nonconstant univariate polynomials with a common degree bound.
class PolyFamily {
 public:
  PolyFamily() = default;
  /// Throws DegenerateError for a constant member. The degree bound defaults
  /// to the largest member degree.
  explicit PolyFamily(std::vector<UniPoly> members, std::optional<unsigned> degree_bound = std::nullopt);

  /// One polynomial per line in x; blank lines and `#` comments are skipped.
  static PolyFamily parse(std::istream& in);

  const std::vector<UniPoly>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  unsigned degree_bound() const { return degree_bound_; }

 private:
  std::vector<UniPoly> members_;
  unsigned degree_bound_ = 0;
};

enum class ClassKind { additive, multiplicative };

struct ClassMember {
  std::size_t index = 0;
  /// Shift (additive) or scale (multiplicative) with
  /// member = outer(inner + a) or outer(inner * a).
  BigRat a;
};

/// One translation class {outer(inner + a)} or scaling class {outer(inner * a)}
/// restricted to a family. inner is monic with inner(0) = 0. Additive outers
/// have a vanishing coefficient at t^(deg - 1); multiplicative outers are
/// scaled to leading coefficient +-1 when a rational scale achieves it.
struct FamilyClass {
  ClassKind kind = ClassKind::additive;
  UniPoly inner;
  UniPoly outer;
  std::vector<ClassMember> members;
};

/// Partitions the family into classes. Members are grouped greedily: the
/// (inner, outer) key shared by the most unassigned members becomes the next
/// class, so the first class returned is a largest class.
std::vector<FamilyClass> classify_family(const PolyFamily& family, ClassKind kind);

struct EpsVerdict {
  bool eps_additive = false;
  bool eps_multiplicative = false;
  /// A largest class over both kinds (additive wins ties).
  std::optional<FamilyClass> witness;
  std::size_t largest_additive = 0;
  std::size_t largest_multiplicative = 0;
};

/// |class| >= |F|^(1-eps), compared as logs with 1e-12 slack toward acceptance.
bool meets_class_threshold(std::size_t class_size, std::size_t family_size, double eps);

EpsVerdict eps_structured(const PolyFamily& family, double eps);

}  // namespace growthlab
