#pragma once

#include <optional>
#include <string>
#include <vector>

#include "growthlab/poly.hpp"

namespace growthlab {

/// f = outer(inner(t)) with inner monic and inner(0) = 0.
struct Decomposition {
  UniPoly outer;
  UniPoly inner;
  /// Set when one side is linear.
  bool trivial = false;
};

/// All two-factor decompositions with both factors of degree >= 2, one per
/// normalized inner polynomial, sorted by inner degree descending. Over a
/// field of characteristic zero the normalized inner factor of a given degree
/// is unique, so there is at most one entry per divisor of deg f.
std::vector<Decomposition> decompose_uni(const UniPoly& f);

/// The decomposition with an inner factor of exactly `inner_degree`, if any.
/// Degrees 1 and deg f give the trivial decompositions.
std::optional<Decomposition> decompose_at(const UniPoly& f, unsigned inner_degree);

/// Leading `count` coefficients (after the leading 1) of the formal power
/// series root (1 + c_1 w + c_2 w^2 + ...)^(1/k), where c_i are the
/// coefficients of the monic polynomial p read from the top down.
std::vector<BigRat> series_root_coefficients(const UniPoly& monic, unsigned k, unsigned count);

/// Exact k-th root of a multivariate polynomial when one exists, found term
/// by term in graded order. For even k the root whose leading coefficient is
/// positive is returned.
std::optional<MultiPoly> exact_poly_root(const MultiPoly& p, unsigned k);

enum class FormKind { additive, multiplicative, none };

std::string to_string(FormKind kind);

/// Witness for f(x, ybar) = g(h(x) + s(ybar)) or g(h(x) * s(ybar)).
/// Normalization: h monic. Additive forms also have h(0) = 0 and s(0) = 0.
/// Multiplicative forms keep h(0), since shifting h is not a symmetry of
/// h * s, and s has leading coefficient 1 in graded order.
struct AddMulForm {
  FormKind kind = FormKind::none;
  UniPoly g;
  UniPoly h;
  /// Polynomial in the y-block only (arity = arity(f) - 1, variables y0...).
  std::optional<MultiPoly> s;
};

/// Rebuilds g(h(x) + s) or g(h(x) * s) as a polynomial in x, y0, ...
MultiPoly recompose(const AddMulForm& form);

/// Decides whether f is additive or multiplicative. Additive forms take
/// precedence; within a kind, smaller deg h is preferred. Throws
/// DegenerateError when f is constant in x or independent of every y.
AddMulForm detect_addmul(const MultiPoly& f);

}  // namespace growthlab
