#include "growthlab/family.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "growthlab/decompose.hpp"

namespace growthlab {

namespace {

struct Candidate {
  UniPoly inner;
  UniPoly outer;
  BigRat a;
};

// outer(t) = centered(t + a) with centered having no t^(deg-1) term.
Candidate additive_candidate(const UniPoly& inner, const UniPoly& outer) {
  const int d = outer.degree();
  const BigRat a = outer.coeff(static_cast<std::size_t>(d - 1)) / (BigRat(d) * outer.leading());
  return {inner, taylor_shift(outer, -a), a};
}

std::vector<std::pair<UniPoly, UniPoly>> all_splits(const UniPoly& f) {
  std::vector<std::pair<UniPoly, UniPoly>> out;
  out.emplace_back(UniPoly::identity(), f);
  for (auto& d : decompose_uni(f)) out.emplace_back(std::move(d.inner), std::move(d.outer));
  if (f.degree() > 1) {
    auto lin = decompose_at(f, static_cast<unsigned>(f.degree()));
    out.emplace_back(std::move(lin->inner), std::move(lin->outer));
  }
  return out;
}

// Scale lambda with b(t) = a(lambda * t), preferring a positive lambda.
std::optional<BigRat> scaling_between(const UniPoly& a, const UniPoly& b) {
  if (a.degree() != b.degree()) return std::nullopt;
  const int d = a.degree();
  if (a.coeff(0) != b.coeff(0)) return std::nullopt;
  BigRat lambda;
  if (!exact_root(b.leading() / a.leading(), static_cast<unsigned>(d), lambda)) {
    // Odd degree with a negative ratio is handled by exact_root; even degree
    // with a negative ratio has no rational scale.
    return std::nullopt;
  }
  for (const BigRat& cand : {lambda, -lambda}) {
    if (cand.is_zero()) continue;
    if (scale_argument(a, cand) == b) return cand;
  }
  return std::nullopt;
}

UniPoly canonical_scaling(const UniPoly& outer, BigRat& rep_scale) {
  // outer(t) = canon(rep_scale * t) with canon leading +-1 when possible.
  const int d = outer.degree();
  const BigRat mag = outer.leading().sign() < 0 ? -outer.leading() : outer.leading();
  BigRat root;
  if (d >= 1 && exact_root(mag, static_cast<unsigned>(d), root)) {
    rep_scale = root;
    return scale_argument(outer, inverse(root));
  }
  rep_scale = BigRat(1);
  return outer;
}

struct Key {
  UniPoly inner;
  UniPoly outer;
  std::vector<ClassMember> members;
};

std::vector<FamilyClass> greedy_partition(std::vector<Key> keys, std::size_t group_size, ClassKind kind) {
  std::vector<FamilyClass> out;
  std::vector<bool> assigned(group_size, false);
  std::map<std::size_t, std::size_t> local;  // family index -> position in group
  for (const auto& k : keys) {
    for (const auto& m : k.members) local.emplace(m.index, 0);
  }
  std::size_t pos = 0;
  for (auto& [idx, p] : local) p = pos++;

  std::size_t remaining = group_size;
  while (remaining > 0) {
    std::size_t best = keys.size();
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      std::size_t count = 0;
      for (const auto& m : keys[i].members) count += assigned[local[m.index]] ? 0 : 1;
      if (count == 0) continue;
      const bool better = count > best_count ||
                          (count == best_count && keys[i].inner.degree() < keys[best].inner.degree());
      if (best == keys.size() || better) {
        best = i;
        best_count = count;
      }
    }
    FamilyClass cls{kind, keys[best].inner, keys[best].outer, {}};
    for (const auto& m : keys[best].members) {
      auto flag = assigned[local[m.index]];
      if (flag) continue;
      flag = true;
      cls.members.push_back(m);
      --remaining;
    }
    out.push_back(std::move(cls));
  }
  return out;
}

std::vector<Key> additive_keys(const std::vector<UniPoly>& members, const std::vector<std::size_t>& idx) {
  std::vector<Key> keys;
  std::unordered_map<std::string, std::size_t> lookup;
  for (std::size_t i : idx) {
    for (const auto& [inner, outer] : all_splits(members[i])) {
      Candidate c = additive_candidate(inner, outer);
      const std::string key = c.inner.str() + "|" + c.outer.str();
      auto [it, inserted] = lookup.emplace(key, keys.size());
      if (inserted) keys.push_back({c.inner, c.outer, {}});
      auto& list = keys[it->second].members;
      if (list.empty() || list.back().index != i) list.push_back({i, c.a});
    }
  }
  return keys;
}

std::vector<Key> multiplicative_keys(const std::vector<UniPoly>& members, const std::vector<std::size_t>& idx) {
  std::vector<Key> keys;
  // Orbit representatives grouped by inner polynomial text.
  std::unordered_map<std::string, std::vector<std::size_t>> by_inner;
  for (std::size_t i : idx) {
    for (const auto& [inner, outer] : all_splits(members[i])) {
      const std::string inner_key = inner.str();
      auto& orbit_ids = by_inner[inner_key];
      bool placed = false;
      for (std::size_t k : orbit_ids) {
        if (auto lambda = scaling_between(keys[k].outer, outer)) {
          auto& list = keys[k].members;
          if (list.empty() || list.back().index != i) list.push_back({i, *lambda});
          placed = true;
          break;
        }
      }
      if (placed) continue;
      BigRat scale;
      UniPoly canon = canonical_scaling(outer, scale);
      orbit_ids.push_back(keys.size());
      keys.push_back({inner, std::move(canon), {{i, scale}}});
    }
  }
  return keys;
}

}  // namespace

PolyFamily::PolyFamily(std::vector<UniPoly> members, std::optional<unsigned> degree_bound)
    : members_(std::move(members)) {
  unsigned max_deg = 0;
  for (const auto& p : members_) {
    if (p.is_constant()) throw DegenerateError("family members must be nonconstant");
    max_deg = std::max(max_deg, static_cast<unsigned>(p.degree()));
  }
  if (degree_bound && *degree_bound < max_deg) {
    throw PreconditionError("family member exceeds degree bound " + std::to_string(*degree_bound));
  }
  degree_bound_ = degree_bound.value_or(max_deg);
}

PolyFamily PolyFamily::parse(std::istream& in) {
  std::vector<UniPoly> members;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    members.push_back(parse_uni(line));
  }
  return PolyFamily(std::move(members));
}

std::vector<FamilyClass> classify_family(const PolyFamily& family, ClassKind kind) {
  const auto& members = family.members();
  std::map<int, std::vector<std::size_t>> by_degree;
  for (std::size_t i = 0; i < members.size(); ++i) by_degree[members[i].degree()].push_back(i);

  std::vector<FamilyClass> out;
  for (const auto& [deg, idx] : by_degree) {
    if (idx.size() == 1) {
      // Members of different degrees never share a class.
      const UniPoly& f = members[idx.front()];
      if (kind == ClassKind::additive) {
        Candidate c = additive_candidate(UniPoly::identity(), f);
        out.push_back({kind, c.inner, c.outer, {{idx.front(), c.a}}});
      } else {
        BigRat scale;
        UniPoly canon = canonical_scaling(f, scale);
        out.push_back({kind, UniPoly::identity(), std::move(canon), {{idx.front(), scale}}});
      }
      continue;
    }
    auto keys = kind == ClassKind::additive ? additive_keys(members, idx) : multiplicative_keys(members, idx);
    for (auto& cls : greedy_partition(std::move(keys), idx.size(), kind)) out.push_back(std::move(cls));
  }
  std::stable_sort(out.begin(), out.end(), [](const FamilyClass& a, const FamilyClass& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    return a.members.front().index < b.members.front().index;
  });
  return out;
}

bool meets_class_threshold(std::size_t class_size, std::size_t family_size, double eps) {
  if (class_size == 0 || family_size == 0) return false;
  const double lhs = (1.0 - eps) * std::log(static_cast<double>(family_size));
  const double rhs = std::log(static_cast<double>(class_size));
  return lhs <= rhs + 1e-12;
}

EpsVerdict eps_structured(const PolyFamily& family, double eps) {
  EpsVerdict v;
  if (family.size() == 0) return v;
  auto add = classify_family(family, ClassKind::additive);
  auto mul = classify_family(family, ClassKind::multiplicative);
  v.largest_additive = add.front().members.size();
  v.largest_multiplicative = mul.front().members.size();
  v.eps_additive = meets_class_threshold(v.largest_additive, family.size(), eps);
  v.eps_multiplicative = meets_class_threshold(v.largest_multiplicative, family.size(), eps);
  v.witness = v.largest_additive >= v.largest_multiplicative ? add.front() : mul.front();
  return v;
}

}  // namespace growthlab
