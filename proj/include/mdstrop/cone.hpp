#pragma once

// Double description (Motzkin) for polyhedral cones {x : A x >= 0, E x = 0}.
// Everything downstream that converts between generators and inequalities goes
// through extreme_rays().

#include <mdstrop/linalg.hpp>

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <set>
#include <vector>

namespace mdstrop {

struct ConeGenerators {
  std::vector<RationalVector> rays;       // extreme rays of the pointed part
  std::vector<RationalVector> lineality;  // basis of the lineality space
};

namespace detail {

inline RationalVector scale_to_primitive(const RationalVector& v) {
  bool zero = std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
  if (zero) return v;
  auto p = primitive(std::span<const Rational>(v));
  return p.to_rational();
}

inline Rational axpy_coeff(const RationalVector& a, const RationalVector& x) {
  return dot(std::span<const Rational>(a), std::span<const Rational>(x));
}

}  // namespace detail

/// Extreme rays and lineality of {x in Q^dim : a.x >= 0 for a in inequalities, e.x = 0 for e in equations}.
/// Rays are returned primitive-scaled and lexicographically sorted.
inline ConeGenerators extreme_rays(const std::vector<RationalVector>& inequalities,
                                   const std::vector<RationalVector>& equations, std::size_t dim) {
  std::vector<RationalVector> lin;
  for (std::size_t i = 0; i < dim; ++i) {
    RationalVector e(dim);
    e[i] = 1;
    lin.push_back(std::move(e));
  }
  std::vector<RationalVector> rays;
  // zero_sets[i] bit j: ray i is tight on the j-th processed constraint.
  std::vector<boost::dynamic_bitset<>> zero_sets;
  std::size_t processed = 0;  // each equation contributes both signs

  auto add_constraint = [&](const RationalVector& a) {
    if (a.size() != dim) throw MathError("extreme_rays: constraint length mismatch");
    // Case 1: constraint cuts the lineality space.
    std::size_t pick = lin.size();
    for (std::size_t i = 0; i < lin.size(); ++i)
      if (detail::axpy_coeff(a, lin[i]) != 0) {
        pick = i;
        break;
      }
    if (pick < lin.size()) {
      RationalVector l0 = lin[pick];
      Rational al0 = detail::axpy_coeff(a, l0);
      if (al0 < 0) {
        for (auto& x : l0) x = -x;
        al0 = -al0;
      }
      std::vector<RationalVector> nl;
      for (std::size_t i = 0; i < lin.size(); ++i) {
        if (i == pick) continue;
        Rational f = detail::axpy_coeff(a, lin[i]) / al0;
        RationalVector v = lin[i];
        for (std::size_t k = 0; k < dim; ++k) v[k] -= f * l0[k];
        nl.push_back(std::move(v));
      }
      // Shifting along l0 keeps every earlier constraint value, and makes a vanish.
      for (std::size_t i = 0; i < rays.size(); ++i) {
        Rational f = detail::axpy_coeff(a, rays[i]) / al0;
        for (std::size_t k = 0; k < dim; ++k) rays[i][k] -= f * l0[k];
        rays[i] = detail::scale_to_primitive(rays[i]);
        zero_sets[i].push_back(true);
      }
      rays.push_back(detail::scale_to_primitive(l0));
      boost::dynamic_bitset<> z(processed, 0);
      z.set();
      z.push_back(false);
      zero_sets.push_back(std::move(z));
      lin = std::move(nl);
      ++processed;
      return;
    }
    // Case 2: lineality lies in the hyperplane; split rays.
    std::vector<Rational> val(rays.size());
    std::vector<std::size_t> pos, neg;
    std::vector<RationalVector> next;
    std::vector<boost::dynamic_bitset<>> next_zero;
    for (std::size_t i = 0; i < rays.size(); ++i) {
      val[i] = detail::axpy_coeff(a, rays[i]);
      if (val[i] > 0) pos.push_back(i);
      if (val[i] < 0) neg.push_back(i);
      if (val[i] >= 0) {
        next.push_back(rays[i]);
        next_zero.push_back(zero_sets[i]);
        next_zero.back().push_back(val[i] == 0);
      }
    }
    if (!neg.empty()) {
      const std::size_t target_rank = dim - lin.size() - 2;
      for (auto p : pos)
        for (auto n : neg) {
          boost::dynamic_bitset<> common = zero_sets[p] & zero_sets[n];
          if (common.count() < target_rank) continue;
          // Combinatorial adjacency: no third ray is tight on everything p and n share.
          // Valid because the current ray set is irredundant.
          bool adjacent = true;
          for (std::size_t r = 0; r < rays.size() && adjacent; ++r)
            if (r != p && r != n && common.is_subset_of(zero_sets[r])) adjacent = false;
          if (!adjacent) continue;
          RationalVector v(dim);
          for (std::size_t k = 0; k < dim; ++k) v[k] = val[p] * rays[n][k] - val[n] * rays[p][k];
          next.push_back(detail::scale_to_primitive(v));
          common.push_back(true);
          next_zero.push_back(std::move(common));
        }
    }
    rays = std::move(next);
    zero_sets = std::move(next_zero);
    ++processed;
  };

  for (const auto& e : equations) {
    add_constraint(e);
    RationalVector neg(e);
    for (auto& x : neg) x = -x;
    add_constraint(neg);
  }
  for (const auto& a : inequalities) add_constraint(a);

  std::set<RationalVector> uniq;
  for (auto& r : rays) {
    bool zero = std::all_of(r.begin(), r.end(), [](const Rational& q) { return q == 0; });
    if (!zero) uniq.insert(r);
  }
  ConeGenerators out;
  out.rays.assign(uniq.begin(), uniq.end());
  out.lineality = std::move(lin);
  return out;
}

/// Facet inequalities (and equations of the linear span) of the cone generated by `gens`.
struct ConeInequalities {
  std::vector<RationalVector> facets;     // a with a.x >= 0, each supporting a facet
  std::vector<RationalVector> equations;  // basis of span(gens)^perp
};

inline ConeInequalities cone_facets(const std::vector<RationalVector>& gens, std::size_t dim) {
  // The dual cone {a : a.g >= 0} has lineality span(gens)^perp; its extreme rays
  // modulo that lineality are the facet normals.
  auto dual = extreme_rays(gens, {}, dim);
  return {std::move(dual.rays), std::move(dual.lineality)};
}

}  // namespace mdstrop
