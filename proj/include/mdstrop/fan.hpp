#pragma once

// Rational polyhedral fans: validation, f-vectors, stellar subdivision, subfans cut out
// by a point-membership oracle, and flag chains inside a cone.

#include <mdstrop/cone.hpp>
#include <mdstrop/lp.hpp>
#include <mdstrop/linalg.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mdstrop {

/// Sorted ray-index set. The zero cone is implicit and never stored.
using Cone = std::vector<std::size_t>;

inline bool is_subset(const Cone& a, const Cone& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

class Fan {
 public:
  Fan() = default;

  /// Cones are stored as given (each sorted, duplicates and the empty cone dropped) and
  /// kept in canonical order: by number of rays, then lexicographically.
  Fan(std::size_t ambient_dim, std::vector<IntegerVector> rays, std::vector<Cone> cones, std::size_t lineality_dim = 0)
      : ambient_dim_(ambient_dim), rays_(std::move(rays)), lineality_dim_(lineality_dim) {
    for (const auto& r : rays_)
      if (r.size() != ambient_dim_) throw MathError("fan: ray " + r.str() + " has wrong length");
    std::set<Cone, CanonicalLess> uniq;
    for (auto c : cones) {
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      for (auto i : c)
        if (i >= rays_.size()) throw MathError("fan: cone index " + std::to_string(i) + " out of range");
      if (!c.empty()) uniq.insert(std::move(c));
    }
    cones_.assign(uniq.begin(), uniq.end());
    derive();
  }

  /// Builds the fan generated by the given cones, adding all their faces.
  static Fan from_maximal_cones(std::size_t ambient_dim, std::vector<IntegerVector> rays,
                                const std::vector<Cone>& maximal, std::size_t lineality_dim = 0) {
    Fan proto(ambient_dim, rays, maximal, lineality_dim);
    std::vector<Cone> all;
    for (const auto& c : proto.cones_) {
      auto f = proto.faces_of(c);
      all.insert(all.end(), f.begin(), f.end());
    }
    return Fan(ambient_dim, std::move(rays), std::move(all), lineality_dim);
  }

  std::size_t ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t lineality_dim() const noexcept { return lineality_dim_; }
  const std::vector<IntegerVector>& rays() const noexcept { return rays_; }
  const std::vector<Cone>& cones() const noexcept { return cones_; }

  bool has_cone(const Cone& c) const {
    if (c.empty()) return true;
    return std::binary_search(cones_.begin(), cones_.end(), c, CanonicalLess{});
  }

  std::vector<RationalVector> ray_vectors(const Cone& c) const {
    std::vector<RationalVector> v;
    for (auto i : c) v.push_back(rays_[i].to_rational());
    return v;
  }

  /// Index of a stored cone, or cones().size().
  std::size_t index_of(const Cone& c) const {
    auto it = std::lower_bound(cones_.begin(), cones_.end(), c, CanonicalLess{});
    if (it == cones_.end() || *it != c) return cones_.size();
    return static_cast<std::size_t>(it - cones_.begin());
  }

  std::size_t cone_dim(const Cone& c) const {
    if (c.empty()) return 0;
    auto i = index_of(c);
    if (i < cones_.size()) return dims_[i];
    return rank_of_rows(ray_vectors(c));
  }

  bool cone_is_simplicial(const Cone& c) const { return cone_dim(c) == c.size(); }

  bool is_simplicial() const {
    for (std::size_t i = 0; i < cones_.size(); ++i)
      if (dims_[i] != cones_[i].size()) return false;
    return true;
  }

  std::size_t dim() const {
    std::size_t d = 0;
    for (auto x : dims_) d = std::max(d, x);
    return d;
  }

  /// Stored cones not contained in another stored cone.
  std::vector<Cone> maximal_cones() const {
    std::vector<Cone> out;
    for (std::size_t i = 0; i < cones_.size(); ++i)
      if (maximal_[i]) out.push_back(cones_[i]);
    return out;
  }

  /// f[k] = number of k-dimensional cones, f[0] = 1 for the zero cone.
  std::vector<std::size_t> f_vector() const {
    std::vector<std::size_t> f(dim() + 1, 0);
    f[0] = 1;
    for (auto d : dims_) ++f[d];
    return f;
  }

  /// All nonempty faces of c (including c) as ray subsets, computed geometrically.
  std::vector<Cone> faces_of(const Cone& c) const {
    std::vector<Cone> out;
    if (c.empty()) return out;
    if (cone_is_simplicial(c)) {
      const std::size_t n = c.size();
      for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m) {
        Cone f;
        for (std::size_t j = 0; j < n; ++j)
          if (m & (std::uint64_t{1} << j)) f.push_back(c[j]);
        out.push_back(std::move(f));
      }
      return out;
    }
    auto gens = ray_vectors(c);
    auto h = cone_facets(gens, ambient_dim_);
    std::set<Cone> faces{c};
    std::vector<Cone> frontier{c};
    std::vector<Cone> facet_sets;
    for (const auto& a : h.facets) {
      Cone s;
      for (std::size_t j = 0; j < c.size(); ++j)
        if (dot(a, gens[j]) == 0) s.push_back(c[j]);
      facet_sets.push_back(std::move(s));
    }
    while (!frontier.empty()) {
      Cone f = frontier.back();
      frontier.pop_back();
      for (const auto& s : facet_sets) {
        Cone g;
        std::set_intersection(f.begin(), f.end(), s.begin(), s.end(), std::back_inserter(g));
        if (!g.empty() && faces.insert(g).second) frontier.push_back(g);
      }
    }
    out.assign(faces.begin(), faces.end());
    return out;
  }

  struct CanonicalLess {
    bool operator()(const Cone& a, const Cone& b) const {
      if (a.size() != b.size()) return a.size() < b.size();
      return a < b;
    }
  };

 private:
  // Dimensions and maximality of the stored cones, largest cones first. Subsets of an
  // independent cone inherit dim = size without a rank computation.
  void derive() {
    const std::size_t n = cones_.size();
    dims_.assign(n, 0);
    maximal_.assign(n, true);
    std::vector<bool> covered(n, false);  // dim known from an independent superset
    for (std::size_t i = n; i-- > 0;) {
      if (covered[i]) continue;
      const Cone& c = cones_[i];
      dims_[i] = rank_of_rows(ray_vectors(c));
      const std::size_t k = c.size();
      if (dims_[i] == k && k <= 20) {
        for (std::uint64_t m = 1; m + 1 < (std::uint64_t{1} << k); ++m) {
          Cone f;
          for (std::size_t j = 0; j < k; ++j)
            if (m & (std::uint64_t{1} << j)) f.push_back(c[j]);
          auto fi = index_of(f);
          if (fi == n) continue;
          maximal_[fi] = false;
          covered[fi] = true;
          dims_[fi] = f.size();
        }
        continue;
      }
      for (std::size_t skip = 0; skip < k; ++skip) {
        Cone f;
        for (std::size_t j = 0; j < k; ++j)
          if (j != skip) f.push_back(c[j]);
        auto fi = index_of(f);
        if (fi < n) maximal_[fi] = false;
      }
      if (dims_[i] != k)
        for (const auto& f : faces_of(c)) {
          auto fi = index_of(f);
          if (fi < n && fi != i) maximal_[fi] = false;
        }
    }
  }

  std::size_t ambient_dim_ = 0;
  std::vector<IntegerVector> rays_;
  std::vector<Cone> cones_;
  std::size_t lineality_dim_ = 0;
  std::vector<std::size_t> dims_;
  std::vector<bool> maximal_;
};

/// Fan with every ray negated (the linear map x -> -x).
inline Fan negated(const Fan& f) {
  std::vector<IntegerVector> r;
  for (const auto& v : f.rays()) r.push_back(-v);
  return Fan(f.ambient_dim(), std::move(r), f.cones(), f.lineality_dim());
}

/// H-representation of a cone spanned by integer rays, for exact point tests.
class ConeMembership {
 public:
  ConeMembership(const std::vector<RationalVector>& gens, std::size_t dim) : dim_(dim) {
    auto h = cone_facets(gens, dim);
    for (const auto& a : h.facets) facets_.push_back(primitive(std::span<const Rational>(a)));
    for (const auto& e : h.equations) equations_.push_back(primitive(std::span<const Rational>(e)));
  }

  bool contains(const RationalVector& x) const {
    for (const auto& e : equations_)
      if (dot(e.to_rational(), x) != 0) return false;
    for (const auto& a : facets_)
      if (dot(a.to_rational(), x) < 0) return false;
    return true;
  }

  bool contains(const IntegerVector& x) const {
    auto d = [&](const IntegerVector& a) {
      __int128 s = 0;
      for (std::size_t i = 0; i < dim_; ++i) s += static_cast<__int128>(a[i]) * x[i];
      return s;
    };
    for (const auto& e : equations_)
      if (d(e) != 0) return false;
    for (const auto& a : facets_)
      if (d(a) < 0) return false;
    return true;
  }

 private:
  std::size_t dim_;
  std::vector<IntegerVector> facets_;
  std::vector<IntegerVector> equations_;
};

/// Point location over the maximal cones of a fan.
class FanLocator {
 public:
  explicit FanLocator(const Fan& f) {
    for (const auto& c : f.maximal_cones()) {
      cones_.push_back(c);
      tests_.emplace_back(f.ray_vectors(c), f.ambient_dim());
    }
  }
  template <typename Vec>
  bool in_support(const Vec& x) const {
    for (const auto& t : tests_)
      if (t.contains(x)) return true;
    return false;
  }
  template <typename Vec>
  std::vector<Cone> containing(const Vec& x) const {
    std::vector<Cone> out;
    for (std::size_t i = 0; i < tests_.size(); ++i)
      if (tests_[i].contains(x)) out.push_back(cones_[i]);
    return out;
  }

 private:
  std::vector<Cone> cones_;
  std::vector<ConeMembership> tests_;
};

struct FanReport {
  std::size_t dim = 0;
  bool pure = true;
  bool simplicial = true;
  std::vector<std::size_t> fvector{1};
  std::vector<std::string> problems;  // empty iff the fan passed every check
  bool ok() const { return problems.empty(); }
};

struct ValidateOptions {
  bool check_intersections = true;  // pairwise face-to-face test on maximal cones
};

namespace detail {

// Both cones simplicial, so points have unique coordinates in each. The intersection is
// larger than cone(A n B) iff some kernel vector of [A-B | -(B-A) | A n B] is nonnegative
// and nonzero on its first |A-B| + |B-A| entries.
inline bool simplicial_meet(const Fan& f, const Cone& a, const Cone& b) {
  Cone only_a, only_b, shared;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
  std::vector<RationalVector> cols;
  for (auto i : only_a) cols.push_back(f.rays()[i].to_rational());
  for (auto i : only_b) cols.push_back((-f.rays()[i]).to_rational());
  for (auto i : shared) cols.push_back(f.rays()[i].to_rational());
  const std::size_t p = only_a.size() + only_b.size();
  RationalMatrix ker = free_variable_kernel(RationalMatrix::from_rows(cols).transpose());
  const std::size_t k = ker.cols();
  if (k == 0) return true;
  if (k == 1) {
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < p; ++i) {
      pos |= ker(i, 0) > 0;
      neg |= ker(i, 0) < 0;
    }
    return pos == neg;
  }
  // K y >= 0 on the first p rows with their sum 1; y = y+ - y-, slacks s.
  const std::size_t nv = 2 * k + p;
  std::vector<RationalVector> rows;
  RationalVector rhs;
  RationalVector total(nv);
  for (std::size_t i = 0; i < p; ++i) {
    RationalVector row(nv);
    for (std::size_t j = 0; j < k; ++j) {
      row[j] = ker(i, j);
      row[k + j] = -ker(i, j);
      total[j] += ker(i, j);
      total[k + j] -= ker(i, j);
    }
    row[2 * k + i] = -1;
    rows.push_back(std::move(row));
    rhs.push_back(0);
  }
  rows.push_back(std::move(total));
  rhs.push_back(1);
  return lp_maximize(rows, rhs, RationalVector(nv)).status == LpStatus::infeasible;
}

// cone(A) and cone(B) meet in cone(A n B)?
inline bool meets_in_common_face(const Fan& f, const Cone& a, const Cone& b) {
  const std::size_t d = f.ambient_dim();
  Cone all;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all));
  // Independent rays on the union: the two cones are faces of one simplicial cone.
  if (all.size() <= d && rank_of_rows(f.ray_vectors(all)) == all.size()) return true;
  if (f.cone_is_simplicial(a) && f.cone_is_simplicial(b)) return simplicial_meet(f, a, b);
  auto ha = cone_facets(f.ray_vectors(a), d);
  auto hb = cone_facets(f.ray_vectors(b), d);
  std::vector<RationalVector> ineq = ha.facets;
  ineq.insert(ineq.end(), hb.facets.begin(), hb.facets.end());
  std::vector<RationalVector> eq = ha.equations;
  eq.insert(eq.end(), hb.equations.begin(), hb.equations.end());
  auto inter = extreme_rays(ineq, eq, d);
  if (!inter.lineality.empty()) return false;
  Cone shared;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
  if (shared.empty()) return inter.rays.empty();
  ConeMembership in_shared(f.ray_vectors(shared), d);
  for (const auto& r : inter.rays)
    if (!in_shared.contains(r)) return false;
  return true;
}

}  // namespace detail

/// Structural report. Problems are collected, never thrown.
inline FanReport validate(const Fan& f, ValidateOptions opt = {}) {
  FanReport rep;
  std::set<IntegerVector> seen;
  for (std::size_t i = 0; i < f.rays().size(); ++i) {
    const auto& r = f.rays()[i];
    if (r.is_zero())
      rep.problems.push_back("ray " + std::to_string(i) + " is zero");
    else if (!r.is_primitive())
      rep.problems.push_back("ray " + std::to_string(i) + " " + r.str() + " is not primitive");
    if (!seen.insert(r).second) rep.problems.push_back("ray " + std::to_string(i) + " is a duplicate");
  }
  rep.fvector = f.f_vector();
  rep.dim = rep.fvector.size() - 1;
  rep.simplicial = f.is_simplicial();
  auto maxc = f.maximal_cones();
  for (const auto& c : maxc)
    if (f.cone_dim(c) != rep.dim) rep.pure = false;
  for (const auto& c : f.cones()) {
    for (const auto& face : f.faces_of(c))
      if (!f.has_cone(face)) {
        std::string s = "{";
        for (std::size_t j = 0; j < face.size(); ++j) s += (j ? " " : "") + std::to_string(face[j]);
        rep.problems.push_back("face " + s + "} of a stored cone is missing");
        break;
      }
  }
  if (opt.check_intersections) {
    for (std::size_t i = 0; i < maxc.size(); ++i)
      for (std::size_t j = i + 1; j < maxc.size(); ++j)
        if (!detail::meets_in_common_face(f, maxc[i], maxc[j])) {
          rep.problems.push_back("maximal cones " + std::to_string(i) + " and " + std::to_string(j) +
                                 " do not meet in a common face");
        }
  }
  return rep;
}

/// Every codimension-one cone of a pure full-dimensional fan lies in exactly two maximal cones.
inline bool is_complete(const Fan& f) {
  const std::size_t d = f.ambient_dim();
  if (f.dim() != d) return false;
  auto maxc = f.maximal_cones();
  std::map<Cone, int> walls;
  for (const auto& c : maxc) {
    if (f.cone_dim(c) != d) return false;
    for (const auto& face : f.faces_of(c))
      if (f.cone_dim(face) + 1 == d) ++walls[face];
  }
  return std::all_of(walls.begin(), walls.end(), [](const auto& kv) { return kv.second == 2; });
}

/// Star subdivision of a simplicial fan at the primitive vector through v.
inline Fan stellar_subdivision(const Fan& f, const IntegerVector& v) {
  if (v.size() != f.ambient_dim()) throw MathError("stellar_subdivision: vector has wrong length");
  if (v.is_zero()) throw MathError("stellar_subdivision: zero vector");
  if (!f.is_simplicial()) throw MathError("stellar_subdivision: fan is not simplicial");
  const IntegerVector u = primitive(v);
  for (const auto& r : f.rays())
    if (r == u) return f;

  auto maxc = f.maximal_cones();
  Cone carrier;
  bool found = false;
  const RationalVector ur = u.to_rational();
  for (const auto& c : maxc) {
    RationalMatrix m = RationalMatrix::from_rows(f.ray_vectors(c)).transpose();
    auto sol = solve(m, ur);
    if (!sol) continue;
    if (std::any_of(sol->begin(), sol->end(), [](const Rational& q) { return q < 0; })) continue;
    for (std::size_t j = 0; j < c.size(); ++j)
      if ((*sol)[j] != 0) carrier.push_back(c[j]);
    found = true;
    break;
  }
  if (!found) throw MathError("stellar_subdivision: " + u.str() + " is outside the support");

  std::vector<IntegerVector> rays = f.rays();
  rays.push_back(u);
  const std::size_t nu = rays.size() - 1;
  std::vector<Cone> out;
  for (const auto& c : maxc) {
    if (!is_subset(carrier, c)) {
      out.push_back(c);
      continue;
    }
    for (auto t : carrier) {
      Cone nc;
      for (auto i : c)
        if (i != t) nc.push_back(i);
      nc.push_back(nu);
      out.push_back(std::move(nc));
    }
  }
  Fan result = Fan::from_maximal_cones(f.ambient_dim(), std::move(rays), out, f.lineality_dim());
  auto rep = validate(result, {.check_intersections = false});
  if (!rep.ok()) throw MathError("stellar_subdivision: result failed validation: " + rep.problems.front());
  return result;
}

using PointOracle = std::function<bool(const RationalVector&)>;

struct SubfanResult {
  Fan fan;                             // rays re-indexed to the kept rays
  std::vector<std::size_t> ray_origin;  // subfan ray i is ambient ray ray_origin[i]
  std::vector<Cone> mixed;             // barycenter passes but some face fails (ambient indexing)
};

/// Cones whose ray-sum sample point and all faces pass the oracle.
inline SubfanResult subfan_meeting(const Fan& f, const PointOracle& oracle) {
  std::vector<bool> ray_ok(f.rays().size());
  for (std::size_t i = 0; i < ray_ok.size(); ++i) ray_ok[i] = oracle(f.rays()[i].to_rational());
  std::set<Cone> kept;
  SubfanResult res;
  for (const auto& c : f.cones()) {  // canonical order: faces come first
    RationalVector bary(f.ambient_dim());
    for (auto i : c)
      for (std::size_t k = 0; k < bary.size(); ++k) bary[k] += f.rays()[i][k];
    bool center = c.size() == 1 ? ray_ok[c[0]] : oracle(bary);
    if (!center) continue;
    bool faces_ok = true;
    for (const auto& face : f.faces_of(c))
      if (face != c && !kept.count(face)) faces_ok = false;
    if (faces_ok)
      kept.insert(c);
    else
      res.mixed.push_back(c);
  }
  std::map<std::size_t, std::size_t> reindex;
  std::vector<IntegerVector> rays;
  for (std::size_t i = 0; i < f.rays().size(); ++i)
    if (kept.count(Cone{i})) {
      reindex[i] = rays.size();
      rays.push_back(f.rays()[i]);
      res.ray_origin.push_back(i);
    }
  std::vector<Cone> cones;
  for (const auto& c : kept) {
    Cone nc;
    for (auto i : c) nc.push_back(reindex.at(i));
    cones.push_back(std::move(nc));
  }
  res.fan = Fan(f.ambient_dim(), std::move(rays), std::move(cones), f.lineality_dim());
  return res;
}

/// Chain sigma_1 < sigma_2 < ... of cones with dimensions 1, 2, ...
using FlagChain = std::vector<Cone>;

/// All flag chains of length n among the cones of `sub` whose rays lie in `ambient_cone`.
inline std::vector<FlagChain> flag_chains(const Fan& sub, const Cone& ambient_cone, std::size_t n) {
  std::vector<std::vector<Cone>> by_dim(n + 1);
  for (const auto& c : sub.cones()) {
    if (!is_subset(c, ambient_cone)) continue;
    std::size_t d = sub.cone_dim(c);
    if (d >= 1 && d <= n) by_dim[d].push_back(c);
  }
  std::vector<FlagChain> out;
  if (n == 0) return out;
  FlagChain cur;
  std::function<void(std::size_t)> extend = [&](std::size_t d) {
    if (d > n) {
      out.push_back(cur);
      return;
    }
    for (const auto& c : by_dim[d]) {
      if (!cur.empty() && !is_subset(cur.back(), c)) continue;
      cur.push_back(c);
      extend(d + 1);
      cur.pop_back();
    }
  };
  extend(1);
  std::sort(out.begin(), out.end());
  return out;
}

/// Indices (in `f`) of the rays equal to the given vectors; throws if one is missing.
inline Cone ray_indices(const Fan& f, const std::vector<IntegerVector>& vs) {
  Cone c;
  for (const auto& v : vs) {
    auto it = std::find(f.rays().begin(), f.rays().end(), v);
    if (it == f.rays().end()) throw MathError("ray " + v.str() + " is not a ray of the fan");
    c.push_back(static_cast<std::size_t>(it - f.rays().begin()));
  }
  std::sort(c.begin(), c.end());
  return c;
}

}  // namespace mdstrop
