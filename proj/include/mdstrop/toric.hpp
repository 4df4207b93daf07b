#pragma once

// Divisor classes on complete simplicial toric varieties: class group presentation,
// wall relations, nef cone, divisor polytopes, push-pull bases and Minkowski
// decomposition of a class over a basis.

#include <mdstrop/cone.hpp>
#include <mdstrop/fan.hpp>
#include <mdstrop/lp.hpp>
#include <mdstrop/polytope.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace mdstrop {

struct DivisorClass {
  IntegerVector coords;

  bool operator==(const DivisorClass&) const = default;
  std::string str() const { return coords.str(); }
};

/// Canonical order is lexicographically descending.
inline bool canonical_before(const DivisorClass& a, const DivisorClass& b) { return a.coords > b.coords; }

inline void sort_canonical(std::vector<DivisorClass>& v) { std::sort(v.begin(), v.end(), canonical_before); }

/// Linear map between class lattices (target_rank x source_rank).
struct ClassMap {
  RationalMatrix matrix;

  RationalVector apply(const RationalVector& c) const {
    if (c.size() != matrix.cols())
      throw MathError("class map expects " + std::to_string(matrix.cols()) + " coordinates, got " +
                      std::to_string(c.size()));
    return matrix * c;
  }
  ClassMap then(const ClassMap& next) const {
    if (next.matrix.cols() != matrix.rows()) throw MathError("class maps are not composable");
    return {next.matrix * matrix};
  }
};

struct ClassGroup {
  RationalMatrix ray_matrix;        // n x d, row i is ray i
  RationalMatrix class_projection;  // r x n, kernel = row space of ray pairings
  RationalMatrix section;           // n x r with class_projection * section = I
  std::vector<std::size_t> free_rays;

  std::size_t rank() const { return class_projection.rows(); }

  RationalVector class_of(const RationalVector& divisor) const { return class_projection * divisor; }
  RationalVector lift(const RationalVector& cls) const { return section * cls; }
};

/// Class group of the toric variety of a complete fan, Z^n / M.
inline ClassGroup class_group_presentation(const Fan& f) {
  if (!is_complete(f)) throw MathError("class_group_presentation: fan is not complete");
  const std::size_t n = f.rays().size();
  RationalMatrix r = RationalMatrix::from_integer_rows(f.rays());
  if (rank(r) != f.ambient_dim()) throw MathError("class_group_presentation: rays do not span");
  RationalMatrix rt = r.transpose();
  auto red = rref(rt);
  ClassGroup g;
  g.ray_matrix = r;
  g.class_projection = free_variable_kernel(rt).transpose();
  for (std::size_t c = 0, p = 0; c < n; ++c) {
    if (p < red.pivots.size() && red.pivots[p] == c)
      ++p;
    else
      g.free_rays.push_back(c);
  }
  g.section = RationalMatrix(n, g.free_rays.size());
  for (std::size_t j = 0; j < g.free_rays.size(); ++j) g.section(g.free_rays[j], j) = 1;
  return g;
}

/// Fan of projective space on d+1 rays summing to zero: every d of them span a cone.
inline Fan projective_space_fan(const std::vector<IntegerVector>& rays) {
  if (rays.empty()) throw MathError("projective_space_fan: no rays");
  const std::size_t d = rays.front().size();
  if (rays.size() != d + 1) throw MathError("projective_space_fan: need ambient dimension + 1 rays");
  IntegerVector sum(d);
  for (const auto& r : rays) sum += r;
  if (!sum.is_zero()) throw MathError("projective_space_fan: rays do not sum to zero");
  if (rank(RationalMatrix::from_integer_rows(rays)) != d) throw MathError("projective_space_fan: rays do not span");
  std::vector<Cone> maxc;
  for (std::size_t skip = 0; skip <= d; ++skip) {
    Cone c;
    for (std::size_t i = 0; i <= d; ++i)
      if (i != skip) c.push_back(i);
    maxc.push_back(std::move(c));
  }
  return Fan::from_maximal_cones(d, rays, maxc);
}

/// Ambient fan from Gale rows (I_m ; -A): projective space on the first m+1 rows, then
/// star subdivisions at the remaining rows in order. Ray i of the result is row i.
inline Fan ambient_fan_from_gale(const RationalMatrix& gale) {
  const std::size_t m = gale.cols();
  if (gale.rows() < m + 1) throw MathError("ambient_fan_from_gale: too few rows");
  std::vector<IntegerVector> rows;
  for (std::size_t i = 0; i < gale.rows(); ++i) {
    std::vector<std::int64_t> v;
    for (std::size_t j = 0; j < m; ++j) {
      if (!is_integer(gale(i, j))) throw MathError("ambient_fan_from_gale: non-integral row");
      v.push_back(to_int64(gale(i, j)));
    }
    rows.emplace_back(std::move(v));
  }
  Fan f = projective_space_fan({rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(m + 1)});
  for (std::size_t i = m + 1; i < rows.size(); ++i) {
    if (!rows[i].is_primitive()) throw MathError("ambient_fan_from_gale: row " + std::to_string(i) + " is not primitive");
    f = stellar_subdivision(f, rows[i]);
    if (f.rays().size() != i + 1) throw MathError("ambient_fan_from_gale: row " + std::to_string(i) + " repeats a ray");
  }
  return f;
}

struct WallRelation {
  Cone wall;                 // the shared facet
  std::size_t a = 0, b = 0;  // rays completing it to the two maximal cones, a < b
  IntegerVector relation;    // sum_i relation_i v_i = 0, positive at a and b
  RationalVector functional; // pairing with class coordinates
};

/// One relation per wall; these curve classes generate the Mori cone.
inline std::vector<WallRelation> mori_curves(const Fan& f, const ClassGroup& g) {
  if (!f.is_simplicial()) throw MathError("mori_curves: fan is not simplicial");
  const std::size_t d = f.ambient_dim();
  std::map<Cone, std::vector<std::size_t>> walls;  // wall -> opposite rays
  for (const auto& c : f.maximal_cones()) {
    if (c.size() != d) throw MathError("mori_curves: maximal cone of wrong dimension");
    for (std::size_t j = 0; j < c.size(); ++j) {
      Cone w;
      for (std::size_t k = 0; k < c.size(); ++k)
        if (k != j) w.push_back(c[k]);
      walls[w].push_back(c[j]);
    }
  }
  std::vector<WallRelation> out;
  for (const auto& [w, opp] : walls) {
    if (opp.size() != 2) throw MathError("mori_curves: wall not shared by exactly two cones");
    WallRelation rel;
    rel.wall = w;
    rel.a = std::min(opp[0], opp[1]);
    rel.b = std::max(opp[0], opp[1]);
    std::vector<std::size_t> idx{rel.a, rel.b};
    idx.insert(idx.end(), w.begin(), w.end());
    RationalMatrix m(d, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (std::size_t i = 0; i < d; ++i) m(i, j) = f.rays()[idx[j]][i];
    RationalMatrix k = kernel_basis(m);
    if (k.cols() != 1) throw MathError("mori_curves: degenerate wall");
    RationalVector kv = k.col(0);
    if (kv[0] < 0)
      for (auto& x : kv) x = -x;
    RationalVector full(f.rays().size());
    for (std::size_t j = 0; j < idx.size(); ++j) full[idx[j]] = kv[j];
    rel.relation = primitive(std::span<const Rational>(full));
    RationalVector rr = rel.relation.to_rational();
    rel.functional.assign(g.rank(), Rational(0));
    for (std::size_t j = 0; j < g.rank(); ++j)
      for (std::size_t i = 0; i < rr.size(); ++i) rel.functional[j] += rr[i] * g.section(i, j);
    out.push_back(std::move(rel));
  }
  return out;
}

/// Extremal generators of the nef cone in class coordinates, primitive, canonical order.
inline std::vector<DivisorClass> nef_cone(const Fan& f) {
  auto g = class_group_presentation(f);
  auto curves = mori_curves(f, g);
  std::vector<RationalVector> ineq;
  for (const auto& c : curves) ineq.push_back(c.functional);
  auto gens = extreme_rays(ineq, {}, g.rank());
  if (!gens.lineality.empty()) throw MathError("nef_cone: nef cone contains a line");
  std::vector<DivisorClass> out;
  for (const auto& r : gens.rays) out.push_back({primitive(std::span<const Rational>(r))});
  sort_canonical(out);
  return out;
}

/// {m : <m, v_i> >= -a_i}.
inline Polytope divisor_polytope(const Fan& f, const RationalVector& a) {
  if (a.size() != f.rays().size())
    throw MathError("divisor_polytope: expected " + std::to_string(f.rays().size()) + " coefficients");
  std::vector<RationalVector> normals;
  RationalVector offsets;
  for (std::size_t i = 0; i < a.size(); ++i) {
    normals.push_back(f.rays()[i].to_rational());
    offsets.push_back(-a[i]);
  }
  return polytope_from_halfspaces(normals, offsets, f.ambient_dim());
}

/// push(restrict(g)) for each generator; zero images dropped, positive multiples
/// merged into the smallest one, canonical order.
inline std::vector<DivisorClass> push_pull_basis(const std::vector<DivisorClass>& nef_gens, const ClassMap& restrict,
                                                 const ClassMap& push) {
  ClassMap both = restrict.then(push);
  std::map<IntegerVector, DivisorClass> by_direction;
  for (const auto& g : nef_gens) {
    RationalVector img = both.apply(g.coords.to_rational());
    if (std::all_of(img.begin(), img.end(), [](const Rational& q) { return q == 0; })) continue;
    IntegerVector dir = primitive(std::span<const Rational>(img));
    bool integral = std::all_of(img.begin(), img.end(), [](const Rational& q) { return is_integer(q); });
    DivisorClass c{dir};
    if (integral) {
      std::vector<std::int64_t> v;
      for (const auto& q : img) v.push_back(to_int64(q));
      c.coords = IntegerVector(std::move(v));
    }
    auto it = by_direction.find(dir);
    if (it == by_direction.end() || canonical_before(it->second, c)) by_direction[dir] = c;
  }
  std::vector<DivisorClass> out;
  for (auto& [dir, c] : by_direction) out.push_back(c);
  sort_canonical(out);
  return out;
}

struct Decomposition {
  bool feasible = false;
  RationalVector coefficients;  // one per basis element, when feasible
  bool unique = true;
  RationalVector certificate;   // y with y.b_i >= 0 for all i and y.target < 0, when infeasible
};

/// Nonnegative a with sum a_i basis_i = target. When the solution is not unique the
/// coefficients are maximized greedily with the classes taken in canonical order, so the
/// answer does not depend on how the basis is listed.
inline Decomposition minkowski_decompose(const DivisorClass& target, const std::vector<DivisorClass>& basis) {
  const std::size_t r = target.coords.size();
  const std::size_t k = basis.size();
  for (const auto& b : basis)
    if (b.coords.size() != r) throw MathError("minkowski_decompose: basis class has wrong length");
  std::vector<RationalVector> rows(r, RationalVector(k));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < k; ++j) rows[i][j] = basis[j].coords[i];
  RationalVector t = target.coords.to_rational();

  Decomposition res;
  auto first = lp_maximize(rows, t, RationalVector(k));
  if (first.status == LpStatus::infeasible) {
    // minimize y.t over {y : y.b_j >= 0, -1 <= y <= 1}, with u = y + 1 in [0, 2].
    // Variables: u (r), s (k) surplus, w (r) slack.
    const std::size_t nv = r + k + r;
    std::vector<RationalVector> a;
    RationalVector rhs;
    for (std::size_t j = 0; j < k; ++j) {
      RationalVector row(nv);
      Rational sum = 0;
      for (std::size_t i = 0; i < r; ++i) {
        row[i] = basis[j].coords[i];
        sum += basis[j].coords[i];
      }
      row[r + j] = -1;
      a.push_back(std::move(row));
      rhs.push_back(sum);
    }
    for (std::size_t i = 0; i < r; ++i) {
      RationalVector row(nv);
      row[i] = 1;
      row[r + k + i] = 1;
      a.push_back(std::move(row));
      rhs.push_back(2);
    }
    RationalVector c(nv);
    for (std::size_t i = 0; i < r; ++i) c[i] = -t[i];
    auto cert = lp_maximize(a, rhs, c);
    if (cert.status != LpStatus::optimal) throw MathError("minkowski_decompose: certificate LP failed");
    RationalVector y(r);
    for (std::size_t i = 0; i < r; ++i) y[i] = cert.x[i] - 1;
    res.certificate = y;
    return res;
  }
  res.feasible = true;

  auto unit = [&](std::size_t j, int sign) {
    RationalVector c(k);
    c[j] = sign;
    return c;
  };
  std::vector<RationalVector> fixed_rows = rows;
  RationalVector fixed_rhs = t;
  res.coefficients.assign(k, Rational(0));
  std::vector<std::size_t> visit(k);
  for (std::size_t j = 0; j < k; ++j) visit[j] = j;
  std::stable_sort(visit.begin(), visit.end(),
                   [&](std::size_t x, std::size_t y) { return canonical_before(basis[x], basis[y]); });
  for (std::size_t j : visit) {
    auto hi = lp_maximize(fixed_rows, fixed_rhs, unit(j, 1));
    if (hi.status == LpStatus::unbounded) throw MathError("minkowski_decompose: basis cone is not pointed");
    res.coefficients[j] = hi.objective;
    RationalVector pin(k);
    pin[j] = 1;
    fixed_rows.push_back(std::move(pin));
    fixed_rhs.push_back(hi.objective);
  }
  for (std::size_t j = 0; j < k && res.unique; ++j) {
    auto hi = lp_maximize(rows, t, unit(j, 1));
    auto lo = lp_maximize(rows, t, unit(j, -1));
    if (hi.objective != -lo.objective) res.unique = false;
  }
  return res;
}

}  // namespace mdstrop
