#pragma once

// Exact rational polytopes with cross-validated V- and H-representations.

#include <mdstrop/cone.hpp>
#include <mdstrop/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <vector>

namespace mdstrop {

/// normal . x >= offset
struct Halfspace {
  IntegerVector normal;
  Rational offset;
  bool operator==(const Halfspace&) const = default;
};

/// normal . x == value  (affine hull of lower-dimensional polytopes)
struct Hyperplane {
  IntegerVector normal;
  Rational value;
  bool operator==(const Hyperplane&) const = default;
};

class Polytope {
 public:
  Polytope() = default;

  std::size_t ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t affine_dim() const noexcept { return affine_dim_; }
  const std::vector<RationalVector>& vertices() const noexcept { return vertices_; }
  const std::vector<Halfspace>& halfspaces() const noexcept { return halfspaces_; }
  const std::vector<Hyperplane>& equations() const noexcept { return equations_; }
  bool full_dimensional() const noexcept { return affine_dim_ == ambient_dim_; }

  bool contains(const RationalVector& x) const {
    if (x.size() != ambient_dim_) throw MathError("polytope: point dimension mismatch");
    for (const auto& e : equations_)
      if (dot(e.normal.to_rational(), x) != e.value) return false;
    for (const auto& h : halfspaces_)
      if (dot(h.normal.to_rational(), x) < h.offset) return false;
    return true;
  }

  bool is_vertex(const RationalVector& x) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), x);
  }

  bool operator==(const Polytope& o) const {
    return ambient_dim_ == o.ambient_dim_ && vertices_ == o.vertices_;
  }

  friend Polytope hull(std::vector<RationalVector> points);

 private:
  std::size_t ambient_dim_ = 0;
  std::size_t affine_dim_ = 0;
  std::vector<RationalVector> vertices_;
  std::vector<Halfspace> halfspaces_;
  std::vector<Hyperplane> equations_;
};

namespace detail {

inline std::size_t affine_rank(const std::vector<RationalVector>& pts, const std::vector<std::size_t>& idx) {
  if (idx.size() <= 1) return 0;
  std::vector<RationalVector> diffs;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    RationalVector d = pts[idx[i]];
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= pts[idx[0]][k];
    diffs.push_back(std::move(d));
  }
  return rank_of_rows(diffs);
}

// Scales (normal, offset) jointly so the normal becomes a primitive integer vector.
inline std::pair<IntegerVector, Rational> primitive_affine(const RationalVector& normal, const Rational& offset) {
  IntegerVector p = primitive(std::span<const Rational>(normal));
  // factor with p = factor * normal
  std::size_t k = 0;
  while (normal[k] == 0) ++k;
  Rational factor = Rational(p[k]) / normal[k];
  return {p, offset * factor};
}

}  // namespace detail

/// Convex hull with irredundant V/H representations. Vertices are sorted lexicographically.
inline Polytope hull(std::vector<RationalVector> points) {
  if (points.empty()) throw MathError("hull: empty point set");
  const std::size_t d = points.front().size();
  for (const auto& p : points)
    if (p.size() != d) throw MathError("hull: points of different dimensions");
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  Polytope P;
  P.ambient_dim_ = d;
  const RationalVector& p0 = points.front();
  std::vector<RationalVector> diffs;
  for (std::size_t i = 1; i < points.size(); ++i) {
    RationalVector v = points[i];
    for (std::size_t k = 0; k < d; ++k) v[k] -= p0[k];
    diffs.push_back(std::move(v));
  }
  std::vector<std::size_t> pivots;
  std::size_t k = 0;
  if (!diffs.empty()) {
    auto rr = rref(RationalMatrix::from_rows(diffs));
    pivots = rr.pivots;
    k = pivots.size();
  }
  P.affine_dim_ = k;

  // Equations of the affine hull: kernel of the difference rows.
  {
    std::vector<RationalVector> perp;
    if (k == 0) {
      for (std::size_t i = 0; i < d; ++i) {
        RationalVector e(d);
        e[i] = 1;
        perp.push_back(e);
      }
    } else if (k < d) {
      RationalMatrix kb = kernel_basis(RationalMatrix::from_rows(diffs));
      for (std::size_t j = 0; j < kb.cols(); ++j) perp.push_back(kb.col(j));
    }
    for (const auto& e : perp) {
      auto [n, val] = detail::primitive_affine(e, dot(e, p0));
      P.equations_.push_back({n, val});
    }
  }

  if (k == 0) {
    P.vertices_ = {p0};
    return P;
  }

  // Local coordinates: restriction to the pivot coordinates is injective on the hull.
  auto local = [&](const RationalVector& x) {
    RationalVector y(k + 1);
    y[0] = 1;
    for (std::size_t i = 0; i < k; ++i) y[i + 1] = x[pivots[i]];
    return y;
  };
  std::vector<RationalVector> lifted;
  lifted.reserve(points.size());
  for (const auto& p : points) lifted.push_back(local(p));
  auto facets = extreme_rays(lifted, {}, k + 1);
  if (!facets.lineality.empty()) throw MathError("hull: internal error, non-full-dimensional local cone");

  std::vector<std::vector<bool>> tight(points.size(), std::vector<bool>(facets.rays.size()));
  for (std::size_t f = 0; f < facets.rays.size(); ++f) {
    const auto& a = facets.rays[f];  // a0 + a' . y >= 0
    RationalVector normal(d);
    for (std::size_t i = 0; i < k; ++i) normal[pivots[i]] = a[i + 1];
    auto [n, off] = detail::primitive_affine(normal, -a[0]);
    P.halfspaces_.push_back({n, off});
    for (std::size_t i = 0; i < points.size(); ++i) tight[i][f] = dot(a, lifted[i]) == 0;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<RationalVector> act;
    for (std::size_t f = 0; f < facets.rays.size(); ++f)
      if (tight[i][f]) act.push_back(facets.rays[f]);
    if (act.size() >= k && rank_of_rows(act) == k) P.vertices_.push_back(points[i]);
  }
  std::sort(P.halfspaces_.begin(), P.halfspaces_.end(), [](const Halfspace& a, const Halfspace& b) {
    return std::tie(a.normal, a.offset) < std::tie(b.normal, b.offset);
  });
  return P;
}

/// {x : A_i . x >= b_i}; throws MathError when the region is empty or unbounded.
inline Polytope polytope_from_halfspaces(const std::vector<RationalVector>& normals, const RationalVector& offsets,
                                         std::size_t dim) {
  if (normals.size() != offsets.size()) throw MathError("polytope_from_halfspaces: size mismatch");
  // Homogenize: (t, x) with a.x - b t >= 0, t >= 0.
  std::vector<RationalVector> ineq;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (normals[i].size() != dim) throw MathError("polytope_from_halfspaces: normal length mismatch");
    RationalVector h(dim + 1);
    h[0] = -offsets[i];
    for (std::size_t j = 0; j < dim; ++j) h[j + 1] = normals[i][j];
    ineq.push_back(std::move(h));
  }
  RationalVector t(dim + 1);
  t[0] = 1;
  ineq.push_back(t);
  auto gens = extreme_rays(ineq, {}, dim + 1);
  if (!gens.lineality.empty()) throw MathError("polyhedron is unbounded (contains a line)");
  std::vector<RationalVector> verts;
  for (const auto& r : gens.rays) {
    if (r[0] == 0) throw MathError("polyhedron is unbounded");
    RationalVector v(dim);
    for (std::size_t j = 0; j < dim; ++j) v[j] = r[j + 1] / r[0];
    verts.push_back(std::move(v));
  }
  if (verts.empty()) throw MathError("polyhedron is empty");
  return hull(std::move(verts));
}

inline Polytope minkowski_sum(const Polytope& p, const Polytope& q) {
  if (p.ambient_dim() != q.ambient_dim()) throw MathError("minkowski_sum: dimension mismatch");
  std::vector<RationalVector> pts;
  for (const auto& a : p.vertices())
    for (const auto& b : q.vertices()) {
      RationalVector s = a;
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += b[i];
      pts.push_back(std::move(s));
    }
  return hull(std::move(pts));
}

inline Polytope scale(const Polytope& p, const Rational& factor) {
  if (factor < 0) throw MathError("scale: negative factor");
  std::vector<RationalVector> pts;
  for (auto v : p.vertices()) {
    for (auto& x : v) x *= factor;
    pts.push_back(std::move(v));
  }
  return hull(std::move(pts));
}

inline Polytope translate(const Polytope& p, const RationalVector& by) {
  std::vector<RationalVector> pts;
  for (auto v : p.vertices()) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += by[i];
    pts.push_back(std::move(v));
  }
  return hull(std::move(pts));
}

/// Pulling triangulation from the lexicographically first vertex, recursively over faces.
/// Returns simplices as vertex index lists (each of size affine_dim + 1).
inline std::vector<std::vector<std::size_t>> pulling_triangulation(const Polytope& P) {
  const auto& V = P.vertices();
  std::vector<std::vector<std::size_t>> facet_sets;
  for (const auto& h : P.halfspaces()) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < V.size(); ++i)
      if (dot(h.normal.to_rational(), V[i]) == h.offset) s.push_back(i);
    facet_sets.push_back(std::move(s));
  }
  std::function<std::vector<std::vector<std::size_t>>(const std::vector<std::size_t>&, std::size_t)> tri =
      [&](const std::vector<std::size_t>& face, std::size_t dim) -> std::vector<std::vector<std::size_t>> {
    if (dim == 0) return {{face.front()}};
    const std::size_t apex = face.front();
    std::set<std::vector<std::size_t>> subfaces;
    for (const auto& fs : facet_sets) {
      std::vector<std::size_t> g;
      std::set_intersection(face.begin(), face.end(), fs.begin(), fs.end(), std::back_inserter(g));
      if (g.empty() || g.size() == face.size()) continue;
      if (std::binary_search(g.begin(), g.end(), apex)) continue;
      if (detail::affine_rank(V, g) + 1 != dim) continue;
      subfaces.insert(std::move(g));
    }
    std::vector<std::vector<std::size_t>> out;
    for (const auto& g : subfaces)
      for (auto s : tri(g, dim - 1)) {
        s.insert(s.begin(), apex);
        out.push_back(std::move(s));
      }
    return out;
  };
  std::vector<std::size_t> all(V.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return tri(all, P.affine_dim());
}

/// dim! * Euclidean volume of a full-dimensional polytope.
inline Rational normalized_volume(const Polytope& P) {
  if (!P.full_dimensional())
    throw MathError("normalized_volume: polytope is not full-dimensional (affine dimension " +
                    std::to_string(P.affine_dim()) + " in ambient " + std::to_string(P.ambient_dim()) + ")");
  const std::size_t d = P.ambient_dim();
  if (d == 0) return 1;
  Rational total = 0;
  for (const auto& s : pulling_triangulation(P)) {
    RationalMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, j) = P.vertices()[s[i + 1]][j] - P.vertices()[s[0]][j];
    // determinant via elimination
    Rational det = 1;
    for (std::size_t c = 0; c < d; ++c) {
      std::size_t p = c;
      while (p < d && m(p, c) == 0) ++p;
      if (p == d) {
        det = 0;
        break;
      }
      if (p != c) {
        for (std::size_t j = 0; j < d; ++j) std::swap(m(p, j), m(c, j));
        det = -det;
      }
      det *= m(c, c);
      for (std::size_t r = c + 1; r < d; ++r) {
        if (m(r, c) == 0) continue;
        Rational f = m(r, c) / m(c, c);
        for (std::size_t j = c; j < d; ++j) m(r, j) -= f * m(c, j);
      }
    }
    total += abs(det);
  }
  return total;
}

struct LatticePoints {
  std::vector<IntegerVector> points;  // lexicographic order
  bool vertices_integral = true;
};

/// Bounding-box scan.
inline LatticePoints lattice_points(const Polytope& P) {
  LatticePoints out;
  const std::size_t d = P.ambient_dim();
  for (const auto& v : P.vertices())
    for (const auto& x : v)
      if (!is_integer(x)) out.vertices_integral = false;
  if (P.vertices().empty()) return out;
  std::vector<std::int64_t> lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    Rational mn = P.vertices().front()[i], mx = mn;
    for (const auto& v : P.vertices()) {
      mn = std::min(mn, v[i]);
      mx = std::max(mx, v[i]);
    }
    Integer flo = numerator(mx) / denominator(mx);
    if (Rational(flo) > mx) flo -= 1;
    Integer cei = numerator(mn) / denominator(mn);
    if (Rational(cei) < mn) cei += 1;
    lo[i] = cei.convert_to<std::int64_t>();
    hi[i] = flo.convert_to<std::int64_t>();
    if (lo[i] > hi[i]) return out;
  }
  if (d == 0) {
    out.points.emplace_back(std::size_t{0});
    return out;
  }
  std::vector<std::int64_t> cur(lo);
  for (;;) {
    RationalVector x(cur.begin(), cur.end());
    if (P.contains(x)) out.points.emplace_back(cur);
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (cur[i] < hi[i]) {
        ++cur[i];
        for (std::size_t j = i + 1; j < d; ++j) cur[j] = lo[j];
        break;
      }
      if (i == 0) return out;
    }
  }
}

}  // namespace mdstrop
