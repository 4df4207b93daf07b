#pragma once

// Bergman fans of linear matroids: fine (chains of flats) and coarse (nested sets of
// connected flats) structures, and the circuit membership test for their support.
// Max convention, dehomogenized by setting coordinate 0 to zero.

#include <mdstrop/fan.hpp>
#include <mdstrop/matroid.hpp>

#include <functional>
#include <string>
#include <vector>

namespace mdstrop {

enum class Convention { max, min };

struct TropicalFan {
  Fan fan;
  std::vector<Flat> flat_labels;  // flat_labels[i] is the flat of ray i
  std::string convention = "max";
  std::size_t dehomogenized_by = 0;
};

/// -e_F shifted so that coordinate 0 vanishes, with coordinate 0 dropped.
inline IntegerVector ray_of_flat(const IndexSet& flat, std::size_t ground_size) {
  if (ground_size < 2) throw MathError("ray_of_flat: ground set needs at least two elements");
  std::vector<std::int64_t> v(ground_size, 0);
  for (auto i : flat) v.at(i) = -1;
  const std::int64_t shift = -v[0];
  std::vector<std::int64_t> out;
  for (std::size_t i = 1; i < ground_size; ++i) out.push_back(v[i] + shift);
  IntegerVector r(std::move(out));
  if (r.is_zero()) throw MathError("ray_of_flat: empty or full flat has no ray");
  return primitive(r);
}

namespace detail {

inline void reject_loops(const Matroid& m) {
  auto l = m.loops();
  if (!l.empty()) throw MathError("matroid has a loop at element " + std::to_string(l.front()));
}

inline TropicalFan assemble(const Matroid& m, std::vector<Flat> flats, std::vector<Cone> cones) {
  TropicalFan t;
  std::vector<IntegerVector> rays;
  for (const auto& f : flats) rays.push_back(ray_of_flat(f.elements, m.ground_size()));
  t.fan = Fan(m.ground_size() - 1, std::move(rays), std::move(cones), 0);
  t.flat_labels = std::move(flats);
  return t;
}

}  // namespace detail

inline TropicalFan fine_bergman(const Matroid& m) {
  detail::reject_loops(m);
  auto flats = m.proper_flats();
  const std::size_t n = flats.size();
  std::vector<bits::Mask> mk;
  for (const auto& f : flats) mk.push_back(bits::to_mask(f.elements));
  std::vector<Cone> cones;
  Cone cur;
  // Flats are sorted by rank, so chains are increasing index sequences.
  std::function<void(std::size_t)> grow = [&](std::size_t from) {
    for (std::size_t j = from; j < n; ++j) {
      if (!cur.empty()) {
        bits::Mask last = mk[cur.back()];
        if (flats[j].rank <= flats[cur.back()].rank || (last & ~mk[j]) != 0) continue;
      }
      cur.push_back(j);
      cones.push_back(cur);
      grow(j + 1);
      cur.pop_back();
    }
  };
  grow(0);
  return detail::assemble(m, std::move(flats), std::move(cones));
}

inline TropicalFan coarse_bergman(const Matroid& m) {
  detail::reject_loops(m);
  std::vector<Flat> flats;
  for (auto& f : m.proper_flats())
    if (m.is_connected(f.elements)) flats.push_back(std::move(f));
  const std::size_t n = flats.size();
  std::vector<bits::Mask> mk;
  std::set<bits::Mask> building;
  for (const auto& f : flats) {
    mk.push_back(bits::to_mask(f.elements));
    building.insert(mk.back());
  }
  building.insert(bits::to_mask(m.ground_set()));

  auto comparable = [&](std::size_t a, std::size_t b) {
    return (mk[a] & ~mk[b]) == 0 || (mk[b] & ~mk[a]) == 0;
  };
  // Nested iff no antichain of size >= 2 has its join in the building set. Only
  // antichains through the newly added element need checking.
  auto still_nested = [&](const Cone& s, std::size_t added) {
    std::vector<std::size_t> inc;
    for (auto x : s)
      if (!comparable(x, added)) inc.push_back(x);
    const std::size_t k = inc.size();
    for (std::uint64_t sub = 1; sub < (std::uint64_t{1} << k); ++sub) {
      std::vector<std::size_t> chosen{added};
      bool anti = true;
      for (std::size_t j = 0; j < k && anti; ++j) {
        if (!(sub & (std::uint64_t{1} << j))) continue;
        for (auto c : chosen)
          if (comparable(c, inc[j])) anti = false;
        chosen.push_back(inc[j]);
      }
      if (!anti) continue;
      bits::Mask u = 0;
      for (auto c : chosen) u |= mk[c];
      if (building.count(m.closure_mask(u))) return false;
    }
    return true;
  };

  std::vector<Cone> cones;
  Cone cur;
  std::function<void(std::size_t)> grow = [&](std::size_t from) {
    for (std::size_t j = from; j < n; ++j) {
      if (!still_nested(cur, j)) continue;
      cur.push_back(j);
      cones.push_back(cur);
      grow(j + 1);
      cur.pop_back();
    }
  };
  grow(0);
  return detail::assemble(m, std::move(flats), std::move(cones));
}

/// Circuit criterion with the circuits computed once.
class MembershipOracle {
 public:
  explicit MembershipOracle(const Matroid& m, Convention c = Convention::max)
      : n_(m.ground_size()), circuits_(m.circuits()), convention_(c) {}

  bool operator()(const RationalVector& w) const { return test(w); }
  bool operator()(const IntegerVector& w) const { return test(w); }

  PointOracle as_predicate() const {
    return [self = *this](const RationalVector& w) { return self(w); };
  }

 private:
  template <typename Vec>
  bool test(const Vec& w) const {
    using T = std::decay_t<decltype(w[0])>;
    if (w.size() + 1 != n_) throw MathError("membership: point has wrong length");
    const bool neg = convention_ == Convention::min;
    auto coord = [&](std::size_t i) -> T {
      if (i == 0) return T(0);
      return neg ? T(-w[i - 1]) : T(w[i - 1]);
    };
    for (const auto& c : circuits_) {
      T best = coord(c[0]);
      int count = 1;
      for (std::size_t j = 1; j < c.size(); ++j) {
        T x = coord(c[j]);
        if (x > best) {
          best = x;
          count = 1;
        } else if (x == best) {
          ++count;
        }
      }
      if (count < 2) return false;
    }
    return true;
  }

  std::size_t n_;
  std::vector<IndexSet> circuits_;
  Convention convention_;
};

inline bool trop_membership(const Matroid& m, const RationalVector& w, Convention c = Convention::max) {
  return MembershipOracle(m, c)(w);
}

}  // namespace mdstrop
