#pragma once

// Linear matroids of coordinate functionals on a linear subspace.

#include <mdstrop/linalg.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mdstrop {

/// Sorted list of ground-set indices.
using IndexSet = std::vector<std::size_t>;

namespace bits {

using Mask = std::uint64_t;

inline Mask to_mask(const IndexSet& s) {
  Mask m = 0;
  for (auto i : s) m |= Mask{1} << i;
  return m;
}

inline IndexSet from_mask(Mask m) {
  IndexSet s;
  while (m) {
    s.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    m &= m - 1;
  }
  return s;
}

}  // namespace bits

struct Flat {
  IndexSet elements;
  std::size_t rank = 0;

  /// Canonical order: rank first, then lexicographic on elements.
  friend bool operator<(const Flat& a, const Flat& b) {
    return std::tie(a.rank, a.elements) < std::tie(b.rank, b.elements);
  }
  bool operator==(const Flat&) const = default;
};

class Matroid {
 public:
  static constexpr std::size_t max_ground_size = 63;

  /// Column i is the functional x_i restricted to the subspace.
  explicit Matroid(RationalMatrix columns) : columns_(std::move(columns)) {
    ground_ = columns_.cols();
    if (ground_ == 0) throw MathError("matroid: empty ground set");
    if (ground_ > max_ground_size) throw MathError("matroid: ground set too large");
    rank_ = mdstrop::rank(columns_);
    cols_.reserve(ground_);
    for (std::size_t i = 0; i < ground_; ++i) cols_.push_back(columns_.col(i));
  }

  std::size_t ground_size() const noexcept { return ground_; }
  std::size_t rank() const noexcept { return rank_; }
  const RationalMatrix& columns() const noexcept { return columns_; }

  std::size_t rank(const IndexSet& s) const {
    check(s);
    return rank_mask(bits::to_mask(s));
  }

  std::size_t rank_mask(bits::Mask m) const {
    if (m == 0) return 0;
    std::vector<RationalVector> rows;
    for (auto i : bits::from_mask(m)) rows.push_back(cols_[i]);
    return rank_of_rows(rows);
  }

  bits::Mask closure_mask(bits::Mask m) const {
    const std::size_t r = rank_mask(m);
    bits::Mask out = m;
    for (std::size_t e = 0; e < ground_; ++e) {
      bits::Mask b = bits::Mask{1} << e;
      if (m & b) continue;
      if (rank_mask(m | b) == r) out |= b;
    }
    return out;
  }

  Flat closure(const IndexSet& s) const {
    check(s);
    bits::Mask m = bits::to_mask(s);
    bits::Mask c = closure_mask(m);
    return {bits::from_mask(c), rank_mask(m)};
  }

  IndexSet loops() const {
    IndexSet l;
    for (std::size_t i = 0; i < ground_; ++i)
      if (std::all_of(cols_[i].begin(), cols_[i].end(), [](const Rational& q) { return q == 0; })) l.push_back(i);
    return l;
  }

  IndexSet ground_set() const {
    IndexSet g(ground_);
    std::iota(g.begin(), g.end(), std::size_t{0});
    return g;
  }

  /// Flats with 0 < rank < rank(M), by breadth-first closure from the rank-1 flats.
  std::vector<Flat> proper_flats() const {
    std::set<bits::Mask> current;
    const bits::Mask loops_mask = bits::to_mask(loops());
    for (std::size_t e = 0; e < ground_; ++e) {
      bits::Mask b = bits::Mask{1} << e;
      if (loops_mask & b) continue;
      current.insert(closure_mask(loops_mask | b));
    }
    std::vector<Flat> out;
    for (std::size_t r = 1; r < rank_ && !current.empty(); ++r) {
      std::set<bits::Mask> next;
      for (auto f : current) {
        out.push_back({bits::from_mask(f), r});
        if (r + 1 >= rank_) continue;
        for (std::size_t e = 0; e < ground_; ++e) {
          bits::Mask b = bits::Mask{1} << e;
          if (f & b) continue;
          next.insert(closure_mask(f | b));
        }
      }
      current = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// All minimal dependent sets, via fundamental circuits of every basis.
  /// Ordered by size, then lexicographically. Computed once and cached (not thread-safe
  /// on first call).
  const std::vector<IndexSet>& circuits() const {
    if (!circuits_) circuits_ = compute_circuits();
    return *circuits_;
  }

  /// True iff the restriction M|S has no rank-additive proper split.
  bool is_connected(const IndexSet& s) const {
    check(s);
    if (s.size() <= 1) return true;
    // Fast path: elements sharing a circuit inside S are in one component.
    std::vector<std::size_t> parent(ground_);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    const bits::Mask sm = bits::to_mask(s);
    for (const auto& c : circuits_within(sm)) {
      for (std::size_t j = 1; j < c.size(); ++j) parent[find(c[j])] = find(c[0]);
    }
    std::size_t root = find(s.front());
    bool one = std::all_of(s.begin(), s.end(), [&](std::size_t x) { return find(x) == root; });
    if (one) return true;
    return !has_separator(sm);
  }

  bool is_connected() const { return is_connected(ground_set()); }

  /// Separator enumeration: some partition S = A + B with rank(A) + rank(B) = rank(S).
  bool has_separator(bits::Mask s) const {
    const std::size_t rs = rank_mask(s);
    const IndexSet el = bits::from_mask(s);
    if (el.size() <= 1) return false;
    // Fix el[0] in A to enumerate each unordered split once.
    const std::size_t rest = el.size() - 1;
    for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << rest) - 1; ++sub) {
      bits::Mask a = bits::Mask{1} << el[0];
      for (std::size_t j = 0; j < rest; ++j)
        if (sub & (std::uint64_t{1} << j)) a |= bits::Mask{1} << el[j + 1];
      bits::Mask b = s & ~a;
      if (rank_mask(a) + rank_mask(b) == rs) return true;
    }
    return false;
  }

  template <typename F>
  static void for_each_combination(std::size_t n, std::size_t k, F&& f) {
    if (k > n) return;
    IndexSet c(k);
    std::iota(c.begin(), c.end(), std::size_t{0});
    for (;;) {
      f(static_cast<const IndexSet&>(c));
      if (k == 0) return;
      std::size_t i = k;
      while (i > 0 && c[i - 1] == n - k + i - 1) --i;
      if (i == 0) return;
      ++c[i - 1];
      for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
    }
  }

 private:
  void check(const IndexSet& s) const {
    for (auto i : s)
      if (i >= ground_) throw MathError("matroid: element index " + std::to_string(i) + " out of range");
  }

  std::vector<IndexSet> compute_circuits() const {
    std::set<std::pair<std::size_t, IndexSet>> found;
    const IndexSet loop_set = loops();
    for (auto l : loop_set) found.insert({1, {l}});
    if (rank_ > 0) {
      for_each_combination(ground_, rank_, [&](const IndexSet& b) {
        if (rank_mask(bits::to_mask(b)) != rank_) return;
        RationalMatrix bm = columns_.select_cols(b);
        for (std::size_t e = 0; e < ground_; ++e) {
          if (std::binary_search(b.begin(), b.end(), e)) continue;
          auto coeffs = solve(bm, cols_[e]);
          IndexSet c{e};
          for (std::size_t j = 0; j < b.size(); ++j)
            if ((*coeffs)[j] != 0) c.push_back(b[j]);
          std::sort(c.begin(), c.end());
          found.insert({c.size(), c});
        }
      });
    }
    std::vector<IndexSet> out;
    for (auto& [sz, c] : found) out.push_back(c);
    return out;
  }

  std::vector<IndexSet> circuits_within(bits::Mask s) const {
    std::vector<IndexSet> out;
    for (auto& c : circuits())
      if ((bits::to_mask(c) & ~s) == 0) out.push_back(c);
    return out;
  }

  RationalMatrix columns_;
  std::vector<RationalVector> cols_;
  std::size_t ground_ = 0;
  std::size_t rank_ = 0;
  mutable std::optional<std::vector<IndexSet>> circuits_;
};

/// Matroid of the coordinate functionals on {x : forms . x = 0}; forms has one row per
/// linear form and one column per homogeneous coordinate x_0..x_{N-1}.
inline Matroid matroid_from_equations(const RationalMatrix& forms, std::size_t ambient) {
  if (forms.rows() > 0 && forms.cols() != ambient)
    throw MathError("matroid_from_equations: forms have " + std::to_string(forms.cols()) + " columns, expected " +
                    std::to_string(ambient));
  RationalMatrix basis = forms.rows() == 0 ? RationalMatrix::identity(ambient) : kernel_basis(forms);
  if (basis.cols() == 0) throw MathError("matroid_from_equations: solution space is zero-dimensional");
  return Matroid(basis.transpose());
}

}  // namespace mdstrop
