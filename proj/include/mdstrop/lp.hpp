#pragma once

// Exact two-phase simplex (Bland's rule) over the rationals.
//   maximize c.x  subject to  A x = b,  x >= 0

#include <mdstrop/linalg.hpp>

#include <vector>

namespace mdstrop {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  RationalVector x;
  Rational objective = 0;
};

namespace detail {

class Tableau {
 public:
  // rows: constraints, last column rhs. obj: reduced costs row (maximization form: we
  // keep z - c.x = 0, entering variables have negative coefficient).
  std::vector<RationalVector> t;
  RationalVector obj;
  Rational obj_value = 0;
  std::vector<std::size_t> basis;
  std::size_t nvars = 0;

  void pivot(std::size_t r, std::size_t c) {
    Rational inv = 1 / t[r][c];
    for (auto& x : t[r]) x *= inv;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == r || t[i][c] == 0) continue;
      Rational f = t[i][c];
      for (std::size_t j = 0; j <= nvars; ++j) t[i][j] -= f * t[r][j];
    }
    if (obj[c] != 0) {
      Rational f = obj[c];
      for (std::size_t j = 0; j < nvars; ++j) obj[j] -= f * t[r][j];
      obj_value -= f * t[r][nvars];
    }
    basis[r] = c;
  }

  // Returns false when unbounded. `allowed` masks columns that may enter.
  bool run(const std::vector<bool>& allowed) {
    for (;;) {
      std::size_t enter = nvars;
      for (std::size_t j = 0; j < nvars; ++j)
        if (allowed[j] && obj[j] < 0) {
          enter = j;
          break;
        }
      if (enter == nvars) return true;
      std::size_t leave = t.size();
      Rational best;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i][enter] <= 0) continue;
        Rational ratio = t[i][nvars] / t[i][enter];
        if (leave == t.size() || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == t.size()) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace detail

inline LpResult lp_maximize(const std::vector<RationalVector>& a, const RationalVector& b, const RationalVector& c) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw MathError("lp: rhs length mismatch");
  for (const auto& row : a)
    if (row.size() != n) throw MathError("lp: constraint length mismatch");

  detail::Tableau tab;
  tab.nvars = n + m;
  tab.t.assign(m, RationalVector(n + m + 1));
  tab.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    bool flip = b[i] < 0;
    for (std::size_t j = 0; j < n; ++j) tab.t[i][j] = flip ? -a[i][j] : a[i][j];
    tab.t[i][n + i] = 1;
    tab.t[i][n + m] = flip ? -b[i] : b[i];
    tab.basis[i] = n + i;
  }
  // Phase 1: maximize -sum(artificials).
  tab.obj.assign(n + m, Rational(0));
  tab.obj_value = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) tab.obj[j] -= tab.t[i][j];
    tab.obj_value -= tab.t[i][n + m];
  }
  std::vector<bool> all(n + m, true);
  tab.run(all);
  LpResult res;
  if (tab.obj_value != 0) {
    res.status = LpStatus::infeasible;
    return res;
  }
  // Drive artificials out of the basis; drop redundant rows.
  for (std::size_t i = 0; i < tab.t.size();) {
    if (tab.basis[i] < n) {
      ++i;
      continue;
    }
    std::size_t col = n;
    for (std::size_t j = 0; j < n; ++j)
      if (tab.t[i][j] != 0) {
        col = j;
        break;
      }
    if (col < n) {
      tab.pivot(i, col);
      ++i;
    } else {
      tab.t.erase(tab.t.begin() + static_cast<std::ptrdiff_t>(i));
      tab.basis.erase(tab.basis.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  // Phase 2.
  std::vector<bool> allowed(n + m, false);
  for (std::size_t j = 0; j < n; ++j) allowed[j] = true;
  tab.obj.assign(n + m, Rational(0));
  tab.obj_value = 0;
  for (std::size_t j = 0; j < n; ++j) tab.obj[j] = -c[j];
  for (std::size_t i = 0; i < tab.t.size(); ++i) {
    std::size_t bj = tab.basis[i];
    if (tab.obj[bj] == 0) continue;
    Rational f = tab.obj[bj];
    for (std::size_t j = 0; j < tab.nvars; ++j) tab.obj[j] -= f * tab.t[i][j];
    tab.obj_value -= f * tab.t[i][tab.nvars];
  }
  if (!tab.run(allowed)) {
    res.status = LpStatus::unbounded;
    return res;
  }
  res.status = LpStatus::optimal;
  res.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < tab.t.size(); ++i)
    if (tab.basis[i] < n) res.x[tab.basis[i]] = tab.t[i][tab.nvars];
  res.objective = dot(std::span<const Rational>(c), std::span<const Rational>(res.x));
  return res;
}

}  // namespace mdstrop
