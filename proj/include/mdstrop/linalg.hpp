#pragma once

// Exact rational linear algebra: matrices, row reduction, kernels, Gale duality,
// primitive lattice vectors.

#include <mdstrop/rational.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mdstrop {

using RationalVector = std::vector<Rational>;

/// Integer lattice vector. Rays, cone sample points and divisor coordinates use it.
class IntegerVector {
 public:
  IntegerVector() = default;
  explicit IntegerVector(std::size_t n) : coords_(n, 0) {}
  IntegerVector(std::initializer_list<std::int64_t> c) : coords_(c) {}
  explicit IntegerVector(std::vector<std::int64_t> c) : coords_(std::move(c)) {}

  std::size_t size() const noexcept { return coords_.size(); }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  std::int64_t& operator[](std::size_t i) { return coords_[i]; }
  const std::vector<std::int64_t>& coords() const noexcept { return coords_; }
  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](auto x) { return x == 0; });
  }
  bool is_primitive() const {
    std::int64_t g = 0;
    for (auto x : coords_) g = std::gcd(g, x < 0 ? -x : x);
    return g == 1;
  }

  IntegerVector operator-() const {
    IntegerVector r(*this);
    for (auto& x : r.coords_) x = -x;
    return r;
  }
  IntegerVector& operator+=(const IntegerVector& o) {
    if (o.size() != size()) throw MathError("vector length mismatch");
    for (std::size_t i = 0; i < size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  friend IntegerVector operator+(IntegerVector a, const IntegerVector& b) { return a += b; }

  RationalVector to_rational() const { return RationalVector(coords_.begin(), coords_.end()); }
  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < size(); ++i) s += (i ? "," : "") + std::to_string(coords_[i]);
    return s + ")";
  }

  auto operator<=>(const IntegerVector&) const = default;

 private:
  std::vector<std::int64_t> coords_;
};

/// Dense exact rational matrix. The 0x0 matrix is the only matrix with an empty dimension.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) return;  // collapses to the empty matrix
    rows_ = rows;
    cols_ = cols;
    data_.resize(rows * cols);
  }
  RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw MathError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static RationalMatrix from_rows(const std::vector<RationalVector>& rows) {
    RationalMatrix m;
    if (rows.empty() || rows.front().empty()) return m;
    m.rows_ = rows.size();
    m.cols_ = rows.front().size();
    for (const auto& r : rows) {
      if (r.size() != m.cols_) throw MathError("ragged matrix rows");
      m.data_.insert(m.data_.end(), r.begin(), r.end());
    }
    return m;
  }
  static RationalMatrix from_integer_rows(const std::vector<IntegerVector>& rows) {
    std::vector<RationalVector> rr;
    rr.reserve(rows.size());
    for (const auto& r : rows) rr.push_back(r.to_rational());
    return from_rows(rr);
  }
  static RationalMatrix identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  RationalVector row(std::size_t r) const {
    return RationalVector(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_);
  }
  RationalVector col(std::size_t c) const {
    RationalVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  RationalMatrix transpose() const {
    RationalMatrix t;
    t.rows_ = cols_;
    t.cols_ = rows_;
    t.data_.resize(data_.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  /// Submatrix of the given columns, in the given order.
  RationalMatrix select_cols(std::span<const std::size_t> idx) const {
    RationalMatrix s;
    if (idx.empty() || rows_ == 0) return s;
    s.rows_ = rows_;
    s.cols_ = idx.size();
    s.data_.resize(rows_ * idx.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t j = 0; j < idx.size(); ++j) s(r, j) = (*this)(r, idx[j]);
    return s;
  }
  RationalMatrix select_rows(std::span<const std::size_t> idx) const {
    std::vector<RationalVector> rr;
    for (auto i : idx) rr.push_back(row(i));
    return from_rows(rr);
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rational& q) { return q == 0; });
  }

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols_ != b.rows_) throw MathError("matrix product dimension mismatch");
    RationalMatrix p;
    p.rows_ = a.rows_;
    p.cols_ = b.cols_;
    p.data_.assign(p.rows_ * p.cols_, Rational(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Rational& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) p(i, j) += aik * b(k, j);
      }
    return p;
  }
  friend RationalVector operator*(const RationalMatrix& a, const RationalVector& v) {
    if (a.cols_ != v.size()) throw MathError("matrix-vector dimension mismatch");
    RationalVector out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) out[i] += a(i, k) * v[k];
    return out;
  }

  bool operator==(const RationalMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size()) throw MathError("dot product length mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct RrefResult {
  RationalMatrix reduced;
  std::vector<std::size_t> pivots;
};

/// Reduced row echelon form by Gauss-Jordan elimination.
inline RrefResult rref(RationalMatrix m) {
  std::vector<std::size_t> pivots;
  std::size_t lead_row = 0;
  for (std::size_t c = 0; c < m.cols() && lead_row < m.rows(); ++c) {
    std::size_t p = lead_row;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != lead_row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(lead_row, j));
    Rational inv = 1 / m(lead_row, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(lead_row, j) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == lead_row || m(r, c) == 0) continue;
      Rational f = m(r, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(r, j) -= f * m(lead_row, j);
    }
    pivots.push_back(c);
    ++lead_row;
  }
  return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const RationalMatrix& m) { return rref(m).pivots.size(); }

inline std::size_t rank_of_rows(const std::vector<RationalVector>& rows) {
  return rank(RationalMatrix::from_rows(rows));
}

/// Kernel basis read off the RREF free variables: column k has a 1 in the k-th free
/// position and zeros in the other free positions.
inline RationalMatrix free_variable_kernel(const RationalMatrix& m) {
  auto [r, piv] = rref(m);
  std::vector<std::size_t> free;
  for (std::size_t c = 0, p = 0; c < m.cols(); ++c) {
    if (p < piv.size() && piv[p] == c) {
      ++p;
      continue;
    }
    free.push_back(c);
  }
  if (free.empty()) return RationalMatrix();
  RationalMatrix k(m.cols(), free.size());
  for (std::size_t j = 0; j < free.size(); ++j) {
    k(free[j], j) = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) k(piv[i], j) = -r(i, free[j]);
  }
  return k;
}

/// Columns span {v : M v = 0}; canonicalized so that column leading positions
/// strictly increase and each leading entry is 1.
inline RationalMatrix kernel_basis(const RationalMatrix& m) {
  RationalMatrix k = free_variable_kernel(m);
  if (k.cols() == 0) return k;
  // Reverse-order reduced echelon on the transposed basis gives distinct leading
  // positions; normalizing the transpose's RREF does exactly that.
  auto [rt, piv] = rref(k.transpose());
  (void)piv;
  return rt.transpose();
}

/// Unique primitive integer vector on the ray spanned by v.
inline IntegerVector primitive(std::span<const Rational> v) {
  Integer l = 1;
  for (const auto& q : v) l = boost::multiprecision::lcm(l, denominator(q));
  std::vector<Integer> ints;
  ints.reserve(v.size());
  Integer g = 0;
  for (const auto& q : v) {
    Integer z = numerator(q) * (l / denominator(q));
    g = boost::multiprecision::gcd(g, abs(z));
    ints.push_back(std::move(z));
  }
  if (g == 0) throw MathError("primitive: zero vector has no primitive representative");
  std::vector<std::int64_t> out;
  out.reserve(ints.size());
  for (auto& z : ints) {
    Integer q = z / g;
    out.push_back(q.convert_to<std::int64_t>());
  }
  return IntegerVector(std::move(out));
}

inline IntegerVector primitive(const IntegerVector& v) {
  auto q = v.to_rational();
  return primitive(std::span<const Rational>(q));
}

/// Solves A x = b; returns nullopt when inconsistent. Free variables are set to 0.
inline std::optional<RationalVector> solve(const RationalMatrix& a, const RationalVector& b) {
  if (a.rows() != b.size()) throw MathError("solve: dimension mismatch");
  if (a.rows() == 0) return RationalVector(a.cols());
  RationalMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  auto [r, piv] = rref(aug);
  if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
  RationalVector x(a.cols());
  for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = r(i, a.cols());
  return x;
}

/// Writes D = (A | I_r) as its Gale dual (I_m ; -A), an N x m matrix with D G = 0.
inline RationalMatrix gale_transform(const RationalMatrix& d) {
  const std::size_t r = d.rows();
  const std::size_t n = d.cols();
  if (r == 0 || n <= r) throw MathError("gale_transform: need r rows and N > r columns");
  const std::size_t m = n - r;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      if (d(i, m + j) != (i == j ? 1 : 0))
        throw MathError("gale_transform: right r x r block is not the identity; reduce with rref first");
  RationalMatrix g(n, m);
  for (std::size_t i = 0; i < m; ++i) g(i, i) = 1;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < m; ++j) g(m + i, j) = -d(i, j);
  return g;
}

struct GaleResult {
  RationalMatrix gale;                 // rows indexed like the columns of the input
  RationalMatrix block_form;           // (A | I_r) after row reduction and column permutation
  std::vector<std::size_t> column_order;  // block_form column j is input column column_order[j]
};

/// Brings an arbitrary full-row-rank degree matrix to (A | I) form (pivot columns moved
/// to the right, keeping relative order), then takes the Gale transform.
inline GaleResult gale_from_degree(const RationalMatrix& d) {
  auto [red, piv] = rref(d);
  if (piv.size() != d.rows()) throw MathError("gale_from_degree: degree matrix must have full row rank");
  std::vector<std::size_t> order;
  for (std::size_t c = 0, p = 0; c < d.cols(); ++c) {
    if (p < piv.size() && piv[p] == c) {
      ++p;
      continue;
    }
    order.push_back(c);
  }
  order.insert(order.end(), piv.begin(), piv.end());
  RationalMatrix block = red.select_cols(order);
  RationalMatrix g = gale_transform(block);
  RationalMatrix unpermuted(g.rows(), g.cols());
  for (std::size_t j = 0; j < order.size(); ++j)
    for (std::size_t c = 0; c < g.cols(); ++c) unpermuted(order[j], c) = g(j, c);
  return {std::move(unpermuted), std::move(block), std::move(order)};
}

}  // namespace mdstrop
