#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "neretin/error.hpp"

namespace neretin {

using BigInt = boost::multiprecision::cpp_int;

/// Thrown by checked 64-bit arithmetic; callers retry with BigInt.
struct Overflow {};

namespace arith {

inline std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline std::int64_t sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline std::int64_t neg(std::int64_t a) {
  if (a == INT64_MIN) throw Overflow{};
  return -a;
}
inline std::int64_t abs(std::int64_t a) { return a < 0 ? neg(a) : a; }
/// Floor-free quotient used in elimination (truncating, like C++ division).
inline std::int64_t quot(std::int64_t a, std::int64_t b) {
  if (a == INT64_MIN && b == -1) throw Overflow{};
  return a / b;
}

inline BigInt add(const BigInt& a, const BigInt& b) { return a + b; }
inline BigInt sub(const BigInt& a, const BigInt& b) { return a - b; }
inline BigInt mul(const BigInt& a, const BigInt& b) { return a * b; }
inline BigInt neg(const BigInt& a) { return -a; }
inline BigInt abs(const BigInt& a) { return a < 0 ? BigInt(-a) : a; }
inline BigInt quot(const BigInt& a, const BigInt& b) { return a / b; }

}  // namespace arith

template <class T>
using DenseMatrix = std::vector<std::vector<T>>;

template <class T>
struct SmithResult {
  std::vector<T> factors;  // positive, each dividing the next
  std::size_t rank = 0;
  DenseMatrix<T> u;  // rows x rows, unimodular, present if requested
  DenseMatrix<T> v;  // cols x cols
};

namespace detail {

template <class T>
DenseMatrix<T> identity_matrix(std::size_t n) {
  DenseMatrix<T> m(n, std::vector<T>(n, T(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = T(1);
  return m;
}

// row_i -= f * row_j on a (and u when tracking)
template <class T>
void row_axpy(DenseMatrix<T>& a, std::size_t i, std::size_t j, const T& f, std::size_t from) {
  if (f == 0) return;
  for (std::size_t c = from; c < a[i].size(); ++c)
    if (a[j][c] != 0) a[i][c] = arith::sub(a[i][c], arith::mul(f, a[j][c]));
}

template <class T>
void col_axpy(DenseMatrix<T>& a, std::size_t i, std::size_t j, const T& f, std::size_t from) {
  if (f == 0) return;
  for (std::size_t r = from; r < a.size(); ++r)
    if (a[r][j] != 0) a[r][i] = arith::sub(a[r][i], arith::mul(f, a[r][j]));
}

}  // namespace detail

/// Smith normal form by elementary row and column operations. With
/// `transforms`, also returns unimodular U, V with U*M*V = diag(factors).
template <class T>
SmithResult<T> smith_dense(DenseMatrix<T> a, std::size_t rows, std::size_t cols, bool transforms) {
  SmithResult<T> res;
  DenseMatrix<T> u, v;
  if (transforms) {
    u = detail::identity_matrix<T>(rows);
    v = detail::identity_matrix<T>(cols);
  }
  // U is tracked as row operations on u; V as column operations on v.
  auto swap_rows = [&](std::size_t i, std::size_t j) {
    std::swap(a[i], a[j]);
    if (transforms) std::swap(u[i], u[j]);
  };
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    for (auto& row : a) std::swap(row[i], row[j]);
    if (transforms)
      for (auto& row : v) std::swap(row[i], row[j]);
  };
  auto row_op = [&](std::size_t i, std::size_t j, const T& f, std::size_t from) {
    detail::row_axpy(a, i, j, f, from);
    if (transforms) detail::row_axpy(u, i, j, f, 0);
  };
  auto col_op = [&](std::size_t i, std::size_t j, const T& f, std::size_t from) {
    detail::col_axpy(a, i, j, f, from);
    if (transforms) detail::col_axpy(v, i, j, f, 0);
  };

  std::size_t t = 0;
  while (t < rows && t < cols) {
    // pivot: nonzero entry of least absolute value
    std::size_t pr = rows, pc = cols;
    T best(0);
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (a[i][j] != 0) {
          T m = arith::abs(a[i][j]);
          if (pr == rows || m < best) {
            best = m;
            pr = i;
            pc = j;
            if (best == 1) goto found;
          }
        }
  found:
    if (pr == rows) break;
    swap_rows(t, pr);
    swap_cols(t, pc);
    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a[i][t] == 0) continue;
        T f = arith::quot(a[i][t], a[t][t]);
        row_op(i, t, f, t);
        if (a[i][t] != 0) {
          clean = false;
          if (arith::abs(a[i][t]) < arith::abs(a[t][t])) swap_rows(t, i);
        }
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a[t][j] == 0) continue;
        T f = arith::quot(a[t][j], a[t][t]);
        col_op(j, t, f, t);
        if (a[t][j] != 0) {
          clean = false;
          if (arith::abs(a[t][j]) < arith::abs(a[t][t])) swap_cols(t, j);
        }
      }
      if (!clean) continue;
      // divisibility of the remaining block
      std::size_t bad_row = rows;
      for (std::size_t i = t + 1; i < rows && bad_row == rows; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (a[i][j] != 0 && arith::abs(a[i][j]) % arith::abs(a[t][t]) != 0) {
            bad_row = i;
            break;
          }
      if (bad_row == rows) break;
      row_op(t, bad_row, T(-1), t);
    }
    if (a[t][t] < 0) {
      for (std::size_t j = t; j < cols; ++j) a[t][j] = arith::neg(a[t][j]);
      if (transforms)
        for (auto& x : u[t]) x = arith::neg(x);
    }
    res.factors.push_back(a[t][t]);
    ++t;
  }
  res.rank = res.factors.size();
  if (transforms) {
    res.u = std::move(u);
    res.v = std::move(v);
  }
  return res;
}

/// Invariant factors and rank of an integer matrix, with certified
/// transforms. Falls back to arbitrary precision on 64-bit overflow.
struct SmithNormalForm {
  std::vector<BigInt> factors;
  std::size_t rank = 0;
  DenseMatrix<BigInt> u;
  DenseMatrix<BigInt> v;
  bool promoted = false;
};

template <class T>
DenseMatrix<T> multiply(const DenseMatrix<T>& a, const DenseMatrix<T>& b, std::size_t inner, std::size_t cols) {
  DenseMatrix<T> out(a.size(), std::vector<T>(cols, T(0)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < inner; ++k)
      if (a[i][k] != 0)
        for (std::size_t j = 0; j < cols; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline SmithNormalForm smith_normal_form(const std::vector<std::vector<std::int64_t>>& m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  for (const auto& r : m)
    if (r.size() != cols) throw InvalidArgument("ragged matrix");
  SmithNormalForm out;
  DenseMatrix<BigInt> big(rows, std::vector<BigInt>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) big[i][j] = m[i][j];
  try {
    auto r = smith_dense<std::int64_t>(m, rows, cols, true);
    for (auto f : r.factors) out.factors.emplace_back(f);
    out.rank = r.rank;
    out.u.assign(rows, std::vector<BigInt>(rows));
    out.v.assign(cols, std::vector<BigInt>(cols));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < rows; ++j) out.u[i][j] = r.u[i][j];
    for (std::size_t i = 0; i < cols; ++i)
      for (std::size_t j = 0; j < cols; ++j) out.v[i][j] = r.v[i][j];
  } catch (const Overflow&) {
    auto r = smith_dense<BigInt>(big, rows, cols, true);
    out.factors = r.factors;
    out.rank = r.rank;
    out.u = std::move(r.u);
    out.v = std::move(r.v);
    out.promoted = true;
  }
  // certificate: U*M*V must be the diagonal of factors
  auto d = multiply(multiply(out.u, big, rows, cols), out.v, cols, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      BigInt want = (i == j && i < out.factors.size()) ? out.factors[i] : BigInt(0);
      if (d[i][j] != want) throw CheckFailed("Smith normal form certificate failed");
    }
  for (std::size_t i = 1; i < out.factors.size(); ++i)
    if (out.factors[i] % out.factors[i - 1] != 0) throw CheckFailed("invariant factors do not form a divisor chain");
  return out;
}

/// Invariant factors only (no transforms), with automatic promotion.
inline std::vector<BigInt> invariant_factors(const DenseMatrix<std::int64_t>& m, std::size_t rows, std::size_t cols) {
  try {
    auto r = smith_dense<std::int64_t>(m, rows, cols, false);
    return {r.factors.begin(), r.factors.end()};
  } catch (const Overflow&) {
    DenseMatrix<BigInt> big(rows, std::vector<BigInt>(cols));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) big[i][j] = m[i][j];
    return smith_dense<BigInt>(std::move(big), rows, cols, false).factors;
  }
}

}  // namespace neretin
