#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "nambu/error.hpp"
#include "nambu/jet.hpp"

namespace nambu {

/// Dense row-major matrix over a numeric carrier (double or a jet).
template <class C>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, C(0.0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  C& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const C& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool operator==(const Matrix&) const = default;

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = C(1.0);
    return m;
  }

  /// Copy with column `col` removed.
  Matrix without_column(std::size_t col) const {
    Matrix m(rows_, cols_ - 1);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0, k = 0; c < cols_; ++c)
        if (c != col) m(r, k++) = (*this)(r, c);
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<C> data_;
};

namespace detail {

// Rows compare by absolute pivot value; exact ties fall back to comparing
// the remaining entries so the pivot sequence does not depend on the
// order in which equal rows were supplied.
template <class C>
bool pivot_preferred(const Matrix<C>& a, std::size_t r, std::size_t best, std::size_t col) {
  double x = std::abs(value_of(a(r, col)));
  double y = std::abs(value_of(a(best, col)));
  if (x != y) return x > y;
  for (std::size_t c = col; c < a.cols(); ++c) {
    double u = value_of(a(r, c));
    double v = value_of(a(best, c));
    if (u != v) return u > v;
  }
  return false;
}

}  // namespace detail

/// Determinant by LU factorisation with partial pivoting.
///
/// Permuting the input rows changes the result only by the sign of the
/// permutation, bit for bit: each elimination step touches every
/// non-pivot row independently and the pivot choice is order-free.
template <class C>
C determinant(Matrix<C> a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw InvalidArgument("determinant of a non-square matrix");
  if (n == 0) return C(1.0);

  // Rows are eliminated in place; `order` tracks which physical rows are
  // still active so that row swaps never move data.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  bool negate = false;
  C det(1.0);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    for (std::size_t k = col + 1; k < n; ++k)
      if (detail::pivot_preferred(a, order[k], order[best], col)) best = k;
    if (value_of(a(order[best], col)) == 0.0) return C(0.0);
    if (best != col) {
      std::swap(order[best], order[col]);
      negate = !negate;
    }
    const std::size_t p = order[col];
    const C pivot = a(p, col);
    det = det * pivot;
    for (std::size_t k = col + 1; k < n; ++k) {
      const std::size_t r = order[k];
      const C factor = a(r, col) / pivot;
      for (std::size_t c = col + 1; c < n; ++c) a(r, c) = a(r, c) - factor * a(p, c);
    }
  }
  return negate ? C(-det) : det;
}

/// Cofactor expansion for n <= 3, used to cross-check the LU route.
template <class C>
C determinant_cofactor(const Matrix<C>& a) {
  switch (a.rows()) {
    case 0:
      return C(1.0);
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default:
      throw InvalidArgument("cofactor determinant supports n <= 3");
  }
}

}  // namespace nambu
