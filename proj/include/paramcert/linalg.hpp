#pragma once

#include <vector>

#include "paramcert/upoly.hpp"

namespace paramcert {

/// Dense square-or-rectangular matrix over Q, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, Rat(0)) {}
  Matrix(std::initializer_list<std::initializer_list<Rat>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      if (r.size() != cols_) throw StructuralError("ragged matrix literal");
      a_.insert(a_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rat& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Rat& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool is_zero() const {
    for (const auto& x : a_)
      if (x != 0) return false;
    return true;
  }

  friend Matrix operator+(const Matrix& x, const Matrix& y) {
    Matrix r = x;
    for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] += y.a_[i];
    return r;
  }

  friend Matrix operator*(const Rat& s, const Matrix& x) {
    Matrix r = x;
    for (auto& v : r.a_) v *= s;
    return r;
  }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.cols_ != y.rows_) throw StructuralError("matrix dimension mismatch");
    Matrix r(x.rows_, y.cols_);
    Rat tmp;
    for (std::size_t i = 0; i < x.rows_; ++i)
      for (std::size_t k = 0; k < x.cols_; ++k) {
        const Rat& xik = x(i, k);
        if (xik == 0) continue;
        for (std::size_t j = 0; j < y.cols_; ++j) {
          if (y(k, j) == 0) continue;
          tmp = xik * y(k, j);
          r(i, j) += tmp;
        }
      }
    return r;
  }

  std::vector<Rat> apply(const std::vector<Rat>& v) const {
    std::vector<Rat> out(rows_, Rat(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if ((*this)(i, j) != 0 && v[j] != 0) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  Rat trace() const {
    Rat t = 0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  friend bool operator==(const Matrix& x, const Matrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rat> a_;
};

/// trace(x * y) without forming the product.
inline Rat trace_of_product(const Matrix& x, const Matrix& y) {
  Rat t = 0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < x.cols(); ++k)
      if (x(i, k) != 0 && y(k, i) != 0) t += x(i, k) * y(k, i);
  return t;
}

/// det(T*I - A) by Berkowitz's division-free recurrence.
inline UPoly characteristic_polynomial(const Matrix& a) {
  auto n = a.rows();
  if (n != a.cols()) throw StructuralError("characteristic polynomial of a non-square matrix");
  if (n == 0) return UPoly::constant(1);
  // c holds coefficients from the leading one downward.
  std::vector<Rat> c{Rat(1), Rat(-a(0, 0))};
  for (std::size_t r = 1; r < n; ++r) {
    // Column of the Toeplitz factor: 1, -a_rr, -R S, -R A S, ..., -R A^{r-1} S.
    std::vector<Rat> col{Rat(1), Rat(-a(r, r))};
    std::vector<Rat> s(r);
    for (std::size_t i = 0; i < r; ++i) s[i] = a(i, r);
    for (std::size_t k = 0; k < r; ++k) {
      Rat dot = 0;
      for (std::size_t j = 0; j < r; ++j) dot += a(r, j) * s[j];
      col.push_back(-dot);
      if (k + 1 == r) break;
      std::vector<Rat> next(r, Rat(0));
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
          if (a(i, j) != 0 && s[j] != 0) next[i] += a(i, j) * s[j];
      s = std::move(next);
    }
    std::vector<Rat> nc(r + 2, Rat(0));
    for (std::size_t i = 0; i < nc.size(); ++i)
      for (std::size_t j = 0; j < c.size() && j <= i; ++j)
        if (i - j < col.size()) nc[i] += col[i - j] * c[j];
    c = std::move(nc);
  }
  std::vector<Rat> low(c.rbegin(), c.rend());
  return UPoly(std::move(low));
}

/// Exact rank by fraction-based Gaussian elimination.
inline std::size_t rank(Matrix m) {
  std::size_t r = 0;
  for (std::size_t col = 0; col < m.cols() && r < m.rows(); ++col) {
    std::size_t piv = r;
    while (piv < m.rows() && m(piv, col) == 0) ++piv;
    if (piv == m.rows()) continue;
    if (piv != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(r, j));
    Rat inv = 1 / m(r, col);
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      if (m(i, col) == 0) continue;
      Rat f = m(i, col) * inv;
      for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

}  // namespace paramcert
