// Interval vectors and matrices, plus the verified inverse used by interval
// Newton.

#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "drift/interval.hpp"

namespace drift {

class IVector {
 public:
  IVector() = default;
  explicit IVector(std::size_t n, Interval fill = Interval(0.0)) : data_(n, fill) {}
  IVector(std::initializer_list<Interval> init) : data_(init) {}
  explicit IVector(std::vector<Interval> data) : data_(std::move(data)) {}

  static IVector from_points(const std::vector<double>& p) {
    IVector v(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) v[i] = Interval(p[i]);
    return v;
  }

  std::size_t size() const { return data_.size(); }
  Interval& operator[](std::size_t i) { return data_[i]; }
  const Interval& operator[](std::size_t i) const { return data_[i]; }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }
  const std::vector<Interval>& data() const { return data_; }

  friend IVector operator+(const IVector& a, const IVector& b) {
    check_same(a, b);
    IVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
  }
  friend IVector operator-(const IVector& a, const IVector& b) {
    check_same(a, b);
    IVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
  }
  friend IVector operator*(const Interval& s, const IVector& a) {
    IVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
  }

 private:
  static void check_same(const IVector& a, const IVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("IVector dimension mismatch");
  }
  std::vector<Interval> data_;
};

class IMatrix {
 public:
  IMatrix() = default;
  IMatrix(std::size_t rows, std::size_t cols, Interval fill = Interval(0.0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static IMatrix identity(std::size_t n) {
    IMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Interval(1.0);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Interval& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Interval& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  friend IMatrix operator*(const IMatrix& a, const IMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("IMatrix product dimension mismatch");
    IMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Interval& aik = a(i, k);
        if (aik.lo() == 0.0 && aik.hi() == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }
  friend IVector operator*(const IMatrix& a, const IVector& x) {
    if (a.cols_ != x.size()) throw std::invalid_argument("IMatrix-vector dimension mismatch");
    IVector r(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      Interval acc(0.0);
      for (std::size_t j = 0; j < a.cols_; ++j) {
        const Interval& aij = a(i, j);
        if (aij.lo() == 0.0 && aij.hi() == 0.0) continue;
        acc += aij * x[j];
      }
      r[i] = acc;
    }
    return r;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Interval> data_;
};

// Plain floating-point dense matrix, row-major.  Used for preconditioners and
// non-rigorous polishing only.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> a;
  explicit Matrix(std::size_t dim = 0) : n(dim), a(dim * dim, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// ---------------------------------------------------------------------------
// Vector lattice operations

inline IVector hull(const IVector& a, const IVector& b) {
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = hull(a[i], b[i]);
  return r;
}

inline std::optional<IVector> intersect(const IVector& a, const IVector& b) {
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto c = intersect(a[i], b[i]);
    if (!c) return std::nullopt;
    r[i] = *c;
  }
  return r;
}

// Componentwise strict interior inclusion.
inline bool subset(const IVector& inner, const IVector& outer) {
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (!subset(inner[i], outer[i])) return false;
  return true;
}

inline bool contains(const IVector& outer, const IVector& inner) {
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (!outer[i].contains(inner[i])) return false;
  return true;
}

inline std::vector<double> midpoint(const IVector& a) {
  std::vector<double> m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = a[i].mid();
  return m;
}

inline double radius(const IVector& a) {
  double r = 0.0;
  for (const auto& x : a) r = std::max(r, x.rad());
  return r;
}

inline IVector inflate(const IVector& a, double r) {
  IVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = inflate(a[i], r);
  return out;
}

inline IMatrix hull_of_point(const Matrix& m) {
  IMatrix r(m.n, m.n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) r(i, j) = Interval(m(i, j));
  return r;
}

inline Matrix mid(const IMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("mid: square matrix expected");
  Matrix m(a.rows());
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) m(i, j) = a(i, j).mid();
  return m;
}

// ---------------------------------------------------------------------------
// Inversion

// Floating-point inverse by Gauss-Jordan with partial pivoting.  Returns
// nullopt for numerically singular input.
inline std::optional<Matrix> inverse(const Matrix& m) {
  const std::size_t n = m.n;
  Matrix a = m;
  Matrix inv(n);
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = 1.0;
  double scale = 0.0;
  for (double v : m.a) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) return std::nullopt;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
    if (std::fabs(a(piv, col)) <= 1e-15 * scale) return std::nullopt;
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const double p = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= p;
      inv(col, j) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

class NotInvertible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Interval matrix B with M^{-1} in B for every point matrix M in A.
//
// Preconditions with R ~ mid(A)^{-1}, then runs interval Gaussian elimination
// (no pivoting) on R*A with right-hand side R.  Throws NotInvertible when the
// midpoint is singular or a pivot enclosure contains zero.
inline IMatrix imat_inverse(const IMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("imat_inverse: square matrix expected");
  const std::size_t n = a.rows();
  const auto r = inverse(mid(a));
  if (!r) throw NotInvertible("not verifiably invertible: midpoint matrix is singular");
  const IMatrix rr = hull_of_point(*r);
  IMatrix m = rr * a;
  IMatrix rhs = rr;
  for (std::size_t col = 0; col < n; ++col) {
    const Interval pivot = m(col, col);
    if (pivot.contains_zero())
      throw NotInvertible("not verifiably invertible: pivot " + std::to_string(col) +
                          " encloses zero");
    for (std::size_t row = col + 1; row < n; ++row) {
      const Interval& e = m(row, col);
      if (e.lo() == 0.0 && e.hi() == 0.0) continue;
      const Interval f = e / pivot;
      for (std::size_t j = col; j < n; ++j) m(row, j) -= f * m(col, j);
      for (std::size_t j = 0; j < n; ++j) rhs(row, j) -= f * rhs(col, j);
    }
  }
  IMatrix x(n, n);
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = 0; j < n; ++j) {
      Interval acc = rhs(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k) {
        const Interval& mk = m(ii, k);
        if (mk.lo() == 0.0 && mk.hi() == 0.0) continue;
        acc -= mk * x(k, j);
      }
      x(ii, j) = acc / m(ii, ii);
    }
  }
  return x;
}

// Euclidean norm enclosure of a vector.
inline Interval norm2(const IVector& v) {
  Interval s(0.0);
  for (const auto& x : v) s += sqr(x);
  return sqrt(s);
}

}  // namespace drift
