#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hqmm/errors.hpp"

namespace hqmm {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Fixed-size complex types. The quantum memory is a single qubit, so 2x2
// matrices and their 4x4 vectorized maps cover everything.
// ---------------------------------------------------------------------------

struct Vec2 {
  Complex c0{};
  Complex c1{};

  double norm_sq() const { return std::norm(c0) + std::norm(c1); }
  double norm() const { return std::sqrt(norm_sq()); }
};

inline Vec2 operator*(Complex s, const Vec2& v) { return {s * v.c0, s * v.c1}; }
inline Vec2 operator*(double s, const Vec2& v) { return {s * v.c0, s * v.c1}; }
inline Vec2 operator+(const Vec2& x, const Vec2& y) { return {x.c0 + y.c0, x.c1 + y.c1}; }
inline Vec2 operator-(const Vec2& x, const Vec2& y) { return {x.c0 - y.c0, x.c1 - y.c1}; }

/// Dense 2x2 complex matrix, row-major.
struct Mat2 {
  std::array<Complex, 4> e{};

  Complex& operator()(std::size_t r, std::size_t c) { return e[2 * r + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return e[2 * r + c]; }

  static Mat2 zero() { return {}; }

  static Mat2 identity() {
    Mat2 m;
    m.e[0] = 1.0;
    m.e[3] = 1.0;
    return m;
  }

  static Mat2 diagonal(Complex d0, Complex d1) {
    Mat2 m;
    m.e[0] = d0;
    m.e[3] = d1;
    return m;
  }

  Mat2 adjoint() const {
    Mat2 m;
    m.e[0] = std::conj(e[0]);
    m.e[1] = std::conj(e[2]);
    m.e[2] = std::conj(e[1]);
    m.e[3] = std::conj(e[3]);
    return m;
  }

  Complex trace() const { return e[0] + e[3]; }

  double frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : e) s += std::norm(z);
    return std::sqrt(s);
  }
};

inline Mat2 operator+(const Mat2& x, const Mat2& y) {
  Mat2 r;
  for (std::size_t i = 0; i < 4; ++i) r.e[i] = x.e[i] + y.e[i];
  return r;
}

inline Mat2 operator-(const Mat2& x, const Mat2& y) {
  Mat2 r;
  for (std::size_t i = 0; i < 4; ++i) r.e[i] = x.e[i] - y.e[i];
  return r;
}

inline Mat2 operator*(Complex s, const Mat2& x) {
  Mat2 r;
  for (std::size_t i = 0; i < 4; ++i) r.e[i] = s * x.e[i];
  return r;
}

inline Mat2 operator*(double s, const Mat2& x) { return Complex{s, 0.0} * x; }

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
  Mat2 r;
  r.e[0] = x.e[0] * y.e[0] + x.e[1] * y.e[2];
  r.e[1] = x.e[0] * y.e[1] + x.e[1] * y.e[3];
  r.e[2] = x.e[2] * y.e[0] + x.e[3] * y.e[2];
  r.e[3] = x.e[2] * y.e[1] + x.e[3] * y.e[3];
  return r;
}

inline Vec2 operator*(const Mat2& m, const Vec2& v) {
  return {m.e[0] * v.c0 + m.e[1] * v.c1, m.e[2] * v.c0 + m.e[3] * v.c1};
}

/// Element-wise complex conjugate.
inline Mat2 conj(const Mat2& x) {
  Mat2 r;
  for (std::size_t i = 0; i < 4; ++i) r.e[i] = std::conj(x.e[i]);
  return r;
}

/// Eigenvalues of a Hermitian 2x2 matrix, ascending. Closed form from the
/// trace and the discriminant; no iteration involved.
inline std::pair<double, double> hermitian_eigenvalues(const Mat2& m) {
  const double a = m.e[0].real();
  const double d = m.e[3].real();
  const double mean = 0.5 * (a + d);
  const double disc = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m.e[1]));
  return {mean - disc, mean + disc};
}

using Vec4 = std::array<Complex, 4>;

/// Dense 4x4 complex matrix, row-major. Used as the linear representation of
/// quantum channels acting on row-vectorized 2x2 matrices.
struct Mat4 {
  std::array<Complex, 16> e{};

  Complex& operator()(std::size_t r, std::size_t c) { return e[4 * r + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return e[4 * r + c]; }

  static Mat4 identity() {
    Mat4 m;
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Mat4 operator+(const Mat4& x, const Mat4& y) {
  Mat4 r;
  for (std::size_t i = 0; i < 16; ++i) r.e[i] = x.e[i] + y.e[i];
  return r;
}

inline Mat4 operator-(const Mat4& x, const Mat4& y) {
  Mat4 r;
  for (std::size_t i = 0; i < 16; ++i) r.e[i] = x.e[i] - y.e[i];
  return r;
}

inline Vec4 operator*(const Mat4& m, const Vec4& v) {
  Vec4 r{};
  for (std::size_t i = 0; i < 4; ++i) {
    Complex acc{};
    for (std::size_t j = 0; j < 4; ++j) acc += m(i, j) * v[j];
    r[i] = acc;
  }
  return r;
}

/// Kronecker product of 2x2 blocks: (x (x) y)[(2i+k),(2j+l)] = x(i,j) y(k,l).
inline Mat4 kron(const Mat2& x, const Mat2& y) {
  Mat4 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) r(2 * i + k, 2 * j + l) = x(i, j) * y(k, l);
  return r;
}

/// Row-major vectorization (m00, m01, m10, m11) and its inverse.
inline Vec4 vec_row(const Mat2& m) { return {m.e[0], m.e[1], m.e[2], m.e[3]}; }

inline Mat2 unvec_row(const Vec4& v) {
  Mat2 m;
  m.e = {v[0], v[1], v[2], v[3]};
  return m;
}

// ---------------------------------------------------------------------------
// Dynamic dense real matrix for classical machines with N states.
// ---------------------------------------------------------------------------

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw ContractError("matrix literal has ragged rows");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const double& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator+(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw ContractError("matrix addition requires matching shapes");
  Matrix r(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) r(i, j) = x(i, j) + y(i, j);
  return r;
}

inline Matrix operator*(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.rows()) throw ContractError("matrix product requires inner dimensions to match");
  Matrix r(x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const double v = x(i, k);
      for (std::size_t j = 0; j < y.cols(); ++j) r(i, j) += v * y(k, j);
    }
  return r;
}

/// out = m * x. Allocation-free; `out` is resized once by the caller.
inline void matvec(const Matrix& m, std::span<const double> x, std::vector<double>& out) {
  out.assign(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * x[j];
    out[i] = acc;
  }
}

inline std::vector<double> operator*(const Matrix& m, const std::vector<double>& x) {
  if (m.cols() != x.size()) throw ContractError("matvec requires matching dimensions");
  std::vector<double> out;
  matvec(m, x, out);
  return out;
}

inline double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

inline double one_norm_diff(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s;
}

}  // namespace hqmm
