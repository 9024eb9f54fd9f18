#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "ticklab/error.hpp"

namespace ticklab {

using Complex = std::complex<double>;

// Dense row-major matrix. Sizes here are tiny (d <= 10, superoperators
// d^2 <= 100), so a flat std::vector is all we need.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) {
        throw Error(ErrorKind::InvalidArgument, "ragged matrix initializer");
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<T>& data() const noexcept { return data_; }
  std::vector<T>& data() noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(T s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, T s) { return a *= s; }
  friend Matrix operator*(T s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) {
      throw Error(ErrorKind::InvalidArgument, "matrix product shape mismatch");
    }
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T aik = a(i, k);
        if (aik == T{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    }
    return c;
  }

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw Error(ErrorKind::InvalidArgument, "matrix shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;
using RealVector = std::vector<double>;
using ComplexVector = std::vector<Complex>;

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Complex& x) { return std::abs(x); }
inline double conj_of(double x) { return x; }
inline Complex conj_of(const Complex& x) { return std::conj(x); }

template <typename T>
double norm_inf(const Matrix<T>& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (const auto& x : m.row(i)) s += magnitude(x);
    best = std::max(best, s);
  }
  return best;
}

template <typename T>
double norm_one(const Matrix<T>& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += magnitude(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

// Largest entry magnitude; used for entrywise tolerances.
template <typename T>
double max_abs(const Matrix<T>& m) {
  double best = 0.0;
  for (const auto& x : m.data()) best = std::max(best, magnitude(x));
  return best;
}

template <typename T>
double norm_inf(std::span<const T> v) {
  double best = 0.0;
  for (const auto& x : v) best = std::max(best, magnitude(x));
  return best;
}

template <typename T>
double norm_inf(const std::vector<T>& v) {
  return norm_inf(std::span<const T>(v));
}

template <typename T>
Matrix<T> adjoint(const Matrix<T>& m) {
  Matrix<T> a(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(j, i) = conj_of(m(i, j));
  return a;
}

template <typename T>
Matrix<T> transpose(const Matrix<T>& m) {
  Matrix<T> a(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(j, i) = m(i, j);
  return a;
}

inline ComplexMatrix to_complex(const RealMatrix& m) {
  ComplexMatrix c(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.data().size(); ++k) c.data()[k] = m.data()[k];
  return c;
}

// v * M (row vector times matrix).
template <typename T>
std::vector<T> row_times(const std::vector<T>& v, const Matrix<T>& m) {
  if (v.size() != m.rows()) {
    throw Error(ErrorKind::InvalidArgument, "row vector length mismatch");
  }
  std::vector<T> out(m.cols(), T{});
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const T vi = v[i];
    if (vi == T{}) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += vi * m(i, j);
  }
  return out;
}

// M * v (matrix times column vector).
template <typename T>
std::vector<T> times_col(const Matrix<T>& m, const std::vector<T>& v) {
  if (v.size() != m.cols()) {
    throw Error(ErrorKind::InvalidArgument, "column vector length mismatch");
  }
  std::vector<T> out(m.rows(), T{});
  for (std::size_t i = 0; i < m.rows(); ++i) {
    T s{};
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

template <typename T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace ticklab
