#include "ticklab/linalg.hpp"

#include <cmath>
#include <numeric>

namespace ticklab::linalg {
namespace {

template <typename T>
std::vector<T> solve_impl(Matrix<T> a, std::vector<T> b) {
  const std::size_t n = a.rows();
  if (!a.square() || b.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "solve_linear needs a square system");
  }
  const double threshold = 1e-14 * norm_inf(a);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = magnitude(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (magnitude(a(r, col)) > best) {
        best = magnitude(a(r, col));
        pivot = r;
      }
    }
    if (best <= threshold || best == 0.0) {
      throw Error(ErrorKind::SingularMatrix,
                  "pivot " + std::to_string(best) + " in column " + std::to_string(col));
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const T factor = a(r, col) / a(col, col);
      if (factor == T{}) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= factor * a(col, j);
      b[r] -= factor * b[col];
    }
  }
  std::vector<T> x(n);
  for (std::size_t i = n; i-- > 0;) {
    T s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

template <typename T>
std::vector<T> pow_apply_impl(const Matrix<T>& m, std::vector<T> v, std::uint64_t power) {
  if (!m.square() || v.size() != m.rows()) {
    throw Error(ErrorKind::InvalidArgument, "mat_pow_apply shape mismatch");
  }
  for (std::uint64_t k = 0; k < power; ++k) v = row_times(v, m);
  return v;
}

template <typename T>
Matrix<T> expm_impl(const Matrix<T>& m) {
  if (!m.square()) throw Error(ErrorKind::InvalidArgument, "expm needs a square matrix");
  const std::size_t n = m.rows();
  const double norm = norm_one(m);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const double scale = std::ldexp(1.0, -squarings);
  const Matrix<T> x = m * T(scale);

  Matrix<T> result = Matrix<T>::identity(n);
  Matrix<T> term = Matrix<T>::identity(n);
  for (int k = 1; k <= 13; ++k) {
    term = term * x;
    term *= T(1.0 / k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

// Determinant by Laplace expansion along the first row; only for d <= 4.
double det_laplace(const RealMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    RealMatrix sub(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r) {
      std::size_t c2 = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == j) continue;
        sub(r - 1, c2++) = m(r, c);
      }
    }
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    total += sign * m(0, j) * det_laplace(sub);
  }
  return total;
}

// LU with partial pivoting; returns det and the pivot magnitude ratio.
struct LuDet {
  double det;
  double pivot_ratio;
};

LuDet det_lu(RealMatrix a) {
  const std::size_t n = a.rows();
  double sign = 1.0;
  double det = 1.0;
  double pmin = INFINITY;
  double pmax = 0.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    const double p = std::abs(a(pivot, col));
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
    if (p == 0.0) return {0.0, 0.0};
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      sign = -sign;
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
    }
    det *= a(col, col);
  }
  return {sign * det, pmax > 0.0 ? pmin / pmax : 0.0};
}

RealMatrix minor_matrix(const RealMatrix& m, std::size_t skip_row, std::size_t skip_col) {
  const std::size_t n = m.rows();
  RealMatrix sub(n - 1, n - 1);
  std::size_t r2 = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == skip_row) continue;
    std::size_t c2 = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (c == skip_col) continue;
      sub(r2, c2++) = m(r, c);
    }
    ++r2;
  }
  return sub;
}

template <typename MinorDet>
RealMatrix adjugate_by_cofactors(const RealMatrix& m, MinorDet&& minor_det) {
  const std::size_t n = m.rows();
  RealMatrix adj(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(i, j) = sign * minor_det(minor_matrix(m, j, i));
    }
  }
  return adj;
}

}  // namespace

RealVector solve_linear(const RealMatrix& a, const RealVector& b) { return solve_impl(a, b); }
ComplexVector solve_linear(const ComplexMatrix& a, const ComplexVector& b) {
  return solve_impl(a, b);
}

RealVector mat_pow_apply(const RealMatrix& m, const RealVector& v, std::uint64_t power) {
  return pow_apply_impl(m, v, power);
}
ComplexVector mat_pow_apply(const ComplexMatrix& m, const ComplexVector& v,
                            std::uint64_t power) {
  return pow_apply_impl(m, v, power);
}

RealMatrix expm(const RealMatrix& m) { return expm_impl(m); }
ComplexMatrix expm(const ComplexMatrix& m) { return expm_impl(m); }

ComplexMatrix logm_2x2(const ComplexMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) {
    throw Error(ErrorKind::InvalidArgument, "logm_2x2 needs a 2x2 matrix");
  }
  const Complex half_trace = 0.5 * (m(0, 0) + m(1, 1));
  const Complex half_gap = 0.5 * (m(0, 0) - m(1, 1));
  const Complex disc = std::sqrt(half_gap * half_gap + m(0, 1) * m(1, 0));
  const Complex lam1 = half_trace + disc;
  const Complex lam2 = half_trace - disc;
  const double scale = std::max(1.0, max_abs(m));
  for (const Complex& lam : {lam1, lam2}) {
    if (std::abs(lam) <= 1e-14 * scale) {
      throw Error(ErrorKind::SingularMatrix, "logm_2x2 of a singular matrix");
    }
    if (std::abs(lam.imag()) <= 1e-12 && lam.real() < 0.0) {
      throw Error(ErrorKind::BranchCutHit,
                  "eigenvalue " + std::to_string(lam.real()) + " on the negative real axis");
    }
  }
  const Complex log1 = std::log(lam1);
  const Complex gap = lam1 - lam2;
  Complex slope;
  if (std::abs(gap) <= 1e-4 * std::abs(lam2)) {
    // log(1+r)/r as a series; exact Jordan limit at r = 0.
    const Complex r = gap / lam2;
    slope = (1.0 - r / 2.0 + r * r / 3.0 - r * r * r / 4.0 + r * r * r * r / 5.0) / lam2;
  } else {
    slope = (log1 - std::log(lam2)) / gap;
  }
  const Complex offset = log1 - slope * lam1;
  ComplexMatrix out = m * slope;
  out(0, 0) += offset;
  out(1, 1) += offset;
  return out;
}

double determinant(const RealMatrix& m) {
  if (!m.square()) throw Error(ErrorKind::InvalidArgument, "determinant needs a square matrix");
  if (m.rows() <= 4) return det_laplace(m);
  return det_lu(m).det;
}

RealMatrix adjugate(const RealMatrix& m) {
  if (!m.square()) throw Error(ErrorKind::InvalidArgument, "adjugate needs a square matrix");
  const std::size_t n = m.rows();
  if (n == 1) return RealMatrix{{1.0}};
  if (n <= 4) return adjugate_by_cofactors(m, det_laplace);

  const LuDet lu = det_lu(m);
  if (lu.pivot_ratio > 1e-8) {
    RealMatrix adj(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      RealVector e(n, 0.0);
      e[j] = 1.0;
      const RealVector col = solve_linear(m, e);
      for (std::size_t i = 0; i < n; ++i) adj(i, j) = lu.det * col[i];
    }
    return adj;
  }
  return adjugate_by_cofactors(m, [](const RealMatrix& sub) { return det_lu(sub).det; });
}

bool is_positive_definite(const ComplexMatrix& h) {
  if (!h.square()) return false;
  const std::size_t n = h.rows();
  ComplexMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = h(j, j).real();
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l(j, k));
    if (!(diag > 0.0)) return false;
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = h(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / l(j, j);
    }
  }
  return true;
}

}  // namespace ticklab::linalg
