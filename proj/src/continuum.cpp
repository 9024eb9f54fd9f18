#include "ticklab/continuum.hpp"

#include <cmath>

#include "ticklab/linalg.hpp"

namespace ticklab {
namespace {

Json complex_matrix_json(const ComplexMatrix& m) {
  RealVector re, im;
  for (const Complex& z : m.data()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return Json{{"re", re}, {"im", im}};
}

void check_deltas(const std::vector<double>& deltas) {
  if (deltas.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two deltas");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "deltas must be strictly decreasing");
    }
  }
}

template <typename T>
Matrix<T> richardson(const Matrix<T>& coarse, double d1, const Matrix<T>& fine, double d2) {
  // G(delta) = G0 + c delta  =>  G0 = (d1 G(d2) - d2 G(d1)) / (d1 - d2)
  return (fine * T(d1) - coarse * T(d2)) * T(1.0 / (d1 - d2));
}

bool is_generator(const RealMatrix& a, double tol) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j && a(i, j) < -tol) return false;
      row += a(i, j);
    }
    if (row > tol) return false;
  }
  return true;
}

}  // namespace

Json to_json(const ClassicalLimitReport& r) {
  Json quotients = Json::array();
  for (const RealMatrix& q : r.quotients) quotients.push_back(q.data());
  return Json{{"deltas", r.deltas},
              {"quotients", quotients},
              {"deviations", r.deviations},
              {"differences", r.differences},
              {"limit_A0", r.limit.A0.data()},
              {"d", r.limit.A0.rows()},
              {"limit_exists", r.limit_exists},
              {"verdict", r.verdict}};
}

Json to_json(const QuantumLimitReport& r) {
  Json quotients = Json::array();
  for (const ComplexMatrix& q : r.quotients) quotients.push_back(complex_matrix_json(q));
  return Json{{"deltas", r.deltas},
              {"quotients", quotients},
              {"deviations", r.deviations},
              {"G", complex_matrix_json(r.limit.G)},
              {"V", complex_matrix_json(r.limit.V)},
              {"H", complex_matrix_json(r.limit.H)},
              {"V_positive_semidefinite", r.v_positive}};
}

namespace continuum {

void validate(const ClassicalGenerator& g) {
  if (!g.A0.square() || g.A0.rows() == 0) {
    throw Error(ErrorKind::InvariantViolation, "A0 must be a non-empty square matrix");
  }
  for (double x : g.A0.data()) {
    if (!std::isfinite(x)) throw Error(ErrorKind::InvariantViolation, "A0 has a non-finite entry");
  }
  if (!is_generator(g.A0, 1e-12)) {
    throw Error(ErrorKind::InvariantViolation,
                "A0 needs nonnegative off-diagonal entries and row sums <= 0");
  }
}

TickStatistics continuous_moments_classical(const ClassicalGenerator& g, const RealVector& pi0) {
  validate(g);
  const std::size_t d = g.A0.rows();
  if (pi0.size() != d) throw Error(ErrorKind::InvalidArgument, "pi0 length differs from dimension");
  RealVector x, y;
  try {
    x = linalg::solve_linear(g.A0, RealVector(d, 1.0));
    y = linalg::solve_linear(g.A0, x);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularMatrix) throw Error(ErrorKind::NeverTicks, "A0 is singular");
    throw;
  }
  const double mu = -dot(pi0, x);
  if (!(mu > 0.0)) throw Error(ErrorKind::NeverTicks, "mean tick time " + std::to_string(mu));
  double sigma2 = 2.0 * dot(pi0, y) - mu * mu;
  if (sigma2 < 0.0 && sigma2 > -1e-9 * (1.0 + mu * mu)) sigma2 = 0.0;
  return TickStatistics::from_moments(mu, sigma2, MomentMethod::resolvent);
}

ClassicalGenerator ladder_generator(int d, double alpha) {
  if (d <= 0 || !(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "ladder needs d >= 1, alpha > 0");
  const auto n = static_cast<std::size_t>(d);
  RealMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = -alpha;
    if (i + 1 < n) a(i, i + 1) = alpha;
  }
  return {std::move(a)};
}

ClassicalLimitReport classical_generator_limit(const ClassicalFamily& family,
                                               const std::vector<double>& deltas) {
  check_deltas(deltas);
  ClassicalLimitReport r;
  r.deltas = deltas;
  for (double delta : deltas) {
    const ClassicalClock c = family(delta);
    RealMatrix q = c.T0 - RealMatrix::identity(c.dim());
    q *= 1.0 / delta;
    r.quotients.push_back(std::move(q));
  }
  const std::size_t n = deltas.size();
  r.limit.A0 = richardson(r.quotients[n - 2], deltas[n - 2], r.quotients[n - 1], deltas[n - 1]);
  for (const RealMatrix& q : r.quotients) r.deviations.push_back(max_abs(q - r.limit.A0));
  for (std::size_t i = 0; i + 1 < n; ++i) r.differences.push_back(max_abs(r.quotients[i + 1] - r.quotients[i]));

  bool shrinking = true;
  for (std::size_t i = 0; i + 1 < r.differences.size(); ++i) {
    if (r.differences[i + 1] > r.differences[i] * (1.0 + 1e-9) + 1e-12) shrinking = false;
  }
  double scale = 1.0;
  for (double x : r.limit.A0.data()) scale = std::max(scale, std::abs(x));
  r.limit_exists = shrinking && is_generator(r.limit.A0, 1e-9 * scale);
  r.verdict = r.limit_exists ? "limit exists" : "NoContinuousLimit";
  return r;
}

QuantumGenerator split_generator(const ComplexMatrix& g) {
  const ComplexMatrix gd = adjoint(g);
  QuantumGenerator out{g, (g + gd) * Complex(-0.5, 0.0), (g - gd) * Complex(0.0, -0.5)};
  return out;
}

QuantumLimitReport quantum_generator_limit(const QuantumFamily& family, const std::vector<double>& deltas) {
  check_deltas(deltas);
  QuantumLimitReport r;
  r.deltas = deltas;
  for (double delta : deltas) {
    const QuantumClock c = family(delta);
    if (c.dim() != 2) throw Error(ErrorKind::InvalidArgument, "quantum generator extraction is 2x2 only");
    r.quotients.push_back(linalg::logm_2x2(c.K0) * Complex(1.0 / delta, 0.0));
  }
  const std::size_t n = deltas.size();
  r.limit = split_generator(richardson(r.quotients[n - 2], deltas[n - 2], r.quotients[n - 1], deltas[n - 1]));
  for (const ComplexMatrix& q : r.quotients) r.deviations.push_back(max_abs(q - r.limit.G));
  const ComplexMatrix shifted = r.limit.V + ComplexMatrix::identity(r.limit.V.rows()) * Complex(1e-8, 0.0);
  r.v_positive = linalg::is_positive_definite(shifted);
  return r;
}

ClassicalFamily oneway_family(int d, double alpha) {
  return [d, alpha](double delta) { return models::build_one_way(d, 1.0 - alpha * delta); };
}

ClassicalFamily cyclic_family(int d, double q) {
  return [d, q](double) { return models::build_cyclic(d, q); };
}

ClassicalFamily identity_family(int d) {
  return [d](double) {
    RealVector pi(static_cast<std::size_t>(d), 0.0);
    pi[0] = 1.0;
    return ClassicalClock{RealMatrix::identity(static_cast<std::size_t>(d)), pi};
  };
}

QuantumFamily qubit_family(double alpha) {
  return [alpha](double delta) {
    const double q = 1.0 - alpha * delta;
    return models::build_qubit({q, 2.0 * q / (1.0 + q * q)});
  };
}

QuantumFamily quantum_identity_family(int d) {
  return [d](double) {
    ComplexVector psi(static_cast<std::size_t>(d), 0.0);
    psi[0] = 1.0;
    return QuantumClock{ComplexMatrix::identity(static_cast<std::size_t>(d)), psi};
  };
}

ComplexMatrix qubit_family_generator(double alpha) {
  const double h = alpha / std::sqrt(2.0);
  return ComplexMatrix{{0.0, h}, {-h, -alpha}};
}

}  // namespace continuum
}  // namespace ticklab
