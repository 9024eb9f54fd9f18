#include "ticklab/models.hpp"

#include <cmath>
#include <string>

#include "ticklab/linalg.hpp"

namespace ticklab {

RealVector ClassicalClock::tick_probabilities() const {
  const std::size_t d = dim();
  RealVector w(d);
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (double x : T0.row(i)) s += x;
    w[i] = 1.0 - s;
  }
  return w;
}

double QubitParams::theta() const { return std::atan2(std::sqrt(1.0 - u), std::sqrt(u)); }

namespace models {
namespace {

void check_unit_interval(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must lie in [0,1], got " +
                                                std::to_string(x));
  }
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

ClassicalClock build_multicyclic(const MulticyclicParams& p) {
  if (p.d <= 0 || p.k <= 0 || p.d % p.k != 0) {
    throw Error(ErrorKind::BlockMismatch,
                "d=" + std::to_string(p.d) + " is not a multiple of k=" + std::to_string(p.k));
  }
  check_unit_interval(p.q, "q");
  const auto d = static_cast<std::size_t>(p.d);
  const auto k = static_cast<std::size_t>(p.k);
  RealMatrix t0(d, d);
  for (std::size_t first = 0; first < d; first += k) {
    const std::size_t last = first + k - 1;
    for (std::size_t s = first; s < last; ++s) t0(s, s + 1) = 1.0;
    t0(last, first) += p.q;
    if (last + 1 < d) t0(last, last + 1) += 1.0 - p.q;
  }
  RealVector pi0(d, 0.0);
  pi0[0] = 1.0;
  return {std::move(t0), std::move(pi0)};
}

int multicyclic_start_state(int k, std::uint64_t length) {
  if (k <= 0) throw Error(ErrorKind::InvalidArgument, "block size must be positive");
  const auto kk = static_cast<std::uint64_t>(k);
  return static_cast<int>((kk - length % kk) % kk) + 1;
}

ClassicalClock build_multicyclic_for_length(const MulticyclicParams& p, std::uint64_t length) {
  ClassicalClock clock = build_multicyclic(p);
  const int s = multicyclic_start_state(p.k, length);
  std::fill(clock.pi0.begin(), clock.pi0.end(), 0.0);
  clock.pi0[static_cast<std::size_t>(s - 1)] = 1.0;
  return clock;
}

ClassicalClock build_one_way(int d, double q) { return build_multicyclic({d, 1, q}); }
ClassicalClock build_cyclic(int d, double q) { return build_multicyclic({d, d, q}); }

ClassicalClock relabel_start_first(const ClassicalClock& clock) {
  const std::size_t d = clock.dim();
  std::size_t start = d;
  for (std::size_t i = 0; i < d; ++i) {
    if (clock.pi0[i] == 1.0) start = i;
  }
  if (start == d) {
    throw Error(ErrorKind::InvalidArgument, "relabel_start_first needs a point-mass start");
  }
  // Cyclic shift: old state i becomes (i - start) mod d.
  auto label = [&](std::size_t i) { return (i + d - start) % d; };
  RealMatrix t0(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) t0(label(i), label(j)) = clock.T0(i, j);
  RealVector pi0(d, 0.0);
  pi0[0] = 1.0;
  return {std::move(t0), std::move(pi0)};
}

QuantumClock build_qubit(const QubitParams& p) {
  check_unit_interval(p.q, "q");
  check_unit_interval(p.u, "u");
  const double c = std::sqrt(p.u);
  const double s = std::sqrt(1.0 - p.u);
  ComplexMatrix k0{{c, s * p.q}, {-s, c * p.q}};
  return {std::move(k0), ComplexVector{1.0, 0.0}};
}

ComplexMatrix qutrit_unitary(double u) {
  check_unit_interval(u, "u");
  const double root = std::sqrt(3.0 * u * (1.0 - u));
  const double diag = (4.0 * u - 1.0) / 3.0;
  const double plus = (2.0 * (1.0 - u) + 2.0 * root) / 3.0;
  const double minus = (2.0 * (1.0 - u) - 2.0 * root) / 3.0;
  ComplexMatrix unitary{{diag, plus, minus}, {minus, diag, plus}, {plus, minus, diag}};
  const ComplexMatrix gram = adjoint(unitary) * unitary - ComplexMatrix::identity(3);
  if (norm_inf(gram) > 1e-10) {
    throw Error(ErrorKind::NonUnitary, "qutrit unitary deviates by " + std::to_string(norm_inf(gram)));
  }
  return unitary;
}

QuantumClock build_qutrit(double q, double u) {
  check_unit_interval(q, "q");
  ComplexMatrix k0 = qutrit_unitary(u);
  for (std::size_t i = 0; i < 3; ++i) k0(i, 2) *= q;
  return {std::move(k0), ComplexVector{1.0, 0.0, 0.0}};
}

double optimal_q_multicyclic(int d, int k, std::uint64_t length) {
  if (d <= 0 || k <= 0 || d % k != 0) {
    throw Error(ErrorKind::BlockMismatch,
                "d=" + std::to_string(d) + " is not a multiple of k=" + std::to_string(k));
  }
  const std::uint64_t n = static_cast<std::uint64_t>(d / k);
  const std::uint64_t m = ceil_div(length, static_cast<std::uint64_t>(k));
  if (m < n) {
    throw Error(ErrorKind::TooShort, "ceil(L/k)=" + std::to_string(m) + " < d/k=" +
                                         std::to_string(n) + ": tick at step L impossible");
  }
  return 1.0 - static_cast<double>(n) / static_cast<double>(m);
}

void validate(const ClassicalClock& clock) {
  const std::size_t d = clock.dim();
  if (d == 0 || !clock.T0.square()) {
    throw Error(ErrorKind::InvariantViolation, "T0 must be a non-empty square matrix");
  }
  if (clock.pi0.size() != d) {
    throw Error(ErrorKind::InvariantViolation, "pi0 length differs from dimension");
  }
  for (std::size_t i = 0; i < d; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double x = clock.T0(i, j);
      if (!std::isfinite(x) || x < 0.0) {
        throw Error(ErrorKind::InvariantViolation, "T0(" + std::to_string(i) + "," +
                                                       std::to_string(j) + ") is negative or non-finite");
      }
      row_sum += x;
    }
    if (row_sum > 1.0 + 1e-12) {
      throw Error(ErrorKind::InvariantViolation,
                  "row " + std::to_string(i) + " of T0 sums to " + std::to_string(row_sum) + " > 1");
    }
  }
  double total = 0.0;
  for (double x : clock.pi0) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorKind::InvariantViolation, "pi0 has a negative or non-finite entry");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvariantViolation, "pi0 sums to " + std::to_string(total) + ", not 1");
  }
}

void validate(const QuantumClock& clock) {
  const std::size_t d = clock.dim();
  if (d == 0 || !clock.K0.square()) {
    throw Error(ErrorKind::InvariantViolation, "K0 must be a non-empty square matrix");
  }
  if (clock.psi0.size() != d) {
    throw Error(ErrorKind::InvariantViolation, "psi0 length differs from dimension");
  }
  for (const Complex& x : clock.K0.data()) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      throw Error(ErrorKind::InvariantViolation, "K0 has a non-finite entry");
    }
  }
  // 1 - K0^dag K0 >= -1e-10: (1 + 1e-10) 1 - K0^dag K0 must be positive definite.
  ComplexMatrix slack = ComplexMatrix::identity(d) * Complex(1.0 + 1e-10) - adjoint(clock.K0) * clock.K0;
  if (!linalg::is_positive_definite(slack)) {
    throw Error(ErrorKind::InvariantViolation, "largest singular value of K0 exceeds 1");
  }
  double norm2 = 0.0;
  for (const Complex& x : clock.psi0) norm2 += std::norm(x);
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvariantViolation, "psi0 is not a unit vector");
  }
}

void validate(const ClockModel& model) {
  std::visit([](const auto& m) { validate(m); }, model);
}

}  // namespace models
}  // namespace ticklab
