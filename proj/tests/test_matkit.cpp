#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ticklab/linalg.hpp"
#include "ticklab/models.hpp"

using namespace ticklab;

namespace {

double residual(const RealMatrix& a, const RealVector& x, const RealVector& b) {
  RealVector ax = times_col(a, x);
  double r = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) r = std::max(r, std::abs(ax[i] - b[i]));
  return r;
}

RealMatrix random_matrix(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  RealMatrix m(n, n);
  for (double& x : m.data()) x = u(rng);
  return m;
}

}  // namespace

TEST_CASE("solve_linear examples") {
  RealVector x = linalg::solve_linear(RealMatrix::identity(3), {1, 2, 3});
  CHECK(x == RealVector{1, 2, 3});

  x = linalg::solve_linear(RealMatrix{{2, 0}, {0, 4}}, {2, 4});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));

  // 1 - T0 for the one-way machine at q = 1/2
  const RealMatrix a = RealMatrix{{0.5, -0.5}, {0.0, 0.5}};
  x = linalg::solve_linear(a, {1, 1});
  CHECK(x[0] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("solve_linear flags singular systems") {
  RealMatrix a{{1, 2}, {2, 4}};
  try {
    linalg::solve_linear(a, {1, 1});
    FAIL("expected SingularMatrix");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularMatrix);
  }
}

TEST_CASE("solve_linear residual on random well-conditioned systems") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 10);
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::size_t>(dim(rng));
    RealMatrix a = random_matrix(n, rng);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);  // diagonally dominant
    RealVector b(n);
    std::normal_distribution<double> g(0.0, 3.0);
    for (double& v : b) v = g(rng);
    const RealVector x = linalg::solve_linear(a, b);
    REQUIRE(residual(a, x, b) <= 1e-10 * (1.0 + norm_inf(b)));
  }
}

TEST_CASE("complex solve") {
  ComplexMatrix a{{Complex(1, 1), 0.0}, {Complex(0, 2), 2.0}};
  ComplexVector x = linalg::solve_linear(a, ComplexVector{Complex(2, 0), Complex(0, 0)});
  // x0 = 2/(1+i) = 1 - i ; x1 = -2i x0 / 2 = -i(1-i) = -1 - i
  CHECK(std::abs(x[0] - Complex(1, -1)) < 1e-14);
  CHECK(std::abs(x[1] - Complex(-1, -1)) < 1e-14);
}

TEST_CASE("mat_pow_apply") {
  std::mt19937_64 rng(3);
  const RealMatrix m = random_matrix(3, rng);
  CHECK(linalg::mat_pow_apply(m, {1, 2, 3}, 0) == RealVector{1, 2, 3});

  const RealMatrix nil{{0, 1}, {0, 0}};
  CHECK(linalg::mat_pow_apply(nil, {1, 0}, 1) == RealVector{0, 1});
  CHECK(linalg::mat_pow_apply(nil, {1, 0}, 2) == RealVector{0, 0});

  const RealMatrix oneway{{0.5, 0.5}, {0, 0.5}};
  const RealVector v = linalg::mat_pow_apply(oneway, {1, 0}, 2);
  CHECK(v[0] == doctest::Approx(0.25));
  CHECK(v[1] == doctest::Approx(0.5));

  // agrees with the longhand oracle
  const RealMatrix t = oracle::random_substochastic(4, rng);
  RealVector w{0.1, 0.2, 0.3, 0.4}, ref = w;
  for (int l = 0; l < 17; ++l) ref = oracle::vec_mat(ref, t);
  const RealVector got = linalg::mat_pow_apply(t, w, 17);
  for (std::size_t i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-14));
}

TEST_CASE("expm examples") {
  CHECK(max_abs(linalg::expm(RealMatrix(3, 3)) - RealMatrix::identity(3)) == 0.0);

  const RealMatrix e = linalg::expm(RealMatrix{{1, 0}, {0, -1}});
  CHECK(e(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(std::abs(e(0, 1)) < 1e-15);

  // Jordan block: e^{tA} = e^{-t} [[1, t], [0, 1]]
  const RealMatrix j = linalg::expm(RealMatrix{{-1, 1}, {0, -1}});
  const double ei = std::exp(-1.0);
  CHECK(j(0, 0) == doctest::Approx(ei).epsilon(1e-14));
  CHECK(j(0, 1) == doctest::Approx(ei).epsilon(1e-14));
  CHECK(std::abs(j(1, 0)) < 1e-16);
  CHECK(j(1, 1) == doctest::Approx(ei).epsilon(1e-14));
}

TEST_CASE("expm doubling identity") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> nrm(0.01, 5.0);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<std::size_t>(dim(rng));
    RealMatrix m = random_matrix(n, rng);
    m *= nrm(rng) / std::max(norm_one(m), 1e-300);
    const RealMatrix full = linalg::expm(m);
    const RealMatrix half = linalg::expm(m * 0.5);
    REQUIRE(max_abs(full - half * half) <= 1e-11 * max_abs(full));
  }
}

TEST_CASE("complex expm of a rotation generator") {
  const double th = 0.7;
  const ComplexMatrix g{{0.0, th}, {-th, 0.0}};
  const ComplexMatrix r = linalg::expm(g);
  CHECK(std::abs(r(0, 0) - std::cos(th)) < 1e-14);
  CHECK(std::abs(r(0, 1) - std::sin(th)) < 1e-14);
  CHECK(std::abs(r(1, 0) + std::sin(th)) < 1e-14);
}

TEST_CASE("logm_2x2 examples") {
  CHECK(max_abs(linalg::logm_2x2(ComplexMatrix::identity(2))) < 1e-15);

  const double e = std::exp(1.0);
  const ComplexMatrix l = linalg::logm_2x2(ComplexMatrix{{e, 0.0}, {0.0, e * e}});
  CHECK(std::abs(l(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(l(1, 1) - 2.0) < 1e-14);
  CHECK(std::abs(l(0, 1)) < 1e-14);

  const double q = 0.99;
  const QuantumClock c = models::build_qubit({q, 2 * q / (1 + q * q)});
  const ComplexMatrix g = linalg::logm_2x2(c.K0);
  CHECK(max_abs(linalg::expm(g) - c.K0) < 1e-10);
}

TEST_CASE("logm_2x2 defective and branch cut") {
  const ComplexMatrix jordan{{0.5, 1.0}, {0.0, 0.5}};
  const ComplexMatrix g = linalg::logm_2x2(jordan);
  // log of lambda(1 + N/lambda) = log(lambda) 1 + N/lambda
  CHECK(std::abs(g(0, 0) - std::log(0.5)) < 1e-14);
  CHECK(std::abs(g(0, 1) - 2.0) < 1e-13);
  CHECK(max_abs(linalg::expm(g) - jordan) < 1e-12);

  try {
    linalg::logm_2x2(ComplexMatrix{{-1.0, 0.0}, {0.0, 1.0}});
    FAIL("expected BranchCutHit");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::BranchCutHit);
  }
}

TEST_CASE("logm/expm round trip on random contractions") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  int tested = 0;
  while (tested < 1000) {
    ComplexMatrix m(2, 2);
    for (Complex& z : m.data()) z = Complex(g(rng), g(rng));
    m *= Complex(0.9 / std::max(norm_inf(m), 1e-12), 0.0);
    // skip spectra near the negative real axis or zero
    const Complex tr = m(0, 0) + m(1, 1);
    const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const Complex s = std::sqrt(tr * tr - 4.0 * det);
    bool ok = true;
    for (Complex lam : {(tr + s) * 0.5, (tr - s) * 0.5}) {
      if (std::abs(lam) < 0.05 || (lam.real() < 0 && std::abs(lam.imag()) < 0.05)) ok = false;
    }
    if (!ok) continue;
    ++tested;
    REQUIRE(max_abs(linalg::expm(linalg::logm_2x2(m)) - m) <= 1e-9);
  }
}

TEST_CASE("adjugate examples") {
  const RealMatrix a = linalg::adjugate(RealMatrix{{1.5, -2.0}, {3.0, 7.0}});
  CHECK(a == RealMatrix{{7.0, 2.0}, {-3.0, 1.5}});
  for (std::size_t n = 1; n <= 8; ++n) {
    CHECK(max_abs(linalg::adjugate(RealMatrix::identity(n)) - RealMatrix::identity(n)) < 1e-14);
  }
  const RealMatrix c = linalg::adjugate(RealMatrix{{1, -1}, {-0.5, 1}});
  CHECK(c == RealMatrix{{1, 1}, {0.5, 1}});
}

TEST_CASE("adjugate identity on random matrices") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 600; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(t % 10);
    const RealMatrix m = random_matrix(n, rng, 2.0);
    const RealMatrix prod = m * linalg::adjugate(m);
    const double det = linalg::determinant(m);
    const double tol = 1e-9 * std::pow(std::max(1.0, norm_inf(m)), static_cast<double>(n));
    REQUIRE(max_abs(prod - RealMatrix::identity(n) * det) <= tol);
  }
}

TEST_CASE("adjugate of singular matrices") {
  // rank one: adj is nonzero for d = 2, zero for d >= 3
  const RealMatrix a = linalg::adjugate(RealMatrix{{1, 2}, {2, 4}});
  CHECK(a == RealMatrix{{4, -2}, {-2, 1}});
  RealMatrix r(6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) r(i, j) = static_cast<double>((i + 1) * (j + 1));
  CHECK(max_abs(linalg::adjugate(r)) < 1e-6);

  // rank d-1: adj = cofactor matrix, still satisfies M adj(M) = 0
  RealMatrix s = RealMatrix::identity(6);
  s(5, 5) = 0.0;
  s(5, 0) = 1.0;
  s(0, 5) = 0.0;
  const RealMatrix as = linalg::adjugate(s);
  CHECK(max_abs(s * as) < 1e-12);
  CHECK(max_abs(as) > 0.5);
}

TEST_CASE("determinant and positive definiteness") {
  CHECK(linalg::determinant(RealMatrix{{1, 2}, {3, 4}}) == doctest::Approx(-2.0));
  CHECK(linalg::is_positive_definite(ComplexMatrix{{2.0, Complex(0, 1)}, {Complex(0, -1), 2.0}}));
  CHECK_FALSE(linalg::is_positive_definite(ComplexMatrix{{1.0, 0.0}, {0.0, -1e-3}}));
}
