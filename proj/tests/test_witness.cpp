#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ticklab/witness.hpp"

using namespace ticklab;

namespace {

// max over q of the multicyclic pmf by dense scan, no closed-form maximum
double scan_max_pmf(int d, int k, std::uint64_t L) {
  double best = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    best = std::max(best, stats::pmf_multicyclic_closed({d, k, i / 20000.0}, L));
  }
  return best;
}

}  // namespace

TEST_CASE("accuracy witness examples") {
  for (double q : {0.1, 0.5, 0.9}) {
    const TickStatistics s = stats::moments_classical_resolvent(models::build_one_way(2, q));
    CHECK(std::abs(witness::accuracy_witness(s, 2)) < 1e-9 * s.mu * s.mu);
  }
  const double q = 0.5;
  const TickStatistics s = stats::moments_qubit_closed({q, 2 * q / (1 + q * q)});
  CHECK(witness::accuracy_witness(s, 2) == doctest::Approx(32.0 / 9).epsilon(1e-12));
  CHECK(witness::accuracy_witness(TickStatistics::from_moments(3.0, 0.0, MomentMethod::closed_form), 3) == 0.0);
}

TEST_CASE("accuracy witness is nonpositive on multicyclic machines") {
  for (int d = 1; d <= 10; ++d) {
    for (int k = 1; k <= d; ++k) {
      if (d % k) continue;
      for (int i = 1; i <= 9; ++i) {
        const TickStatistics s = stats::moments_classical_resolvent(models::build_multicyclic({d, k, i / 10.0}));
        REQUIRE(witness::accuracy_witness(s, d) <= 1e-9 * std::max(1.0, s.mu * s.mu));
      }
    }
  }
}

TEST_CASE("accuracy witness on random d=2 machines") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 10000; ++t) {
    ClassicalClock c = oracle::random_clock(2, rng);
    const TickStatistics s = stats::moments_classical_resolvent(c);
    REQUIRE(witness::accuracy_witness(s, 2) <= 1e-9 * std::max(1.0, s.mu * s.mu));
  }
}

TEST_CASE("multicyclic max pmf agrees with a dense scan") {
  for (int d : {2, 3, 4, 6}) {
    for (int k = 1; k <= d; ++k) {
      if (d % k) continue;
      for (std::uint64_t L = d + 1; L <= static_cast<std::uint64_t>(d + 10); ++L) {
        CHECK(witness::multicyclic_max_pmf(d, k, L) == doctest::Approx(scan_max_pmf(d, k, L)).epsilon(1e-6));
      }
    }
  }
  CHECK(witness::multicyclic_max_pmf(6, 1, 5) == 0.0);
}

TEST_CASE("classical bound estimate examples") {
  witness::BoundEstimate e = witness::classical_bound_estimate(2, 3);
  CHECK(e.omega == doctest::Approx(8.0 / 27).epsilon(1e-14));
  CHECK(e.best_k == 1);
  e = witness::classical_bound_estimate(2, 7);
  CHECK(e.omega == doctest::Approx(0.105469).epsilon(1e-5));
  CHECK(e.best_k == 2);
  CHECK(witness::classical_bound_estimate(4, 6).best_k == 2);
}

TEST_CASE("estimate column matches the literature to printed precision") {
  for (const witness::QpcaRow& row : witness::reference_qpca()) {
    const double e = witness::classical_bound_estimate(2, row.L).omega;
    // printed with up to 5 significant digits; half an ulp of the last digit
    const double mag = std::pow(10.0, std::floor(std::log10(row.estimate)));
    INFO("L = " << row.L);
    CHECK(std::abs(e - row.estimate) <= 0.5e-4 * mag + 1e-12);
  }
}

TEST_CASE("reference tables") {
  const auto r3 = witness::reference_qpca_row(3);
  REQUIRE(r3);
  CHECK(r3->quantum == 0.3792);
  CHECK(r3->estimate == 0.2963);
  CHECK(r3->upper_bound == 0.29641);
  const auto r10 = witness::reference_qpca_row(10);
  REQUIRE(r10);
  CHECK(r10->quantum == 0.0851);
  CHECK(r10->estimate == 0.08192);
  CHECK(r10->upper_bound == 0.08195);
  CHECK_FALSE(witness::reference_qpca_row(21));
  CHECK(witness::reference_optimal_k(10, 3) == 5);
}

TEST_CASE("optimal k table is reproduced by the scan") {
  for (int d = 3; d <= 10; ++d) {
    for (int j = 1; j <= 10; ++j) {
      INFO("d = " << d << ", L = d + " << j);
      CHECK(witness::classical_bound_estimate(d, d + j).best_k == witness::reference_optimal_k(d, j));
    }
  }
}

TEST_CASE("finite-length witness reports") {
  const double q = 1 - 2.0 / 4;
  const WitnessReport qb = witness::finite_length_witness(models::build_qubit({q, 2 * q / (1 + q * q)}), 4);
  CHECK(qb.value > 0.2501);
  CHECK(qb.violated);
  CHECK(qb.provenance == BoundProvenance::certified);
  CHECK(qb.classical_bound == 0.2501);

  const WitnessReport ow = witness::finite_length_witness(models::build_one_way(2, 1.0 / 3), 3);
  CHECK(ow.value == doctest::Approx(8.0 / 27).epsilon(1e-14));
  CHECK_FALSE(ow.violated);

  const WitnessReport est = witness::finite_length_witness(models::build_one_way(3, 0.5), 8);
  CHECK(est.provenance == BoundProvenance::estimate);
  CHECK(est.classical_bound == doctest::Approx(witness::classical_bound_estimate(3, 8).omega));

  const WitnessReport cert = witness::finite_length_witness(models::build_one_way(2, 0.5), 3, 0.31);
  CHECK(cert.classical_bound == 0.31);
  CHECK(cert.provenance == BoundProvenance::certified);

  const Json j = to_json(qb);
  CHECK(j["kind"] == "finite_length");
  CHECK(j["violated"] == true);
}

TEST_CASE("random d=2 machines never beat the certified column") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 2000; ++t) {
    const ClassicalClock c = oracle::random_clock(2, rng);
    const std::uint64_t L = 3 + rng() % 18;
    REQUIRE_FALSE(witness::finite_length_witness(c, L).violated);
  }
}

TEST_CASE("accuracy witness report provenance") {
  const WitnessReport two = witness::accuracy_witness_report(models::build_one_way(2, 0.5));
  CHECK(two.provenance == BoundProvenance::proven);
  CHECK_FALSE(two.violated);
  const WitnessReport three = witness::accuracy_witness_report(models::build_cyclic(3, 0.5));
  CHECK(three.provenance == BoundProvenance::conjectured);
  const double q = 0.5;
  const WitnessReport qb = witness::accuracy_witness_report(models::build_qubit({q, 2 * q / (1 + q * q)}));
  CHECK(qb.violated);
  CHECK(qb.value == doctest::Approx(32.0 / 9).epsilon(1e-9));
}

TEST_CASE("qubit family and optimizer") {
  // family value is one point of the search space, the optimum cannot be lower
  for (std::uint64_t L = 3; L <= 8; ++L) {
    const double fam = witness::qubit_family_pmf(L);
    const witness::QuantumOptimum opt = witness::optimize_qubit_pmf(L, 101);
    CHECK(opt.value >= fam - 1e-12);
    CHECK(stats::pmf_quantum(models::build_qubit({opt.q, opt.u}), L) == doctest::Approx(opt.value).epsilon(1e-12));
  }
}

TEST_CASE("qutrit family witness point") {
  const witness::QutritWitnessPoint p = witness::qutrit_family_witness(6.0);
  CHECK(p.q == doctest::Approx(0.5));
  CHECK(p.u == doctest::Approx(0.8));
  CHECK(p.witness == doctest::Approx(witness::accuracy_witness(p.stats, 3)));
}
