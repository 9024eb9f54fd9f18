#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ticklab/json_io.hpp"
#include "ticklab/models.hpp"
#include "ticklab/stats.hpp"

namespace ticklab {

// No-tick generator: off-diagonal >= 0, row sums <= 0; T0(t) = exp(t A0).
struct ClassicalGenerator {
  RealMatrix A0;
};

// G = -V + iH with V = -(G + G^dag)/2 and H = (G - G^dag)/(2i).
struct QuantumGenerator {
  ComplexMatrix G;
  ComplexMatrix V;
  ComplexMatrix H;
};

struct ClassicalLimitReport {
  std::vector<double> deltas;
  std::vector<RealMatrix> quotients;  // (T0(delta) - 1) / delta
  std::vector<double> deviations;     // max-norm distance of each quotient to the limit
  std::vector<double> differences;    // distance between consecutive quotients
  ClassicalGenerator limit;
  bool limit_exists = false;
  std::string verdict;
};

struct QuantumLimitReport {
  std::vector<double> deltas;
  std::vector<ComplexMatrix> quotients;  // logm(K0(delta)) / delta
  std::vector<double> deviations;
  QuantumGenerator limit;
  bool v_positive = false;
};

Json to_json(const ClassicalLimitReport& report);
Json to_json(const QuantumLimitReport& report);

namespace continuum {

using ClassicalFamily = std::function<ClassicalClock(double)>;
using QuantumFamily = std::function<QuantumClock(double)>;

void validate(const ClassicalGenerator& g);

// mu = -pi0 x with A0 x = eta; E[T^2] = 2 pi0 y with A0 y = x.
TickStatistics continuous_moments_classical(const ClassicalGenerator& g, const RealVector& pi0);

// Bidiagonal ladder: -alpha on the diagonal, alpha on the superdiagonal.
ClassicalGenerator ladder_generator(int d, double alpha);

// Order-one Richardson extrapolation from the two smallest deltas. The limit
// is declared to exist when consecutive quotient differences do not grow and
// the extrapolated matrix is a valid generator.
ClassicalLimitReport classical_generator_limit(const ClassicalFamily& family,
                                               const std::vector<double>& deltas);

QuantumGenerator split_generator(const ComplexMatrix& g);

QuantumLimitReport quantum_generator_limit(const QuantumFamily& family,
                                           const std::vector<double>& deltas);

// One-way model with q = 1 - alpha delta.
ClassicalFamily oneway_family(int d, double alpha);
// Cyclic model with a fixed q, independent of delta.
ClassicalFamily cyclic_family(int d, double q);
ClassicalFamily identity_family(int d);

// Qubit with q = 1 - alpha delta and u = 2q/(1+q^2).
QuantumFamily qubit_family(double alpha);
QuantumFamily quantum_identity_family(int d);

// Exact limit of qubit_family(alpha): alpha [[0, 1/sqrt2], [-1/sqrt2, -1]].
ComplexMatrix qubit_family_generator(double alpha);

}  // namespace continuum
}  // namespace ticklab
