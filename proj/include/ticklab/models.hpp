#pragma once

#include <cstdint>
#include <variant>

#include "ticklab/matrix.hpp"

namespace ticklab {

// Classical ticking clock. T0 is the substochastic no-tick matrix; the tick
// probability from state j is the row deficit 1 - sum_k T0(j, k), so the tick
// matrix is never stored.
struct ClassicalClock {
  RealMatrix T0;
  RealVector pi0;

  std::size_t dim() const noexcept { return T0.rows(); }
  // Column vector (1 - T0) * eta: per-state tick probability.
  RealVector tick_probabilities() const;
};

// Quantum clock with a single no-tick Kraus operator and a pure initial state.
struct QuantumClock {
  ComplexMatrix K0;
  ComplexVector psi0;

  std::size_t dim() const noexcept { return K0.rows(); }
};

using ClockModel = std::variant<ClassicalClock, QuantumClock>;

struct MulticyclicParams {
  int d = 2;
  int k = 1;
  double q = 0.5;

  int blocks() const { return d / k; }
};

struct QubitParams {
  double q = 0.5;
  double u = 0.5;

  // Rotation angle of U0 = exp(i theta sigma_y).
  double theta() const;
};

namespace models {

// Block-structured no-tick matrix. Inside each block of size k: superdiagonal
// ones, q from the block's last state back to its first, 1-q onward to the
// next block's first state (absent in the last block: that 1-q is the tick).
// Initial state e_1.
ClassicalClock build_multicyclic(const MulticyclicParams& p);

// 1-based start state s in the first block with (L + s - 1) = 0 mod k.
int multicyclic_start_state(int k, std::uint64_t length);

// Multicyclic model started from multicyclic_start_state(k, L).
ClassicalClock build_multicyclic_for_length(const MulticyclicParams& p, std::uint64_t length);

ClassicalClock build_one_way(int d, double q);
ClassicalClock build_cyclic(int d, double q);

// Same machine with states relabeled so that the initial state comes first.
// Requires a point-mass initial distribution.
ClassicalClock relabel_start_first(const ClassicalClock& clock);

// K0 = U0 diag(1, q), U0 = [[sqrt u, sqrt(1-u)], [-sqrt(1-u), sqrt u]], psi0 = (1, 0).
QuantumClock build_qubit(const QubitParams& p);

// K0 = U(u) diag(1, 1, q) with the circulant qutrit unitary; psi0 = (1, 0, 0).
QuantumClock build_qutrit(double q, double u);
ComplexMatrix qutrit_unitary(double u);

// 1 - n/m with n = d/k, m = ceil(L/k).
double optimal_q_multicyclic(int d, int k, std::uint64_t length);

void validate(const ClassicalClock& clock);
void validate(const QuantumClock& clock);
void validate(const ClockModel& model);

}  // namespace models
}  // namespace ticklab
