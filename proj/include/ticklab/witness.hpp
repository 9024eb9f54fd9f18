#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ticklab/json_io.hpp"
#include "ticklab/models.hpp"
#include "ticklab/stats.hpp"

namespace ticklab {

enum class WitnessKind { accuracy, finite_length };

// Where the classical bound came from. "proven" and "conjectured" tag the
// accuracy witness (d = 2 versus d > 2); "estimate" is the multicyclic scan,
// "certified" a lattice certificate or the published upper-bound column.
enum class BoundProvenance { proven, conjectured, estimate, certified };

std::string_view to_string(WitnessKind k);
std::string_view to_string(BoundProvenance p);

struct WitnessReport {
  WitnessKind kind = WitnessKind::accuracy;
  int d = 0;
  std::optional<std::uint64_t> L;
  double value = 0.0;
  double classical_bound = 0.0;
  BoundProvenance provenance = BoundProvenance::estimate;
  bool violated = false;
  Json model;
};

Json to_json(const WitnessReport& report);

namespace witness {

// mu (mu - d) - d sigma2; nonpositive for classical machines (proven d = 2).
double accuracy_witness(const TickStatistics& stats, int d);

// max over q of the multicyclic p(L): C(m-1,n-1) (1-n/m)^(m-n) (n/m)^n.
// Zero when ceil(L/k) < d/k.
double multicyclic_max_pmf(int d, int k, std::uint64_t length);

struct BoundEstimate {
  double omega = 0.0;
  int best_k = 0;
};

// Scans the divisors k of d in increasing order, keeping the first maximum.
BoundEstimate classical_bound_estimate(int d, std::uint64_t length);

WitnessReport accuracy_witness_report(const ClockModel& model);

// Compares p(L) with a certified bound when one is supplied (or, for d = 2
// and L = 3..20, the published upper-bound column), else with the estimate.
WitnessReport finite_length_witness(const ClockModel& model, std::uint64_t length,
                                    std::optional<double> certified = std::nullopt);

// Literature values, d = 2: quantum maximum, classical estimate, classical
// upper bound for L = 3..20.
struct QpcaRow {
  std::uint64_t L;
  double quantum;
  double estimate;
  double upper_bound;
};
const std::array<QpcaRow, 18>& reference_qpca();
std::optional<QpcaRow> reference_qpca_row(std::uint64_t length);

// Literature optimal block sizes for d = 3..10 and L = d+1..d+10.
// reference_optimal_k(d, j) is the entry at L = d + j, j = 1..10.
int reference_optimal_k(int d, int offset);

// Literature heuristic-search outcome: 0 means the optimum was found, else
// the relative gap in percent, d = 3..10, L = d + offset.
int reference_search_gap(int d, int offset);

// Qubit family q = 1 - 2/L, u = 2q/(1+q^2) evaluated at p(L).
double qubit_family_pmf(std::uint64_t length);

struct QuantumOptimum {
  double q = 0.0;
  double u = 0.0;
  double value = 0.0;
  std::uint64_t evaluations = 0;
};

// Maximizes p(L) over (q, u) in [0,1]^2: uniform grid, then compass search
// from the best few grid points.
QuantumOptimum optimize_qubit_pmf(std::uint64_t length, int grid = 201);
QuantumOptimum optimize_qutrit_pmf(std::uint64_t length, int grid = 201);

// Qutrit at q = 1 - 3/mu_target, u = 2q/(1+q^2): accuracy witness for d = 3
// computed from the model's own moments.
struct QutritWitnessPoint {
  double mu_target = 0.0;
  double q = 0.0;
  double u = 0.0;
  TickStatistics stats;
  double witness = 0.0;
};
QutritWitnessPoint qutrit_family_witness(double mu_target);

}  // namespace witness
}  // namespace ticklab
