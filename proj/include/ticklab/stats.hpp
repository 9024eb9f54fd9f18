#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

#include "ticklab/json_io.hpp"
#include "ticklab/models.hpp"

namespace ticklab {

enum class MomentMethod { resolvent, closed_form, truncated };

std::string_view to_string(MomentMethod m);

// Tick-time statistics. mu in time steps, sigma2 in steps^2, accuracy
// R = mu^2 / sigma2. A zero variance is flagged with accuracy_infinite
// instead of storing +inf, and accuracy is then 0.
struct TickStatistics {
  double mu = 0.0;
  double sigma2 = 0.0;
  double accuracy = 0.0;
  bool accuracy_infinite = false;
  RealVector pmf_prefix;  // p(1), ..., p(N)
  MomentMethod method = MomentMethod::resolvent;

  // Fills accuracy / accuracy_infinite from mu and sigma2.
  static TickStatistics from_moments(double mu, double sigma2, MomentMethod method);
};

Json to_json(const TickStatistics& stats);

// Survival f(0..N): f(L) = probability of no tick through step L.
using SurvivalSeries = RealVector;

namespace stats {

// C(n, r) in double precision, rounded to the nearest integer while exact.
double binomial(std::uint64_t n, std::uint64_t r);

double survival_classical(const ClassicalClock& clock, std::uint64_t length);
SurvivalSeries survival_series(const ClassicalClock& clock, std::uint64_t horizon);

// p(L) = pi0 T0^(L-1) (1 - T0) eta. Rounding residue above -1e-12 is clamped
// to zero; anything more negative raises NegativeProbability.
double pmf_classical(const ClassicalClock& clock, std::uint64_t length);
RealVector pmf_series(const ClassicalClock& clock, std::uint64_t horizon);

// Binomial closed form for the multicyclic family with the length-shifted
// start state: C(m-1, n-1) (1-q)^n q^(m-n), m = ceil(L/k), n = d/k.
double pmf_multicyclic_closed(const MulticyclicParams& p, std::uint64_t length);

// Closed-form p(L) for T0 = [[a, b], [c, d]] started in state 1, from the
// residues at the eigenvalues t+- = (a + d +- sqrt(Delta)) / 2.
double pmf_2x2_closed(double a, double b, double c, double d, std::uint64_t length);

// mu = pi0 x with (1 - T0) x = eta, sigma2 = 2 pi0 y - mu (mu + 1) with
// (1 - T0) y = x. Throws NeverTicks when the system is singular.
TickStatistics moments_classical_resolvent(const ClassicalClock& clock);

// mu = d/(1-q), sigma2 = k d q/(1-q)^2, R = d/(k q).
TickStatistics moments_multicyclic_closed(const MulticyclicParams& p);

double survival_quantum(const QuantumClock& clock, std::uint64_t length);
SurvivalSeries survival_series(const QuantumClock& clock, std::uint64_t horizon);
double pmf_quantum(const QuantumClock& clock, std::uint64_t length);
RealVector pmf_series(const QuantumClock& clock, std::uint64_t horizon);

// Real superoperator of rho -> K0 rho K0^dag on the d^2-dimensional real
// space of Hermitian matrices (diagonal entries, then Re/Im of the upper
// triangle), together with the vectorized initial state and trace functional.
struct Superoperator {
  RealMatrix S;
  RealVector initial;
  RealVector trace;
};
Superoperator vectorize(const QuantumClock& clock);

struct TruncatedMoments {
  double mu = 0.0;
  double second_moment = 0.0;  // E[T^2]
  std::uint64_t horizon = 0;   // N with f(N) < tol
  double ratio = 0.0;          // empirical geometric decay of the survival tail
  double mu_tail = 0.0;        // bound on the neglected part of mu
  double second_tail = 0.0;    // bound on the neglected part of E[T^2]
};

// Truncated sums up to the first N with f(N) < tol, plus geometric tail
// bounds from the geometric-mean survival decay over the last ten steps.
TruncatedMoments truncated_moments(const SurvivalSeries& survival, double tol);

// Superoperator resolvent route, cross-checked against truncated sums.
// NoConvergence when f(horizon_cap) >= tol; RouteMismatch when the routes
// disagree beyond 1e-6 plus the tail bound.
TickStatistics moments_quantum(const QuantumClock& clock, std::uint64_t horizon_cap = 1'000'000,
                               double tol = 1e-12);

// Closed-form qubit moments; DegenerateParams at q = 1 or u = 1.
TickStatistics moments_qubit_closed(const QubitParams& p);

// Dispatches on the model type (classical resolvent or quantum routes).
TickStatistics moments(const ClockModel& model);
double pmf(const ClockModel& model, std::uint64_t length);
SurvivalSeries survival_series(const ClockModel& model, std::uint64_t horizon);

// CSV with columns L,pL,survival for L = 1..N.
void write_pmf_csv(std::ostream& out, const SurvivalSeries& survival);

}  // namespace stats
}  // namespace ticklab
