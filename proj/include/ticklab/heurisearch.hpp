#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ticklab/json_io.hpp"
#include "ticklab/models.hpp"

namespace ticklab {

// Unconstrained parameters: T0_ij = B0_ij^2 / sum_j (B0_ij^2 + B1_ij^2).
struct BParams {
  RealMatrix B0;
  RealMatrix B1;
};

struct RestartTrace {
  double initial = 0.0;
  double final = 0.0;
  double best = 0.0;
};

struct SearchResult {
  std::string objective;
  double best_objective = 0.0;  // value of the minimized objective
  RealMatrix best_T0;
  int best_restart = -1;
  int restarts = 0;
  int steps = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;
  std::vector<RestartTrace> trace;
};

Json to_json(const SearchResult& result);

namespace heurisearch {

ClassicalClock project(const BParams& b);

struct ValueGrad {
  double value = 0.0;
  BParams grad;
};

// p(L) of the projected machine (start state e1) with its exact gradient.
ValueGrad objective_G(const BParams& b, std::uint64_t length);

// 2d pi1 adj(1-T0)^2 eta - (d+1) (pi1 adj(1-T0) eta)^2, i.e. the scaled
// accuracy witness d sigma2 - mu(mu-d) times det(1-T0)^2.
double objective_F_value(const BParams& b);
// Value plus central-difference gradient.
ValueGrad objective_F(const BParams& b, double h = 1e-7);

// Central differences of a value-only function over all B entries.
ValueGrad finite_difference(const std::function<double(const BParams&)>& f, const BParams& b,
                            double h = 1e-7);

using Objective = std::function<ValueGrad(const BParams&)>;

struct AdamOptions {
  int restarts = 100;
  int steps = 10000;
  double learning_rate = 0.005;
  std::uint64_t seed = 1;
  int threads = 1;
};

// Full-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8) from standard Gaussian
// B per restart, generator seeded by (seed, restart). Returns the lowest
// value seen; ties go to the lower restart index.
SearchResult adam_minimize(const Objective& objective, int d, const AdamOptions& options);

// Maximizes p(L); best_objective is reported as p(L) (not its negative).
SearchResult search_pL(int d, std::uint64_t length, const AdamOptions& options);

struct FSearch {
  SearchResult result;
  bool candidate_violation = false;  // best F < -1e-8
  bool confirmed_violation = false;  // resolvent witness of best_T0 > 1e-9
  double resolvent_witness = 0.0;    // mu(mu-d) - d sigma2 at best_T0
};

// Minimizes F. For d >= 3 a negative F is only reported as a confirmed
// violation once the resolvent moments of the projected model agree.
FSearch search_F(int d, const AdamOptions& options);

// sigma2/mu^2 + weight (mu - target)^2 from the resolvent moments, i.e. 1/R
// held near a fixed mean; 1e6 when the machine never ticks.
double inverse_accuracy_penalty(const BParams& b, double mu_target, double weight);

}  // namespace heurisearch
}  // namespace ticklab
