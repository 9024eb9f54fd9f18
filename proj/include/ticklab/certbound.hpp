#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ticklab/json_io.hpp"
#include "ticklab/matrix.hpp"

namespace ticklab {

struct StageRecord {
  double delta = 0.0;
  std::uint64_t evaluated = 0;  // feasible cells evaluated in this stage
  std::uint64_t surviving = 0;  // cells kept for refinement
  double stage_max = 0.0;       // best p(L) over the stage's evaluation points
  double incumbent = 0.0;       // after this stage
  double upper_bound = 0.0;     // stage_max + delta d^2 / 2
};

struct BoundCertificate {
  int d = 0;
  std::uint64_t L = 0;
  double incumbent = 0.0;
  RealMatrix incumbent_T0;
  double upper_bound = 0.0;
  double final_delta = 0.0;
  double gradient_bound = 0.0;  // sqrt(D) = d
  double error_term = 0.0;      // final_delta d^2 / 2
  std::vector<StageRecord> schedule;
  double elapsed_seconds = 0.0;
  bool partial = false;
  // run parameters, echoed for reproducibility
  double target_error = 0.0;
  double delta0 = 0.0;
  int refine_factor = 0;
  int threads = 0;
  std::uint64_t max_points_per_stage = 0;
};

// elapsed_seconds is left out unless asked for, so repeated runs print the
// same bytes.
Json to_json(const BoundCertificate& cert, bool include_timing = false);

namespace certbound {

// dp(L)/dT_ij for the start state e1, by one forward and one backward pass.
RealMatrix grad_pL(const RealMatrix& T0, std::uint64_t length);

struct BoundOptions {
  double target_error = 1e-2;
  double delta0 = 0.05;  // 1/delta0 must be an integer
  int refine_factor = 5;
  int threads = 1;
  std::uint64_t max_points_per_stage = 400'000'000;
  std::function<void(const StageRecord&)> progress;
};

// Cell-centred lattice refinement over all d x d no-tick matrices. Each cell
// is evaluated at the projection of its centre onto the feasible set, pruned
// when p + delta d^2 < incumbent, and the survivors are tiled by children of
// step delta / refine_factor until delta d^2 / 2 <= target_error.
BoundCertificate certified_upper_bound(int d, std::uint64_t length, const BoundOptions& options);

}  // namespace certbound
}  // namespace ticklab
