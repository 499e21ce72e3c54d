#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "predprey/model.hpp"

namespace predprey::ode {

struct OdeTrajectory {
  std::vector<double> times;        // strictly increasing, starts at 0
  std::vector<DensityState> states; // same length; closed-quadrant states
  double rel_tol = 0.0;
  double abs_tol = 0.0;
};

// Adaptive Dormand-Prince 5(4) with PI step control and dense output.
// Without output_grid the trajectory holds the accepted solver steps;
// with it, states are interpolated onto the grid (which must be increasing
// and inside [0, horizon]). Steps that dip below 0 by less than abs_tol are
// clamped to 0 (positivity repair).
OdeTrajectory integrate(const ModelParams& params, DensityState z0, double horizon,
                        double rel_tol = 1e-8, double abs_tol = 1e-10,
                        const std::optional<std::vector<double>>& output_grid = std::nullopt);

struct DissipativityReport {
  bool entered = false;
  std::optional<double> entry_time;
  std::size_t violations_after_entry = 0;
};

// Membership scan of the absorbing set
//   A = { N <= k + delta,  N + beta*P <= k(1+c)^2/(4c) + eps },
// with 10*abs_tol slack on both inequalities after entry.
DissipativityReport dissipativity_check(const OdeTrajectory& traj, const ModelParams& params,
                                        double beta, double eps, double delta);

}  // namespace predprey::ode
