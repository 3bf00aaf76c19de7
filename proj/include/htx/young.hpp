#pragma once

// Pathwise integration against Holder drives on a shared grid, and the
// Picard iteration whose fixed point is the implicit-trapezoid trajectory.

#include <vector>

#include "htx/grid.hpp"
#include "htx/jets.hpp"
#include "htx/paths.hpp"

namespace htx {

// Running integral t -> int_0^t f dg by trapezoid sums:
//   out[j+1] = out[j] + (f[j] + f[j+1])/2 * (g[j+1] - g[j]),  out[0] = 0.
// For beta-Holder f and g with 2*beta > 1 this converges to the limit of
// Riemann-Stieltjes sums, and it reproduces the order-2 product rule exactly
// on the grid, which the left-point rule does not.
GridFn young_integral(const GridFn& f, const GridFn& g);

struct PicardConfig {
  int max_iterations = 60;
  double tolerance = 1e-12;  // sup-norm distance between successive sweeps
  int windows = 1;           // split the grid into this many index ranges
};

struct SolverOutput {
  std::vector<Vec> trajectory;  // one state per grid node
  int iterations = 0;           // total sweeps across all windows
  std::vector<double> deltas;   // sup-norm update distance per sweep
  bool converged = false;
};

// Iterates x_{m+1}(t) = x(0) + sum_i int_0^t V_i(x_m) dy^i with trapezoid
// quadrature until the trajectory stops moving.  With windows > 1 the grid is
// split into consecutive index ranges solved left to right, each restarted
// from the previous range's endpoint; this keeps the contraction constant of
// each sub-problem small on long horizons.
SolverOutput picard_solve(const JetSystem& sys, const PathGrid& y,
                          const PicardConfig& cfg = {});

}  // namespace htx
