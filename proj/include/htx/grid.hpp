#pragma once

#include <vector>
#include <Eigen/Dense>

namespace htx {

// Scalar function sampled on the shared uniform time grid.
using GridFn = std::vector<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A word indexes which driving components are integrated in which order;
// letter 0 is the drift clock.
using Word = std::vector<int>;

// Uniform grid over [0, horizon] with `size` points (size >= 2), t[0] = 0.
std::vector<double> uniform_times(double horizon, std::size_t size);

// Index of the grid node nearest to t; throws if t is farther than tol*dt
// from every node (callers that need interior nodes must align their grids).
std::size_t node_index(const std::vector<double>& times, double t, double tol = 1e-6);

}  // namespace htx
