#include "htx/young.hpp"

#include <cmath>
#include <stdexcept>

namespace htx {

GridFn young_integral(const GridFn& f, const GridFn& g) {
  if (f.size() != g.size())
    throw std::invalid_argument("young_integral: mismatched grid sizes");
  if (f.empty()) throw std::invalid_argument("young_integral: empty grid");
  GridFn out(f.size(), 0.0);
  for (std::size_t j = 0; j + 1 < f.size(); ++j) {
    out[j + 1] = out[j] + 0.5 * (f[j] + f[j + 1]) * (g[j + 1] - g[j]);
  }
  return out;
}

SolverOutput picard_solve(const JetSystem& sys, const PathGrid& y,
                          const PicardConfig& cfg) {
  sys.validate();
  y.validate();
  if (sys.d != y.drives())
    throw std::invalid_argument("picard_solve: system/path drive mismatch");
  if (cfg.max_iterations < 1)
    throw std::invalid_argument("picard_solve: max_iterations must be >= 1");
  const int m = static_cast<int>(y.size());
  if (cfg.windows < 1 || cfg.windows > m - 1)
    throw std::invalid_argument("picard_solve: windows out of range");

  SolverOutput out;
  out.trajectory.assign(m, sys.x0);
  out.converged = true;

  std::vector<Vec> cur(m), next(m);
  for (int w = 0; w < cfg.windows; ++w) {
    const int i0 = static_cast<int>(
        (static_cast<long long>(w) * (m - 1)) / cfg.windows);
    const int i1 = static_cast<int>(
        (static_cast<long long>(w + 1) * (m - 1)) / cfg.windows);
    const Vec start = out.trajectory[i0];
    for (int j = i0; j <= i1; ++j) cur[j] = start;

    bool window_done = false;
    for (int sweep = 0; sweep < cfg.max_iterations && !window_done; ++sweep) {
      // One Picard sweep: integrate the fields along the current trajectory.
      next[i0] = start;
      std::vector<Vec> vals_lo(sys.d + 1), vals_hi(sys.d + 1);
      for (int i = 0; i <= sys.d; ++i) vals_hi[i] = sys.value(i, cur[i0]);
      for (int j = i0; j < i1; ++j) {
        vals_lo.swap(vals_hi);
        for (int i = 0; i <= sys.d; ++i) vals_hi[i] = sys.value(i, cur[j + 1]);
        Vec step = Vec::Zero(sys.n);
        for (int i = 0; i <= sys.d; ++i) {
          const double dg = y.comps[i][j + 1] - y.comps[i][j];
          step += 0.5 * dg * (vals_lo[i] + vals_hi[i]);
        }
        next[j + 1] = next[j] + step;
      }
      double delta = 0.0;
      for (int j = i0; j <= i1; ++j) {
        delta = std::max(delta, (next[j] - cur[j]).lpNorm<Eigen::Infinity>());
        cur[j] = next[j];
      }
      out.deltas.push_back(delta);
      ++out.iterations;
      if (delta <= cfg.tolerance) window_done = true;
    }
    if (!window_done) out.converged = false;
    for (int j = i0; j <= i1; ++j) out.trajectory[j] = cur[j];
  }
  return out;
}

}  // namespace htx
