#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htx/grid.hpp"

namespace htx {

// Driving path sampled on a uniform grid. Component 0 is the drift clock
// (comps[0] == times identically); components 1..d are the rough drives.
// beta_hint is the user's claimed Holder exponent in (1/2, 1], used by the
// singular-kernel quadratures for their end-cell model.
struct PathGrid {
  std::vector<double> times;
  std::vector<GridFn> comps;
  double beta_hint = 1.0;

  int drives() const { return static_cast<int>(comps.size()) - 1; }
  std::size_t size() const { return times.size(); }
  double dt() const { return times[1] - times[0]; }
  double horizon() const { return times.back(); }
  const GridFn& component(int i) const;
  void validate() const;  // throws std::invalid_argument on violation
};

// Build a PathGrid from closed-form component functions evaluated on a
// uniform grid; comp_values[i-1] supplies component i (component 0 is the
// clock and is filled in automatically).
PathGrid make_path(double horizon, std::size_t grid_size,
                   const std::vector<GridFn>& drive_values, double beta_hint);

struct FbmSpec {
  int d = 1;                     // number of fBm components
  double hurst = 0.75;           // H in (1/2, 1)
  double horizon = 1.0;          // T
  std::size_t grid_size = 1024;  // points including t = 0
  std::uint64_t seed = 0;
  double beta_hint = 0.0;        // <=1/2 means "derive as max(0.5001, H - 0.05)"
};

// Covariance R(t,s) = (s^{2H} + t^{2H} - |t-s|^{2H})/2 of fBm, H in (0,1).
double fbm_covariance(double t, double s, double hurst);

// Exact-in-distribution fBm sampling: Cholesky factor of the grid covariance,
// one independent Gaussian stream per component (stream id = component index).
// The factor depends only on (hurst, horizon, grid_size); FbmSampler keeps it
// so Monte Carlo loops can amortize the O(m^3) factorization.
class FbmSampler {
 public:
  explicit FbmSampler(const FbmSpec& spec);
  PathGrid sample(std::uint64_t seed) const;
  const FbmSpec& spec() const { return spec_; }

 private:
  FbmSpec spec_;
  std::vector<double> times_;
  Mat chol_;  // lower factor for nodes 1..m-1 (t = 0 is pinned at zero)
};

// One-shot convenience wrapper.
PathGrid sample_fbm(const FbmSpec& spec);

// Discretized ||y||_{alpha,t_end} = sup_{t <= t_end} ( ||y(t)|| +
// int_0^t ||y(t)-y(s)|| (t-s)^{-1-alpha} ds ), alpha in (0, 1/2).
// Interior cells: numerator linear between nodes, kernel integrated exactly;
// the cell touching s = t uses the local Holder model with exponent
// beta_hint. include_time selects whether component 0 enters the norm.
double holder_sup_norm(const PathGrid& y, double alpha, double t_end,
                       bool include_time = true);

// CSV io: header "t,y0,...,yd", 17 significant digits, LF endings.
void write_path_csv(const PathGrid& y, const std::string& file);
PathGrid read_path_csv(const std::string& file, double beta_hint);

}  // namespace htx
