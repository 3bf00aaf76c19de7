#include "htx/paths.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "htx/rng.hpp"

namespace htx {

std::vector<double> uniform_times(double horizon, std::size_t size) {
  if (size < 2) throw std::invalid_argument("uniform_times: need at least 2 nodes");
  if (!(horizon > 0)) throw std::invalid_argument("uniform_times: horizon must be positive");
  std::vector<double> t(size);
  double dt = horizon / static_cast<double>(size - 1);
  for (std::size_t j = 0; j < size; ++j) t[j] = static_cast<double>(j) * dt;
  t.back() = horizon;
  return t;
}

std::size_t node_index(const std::vector<double>& times, double t, double tol) {
  double dt = times[1] - times[0];
  double pos = t / dt;
  auto j = static_cast<long long>(std::llround(pos));
  if (j < 0 || j >= static_cast<long long>(times.size()) ||
      std::abs(t - times[static_cast<std::size_t>(j)]) > tol * dt)
    throw std::invalid_argument("node_index: time is not a grid node");
  return static_cast<std::size_t>(j);
}

const GridFn& PathGrid::component(int i) const {
  if (i < 0 || i >= static_cast<int>(comps.size()))
    throw std::invalid_argument("PathGrid::component: index out of range");
  return comps[static_cast<std::size_t>(i)];
}

void PathGrid::validate() const {
  if (times.size() < 2) throw std::invalid_argument("PathGrid: need at least 2 nodes");
  if (comps.empty() || comps[0] != times)
    throw std::invalid_argument("PathGrid: component 0 must equal the time grid");
  if (times.front() != 0.0) throw std::invalid_argument("PathGrid: times must start at 0");
  double dt0 = times[1] - times[0];
  if (!(dt0 > 0)) throw std::invalid_argument("PathGrid: times must be increasing");
  for (std::size_t j = 1; j + 1 < times.size(); ++j) {
    double dt = times[j + 1] - times[j];
    if (std::abs(dt - dt0) > 1e-9 * dt0)
      throw std::invalid_argument("PathGrid: grid must be uniform");
  }
  for (const auto& c : comps)
    if (c.size() != times.size())
      throw std::invalid_argument("PathGrid: component length mismatch");
  if (!(beta_hint > 0.5 && beta_hint <= 1.0))
    throw std::invalid_argument("PathGrid: beta_hint must lie in (1/2, 1]");
}

PathGrid make_path(double horizon, std::size_t grid_size,
                   const std::vector<GridFn>& drive_values, double beta_hint) {
  PathGrid y;
  y.times = uniform_times(horizon, grid_size);
  y.comps.push_back(y.times);
  for (const auto& v : drive_values) y.comps.push_back(v);
  y.beta_hint = beta_hint;
  y.validate();
  return y;
}

double fbm_covariance(double t, double s, double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::domain_error("fbm_covariance: hurst must lie in (0,1)");
  if (t < 0 || s < 0) throw std::domain_error("fbm_covariance: times must be nonnegative");
  double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

FbmSampler::FbmSampler(const FbmSpec& spec) : spec_(spec) {
  if (!(spec_.hurst > 0.5 && spec_.hurst < 1.0))
    throw std::domain_error("FbmSampler: hurst must lie in (1/2, 1)");
  if (spec_.d < 1) throw std::invalid_argument("FbmSampler: need d >= 1 components");
  if (spec_.grid_size < 2) throw std::invalid_argument("FbmSampler: grid_size < 2");
  if (spec_.beta_hint <= 0.5)
    spec_.beta_hint = std::max(0.5001, spec_.hurst - 0.05);
  times_ = uniform_times(spec_.horizon, spec_.grid_size);
  const std::size_t m = spec_.grid_size - 1;  // nodes 1..m (t = 0 is exact)
  Mat cov(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      cov(i, j) = cov(j, i) = fbm_covariance(times_[i + 1], times_[j + 1], spec_.hurst);
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("FbmSampler: covariance Cholesky failed (grid too fine or H too near 1)");
  chol_ = llt.matrixL();
}

PathGrid FbmSampler::sample(std::uint64_t seed) const {
  const std::size_t m = spec_.grid_size - 1;
  PathGrid y;
  y.times = times_;
  y.comps.resize(static_cast<std::size_t>(spec_.d) + 1);
  y.comps[0] = times_;
  Vec z(m);
  for (int c = 1; c <= spec_.d; ++c) {
    GaussianStream g(seed, static_cast<std::uint64_t>(c));
    for (std::size_t j = 0; j < m; ++j) z(j) = g.next();
    Vec b = chol_ * z;
    GridFn& comp = y.comps[static_cast<std::size_t>(c)];
    comp.resize(m + 1);
    comp[0] = 0.0;
    for (std::size_t j = 0; j < m; ++j) comp[j + 1] = b(j);
  }
  y.beta_hint = spec_.beta_hint;
  return y;
}

PathGrid sample_fbm(const FbmSpec& spec) { return FbmSampler(spec).sample(spec.seed); }

namespace {

// Euclidean distance ||y(t_a) - y(t_b)|| over the selected components.
double node_dist(const PathGrid& y, std::size_t a, std::size_t b, int c0) {
  double s = 0;
  for (int c = c0; c <= y.drives(); ++c) {
    double d = y.comps[static_cast<std::size_t>(c)][a] - y.comps[static_cast<std::size_t>(c)][b];
    s += d * d;
  }
  return std::sqrt(s);
}

double node_norm(const PathGrid& y, std::size_t a, int c0) {
  double s = 0;
  for (int c = c0; c <= y.drives(); ++c) {
    double v = y.comps[static_cast<std::size_t>(c)][a];
    s += v * v;
  }
  return std::sqrt(s);
}

}  // namespace

double holder_sup_norm(const PathGrid& y, double alpha, double t_end, bool include_time) {
  y.validate();
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::domain_error("holder_sup_norm: alpha must lie in (0, 1/2)");
  if (!(t_end > 0.0)) throw std::domain_error("holder_sup_norm: t_end must be positive");
  const double dt = y.dt();
  const int c0 = include_time ? 0 : 1;
  const double beta = y.beta_hint;
  const std::size_t n = y.size();
  double sup = node_norm(y, 0, c0);  // t = 0 term: integral vanishes
  for (std::size_t it = 1; it < n && y.times[it] <= t_end * (1 + 1e-12); ++it) {
    const double t = y.times[it];
    double w = 0.0;
    // interior cells [s_j, s_{j+1}], j = 0..it-2: phi(s) = ||y(t)-y(s)||
    // linear between nodes, kernel (t-s)^{-1-alpha} integrated exactly.
    double phi_lo = node_dist(y, it, 0, c0);
    for (std::size_t j = 0; j + 1 < it; ++j) {
      double phi_hi = node_dist(y, it, j + 1, c0);
      double u_hi = t - y.times[j];      // t - s at the cell's left node
      double u_lo = t - y.times[j + 1];  // at the right node
      // phi(s) = phi_lo + m (s - s_j); in u = t - s: phi = (phi_lo + m u_hi) - m u
      double m = (phi_hi - phi_lo) / dt;
      double a = phi_lo + m * u_hi;
      double b = -m;
      // int (a + b u) u^{-1-alpha} du over [u_lo, u_hi]
      w += a * (std::pow(u_lo, -alpha) - std::pow(u_hi, -alpha)) / alpha +
           b * (std::pow(u_hi, 1 - alpha) - std::pow(u_lo, 1 - alpha)) / (1 - alpha);
      phi_lo = phi_hi;
    }
    // end cell [t-dt, t]: ||y(t)-y(s)|| ~ L (t-s)^beta with L from the
    // adjacent increment; int_0^dt L u^{beta-1-alpha} du = L dt^{beta-alpha}/(beta-alpha)
    double l = node_dist(y, it, it - 1, c0) / std::pow(dt, beta);
    w += l * std::pow(dt, beta - alpha) / (beta - alpha);
    sup = std::max(sup, node_norm(y, it, c0) + w);
  }
  return sup;
}

void write_path_csv(const PathGrid& y, const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("write_path_csv: cannot open " + file);
  out << "t";
  for (int c = 0; c <= y.drives(); ++c) out << ",y" << c;
  out << "\n";
  char buf[32];
  for (std::size_t j = 0; j < y.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", y.times[j]);
    out << buf;
    for (int c = 0; c <= y.drives(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", y.comps[static_cast<std::size_t>(c)][j]);
      out << ',' << buf;
    }
    out << "\n";
  }
}

PathGrid read_path_csv(const std::string& file, double beta_hint) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("read_path_csv: cannot open " + file);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_path_csv: empty file");
  std::size_t ncols = 1;
  for (char ch : line)
    if (ch == ',') ++ncols;
  if (ncols < 3) throw std::runtime_error("read_path_csv: need t,y0,... columns");
  PathGrid y;
  y.comps.resize(ncols - 1);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    y.times.push_back(std::stod(cell));
    for (std::size_t c = 0; c + 1 < ncols; ++c) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("read_path_csv: short row");
      y.comps[c].push_back(std::stod(cell));
    }
  }
  y.beta_hint = beta_hint;
  y.validate();
  return y;
}

}  // namespace htx
