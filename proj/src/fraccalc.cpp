#include "htx/fraccalc.hpp"

#include <cmath>
#include <stdexcept>

#include "htx/special.hpp"

namespace htx {

double left_fractional_integral(const std::vector<double>& times, const GridFn& f,
                                double alpha, double x) {
  if (times.size() < 2 || f.size() != times.size())
    throw std::invalid_argument("left_fractional_integral: grid mismatch");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("left_fractional_integral: alpha must lie in (0,1)");
  if (!(x > times.front() && x <= times.back() * (1 + 1e-12)))
    throw std::domain_error("left_fractional_integral: x outside grid span");
  const double dt = times[1] - times[0];
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < times.size() && times[j] < x; ++j) {
    double top = std::min(times[j + 1], x);
    double m = (f[j + 1] - f[j]) / dt;  // slope of the linear model on the cell
    double u_hi = x - times[j];
    double u_lo = x - top;
    // f(y) = f_j + m (y - y_j); in u = x - y: f = (f_j + m u_hi) - m u
    double a = f[j] + m * u_hi;
    double b = -m;
    acc += a * (std::pow(u_hi, alpha) - std::pow(u_lo, alpha)) / alpha +
           b * (std::pow(u_hi, alpha + 1) - std::pow(u_lo, alpha + 1)) / (alpha + 1);
  }
  return acc / gamma_pos(alpha);
}

namespace {

// int_{u_lo}^{u_hi} (a + b u) u^{alpha-2} du, 0 < u_lo < u_hi.
inline double kernel_cell(double a, double b, double u_lo, double u_hi, double alpha) {
  return a * (std::pow(u_hi, alpha - 1) - std::pow(u_lo, alpha - 1)) / (alpha - 1) +
         b * (std::pow(u_hi, alpha) - std::pow(u_lo, alpha)) / alpha;
}

// End-cell exponent: the Holder model needs alpha + beta > 1 to converge;
// otherwise fall back to the linear (beta = 1) model.
inline double end_cell_exponent(double alpha, double hint) {
  return (alpha + hint > 1.0 + 1e-9) ? hint : 1.0;
}

}  // namespace

double right_weyl_derivative(const std::vector<double>& times, const GridFn& g,
                             double alpha, double t, double s, bool compensated,
                             double holder_hint) {
  if (times.size() < 2 || g.size() != times.size())
    throw std::invalid_argument("right_weyl_derivative: grid mismatch");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("right_weyl_derivative: alpha must lie in (0,1)");
  std::size_t is = node_index(times, s);
  std::size_t it = node_index(times, t);
  if (is >= it) throw std::domain_error("right_weyl_derivative: need s < t");
  const double dt = times[1] - times[0];
  const double ts = t - s;
  const double shift = compensated ? g[it] : 0.0;
  // first term: g~(s) (t-s)^{alpha-1}
  double value = (g[is] - shift) * std::pow(ts, alpha - 1);
  // kernel integral of psi(y) = g(s) - g(y) (the shift cancels inside)
  double be = end_cell_exponent(alpha, holder_hint);
  double acc = (g[is] - g[is + 1]) / std::pow(dt, be) *
               std::pow(dt, be + alpha - 1) / (be + alpha - 1);
  for (std::size_t j = is + 1; j < it; ++j) {
    double psi_lo = g[is] - g[j];
    double psi_hi = g[is] - g[j + 1];
    double u_lo = times[j] - s;
    double u_hi = times[j + 1] - s;
    double m = (psi_hi - psi_lo) / dt;
    acc += kernel_cell(psi_lo - m * u_lo, m, u_lo, u_hi, alpha);
  }
  value += (1 - alpha) * acc;
  return std::abs(value) / gamma_pos(alpha);
}

double lambda_alpha(const PathGrid& y, const FracParams& params, bool include_time) {
  y.validate();
  const double alpha = params.alpha;
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::domain_error("lambda_alpha: alpha must lie in (0, 1/2)");
  if (!(params.t_end > 0.0 && params.t_end <= y.horizon() * (1 + 1e-12)))
    throw std::domain_error("lambda_alpha: t_end outside grid span");
  const double dt = y.dt();
  const int c0 = include_time ? 0 : 1;
  const int cn = y.drives();
  const double be = end_cell_exponent(alpha, y.beta_hint);
  const double holder_factor = 1.0 + (1 - alpha) / (be + alpha - 1);
  const std::size_t n = y.size();
  std::vector<double> acc(static_cast<std::size_t>(cn - c0 + 1));
  double sup = 0.0;
  for (std::size_t is = 0; is + 1 < n; ++is) {
    if (y.times[is + 1] > params.t_end * (1 + 1e-12)) break;
    // adjacent pair t = s + dt: local Holder extrapolation instead of quadrature
    double inc2 = 0.0;
    for (int c = c0; c <= cn; ++c) {
      double d = y.comps[static_cast<std::size_t>(c)][is + 1] -
                 y.comps[static_cast<std::size_t>(c)][is];
      inc2 += d * d;
    }
    sup = std::max(sup, std::sqrt(inc2) / std::pow(dt, be) *
                            std::pow(dt, be + alpha - 1) * holder_factor);
    // end-cell contribution of the kernel integral, fixed per s
    for (int c = c0; c <= cn; ++c) {
      const GridFn& g = y.comps[static_cast<std::size_t>(c)];
      acc[static_cast<std::size_t>(c - c0)] =
          (g[is] - g[is + 1]) / std::pow(dt, be) * std::pow(dt, be + alpha - 1) / (be + alpha - 1);
    }
    for (std::size_t it = is + 2; it < n; ++it) {
      if (y.times[it] > params.t_end * (1 + 1e-12)) break;
      const double ts = y.times[it] - y.times[is];
      double norm2 = 0.0;
      for (int c = c0; c <= cn; ++c) {
        const GridFn& g = y.comps[static_cast<std::size_t>(c)];
        // extend the kernel integral by the cell [t-dt, t]
        double psi_lo = g[is] - g[it - 1];
        double psi_hi = g[is] - g[it];
        double u_lo = y.times[it - 1] - y.times[is];
        double u_hi = ts;
        double m = (psi_hi - psi_lo) / dt;
        double& a = acc[static_cast<std::size_t>(c - c0)];
        a += kernel_cell(psi_lo - m * u_lo, m, u_lo, u_hi, alpha);
        double bracket = (g[is] - g[it]) * std::pow(ts, alpha - 1) + (1 - alpha) * a;
        norm2 += bracket * bracket;
      }
      sup = std::max(sup, std::sqrt(norm2));
    }
  }
  return sup / (gamma_pos(alpha) * gamma_pos(1 - alpha));
}

double c_alpha(double horizon, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::domain_error("c_alpha: alpha must lie in (0, 1/2)");
  if (!(horizon > 0.0)) throw std::domain_error("c_alpha: horizon must be positive");
  double ta = std::pow(horizon, alpha);
  return (1.0 / (alpha * (1 - alpha)) + ta) * (1 + ta) * gamma_pos(1 - 2 * alpha) *
         std::pow(horizon, 1 - 2 * alpha);
}

PathNorms compute_path_norms(const PathGrid& y, const FracParams& params, bool include_time) {
  return PathNorms{lambda_alpha(y, params, include_time),
                   c_alpha(params.t_end, params.alpha),
                   holder_sup_norm(y, params.alpha, params.t_end, include_time)};
}

}  // namespace htx
