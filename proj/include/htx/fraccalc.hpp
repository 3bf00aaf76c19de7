#pragma once

#include <vector>

#include "htx/grid.hpp"
#include "htx/paths.hpp"

namespace htx {

struct FracParams {
  double alpha;  // in (0, 1/2)
  double t_end;  // evaluation horizon, 0 < t_end <= grid span
};

// Left fractional integral (1/Gamma(alpha)) int_0^x (x-y)^{alpha-1} f(y) dy
// of a grid function, alpha in (0,1), 0 < x <= span. Product integration:
// f linear between nodes, kernel integrated exactly (x need not be a node).
double left_fractional_integral(const std::vector<double>& times, const GridFn& f,
                                double alpha, double x);

// Right-sided (Weyl) derivative of order 1-alpha on (s, t), evaluated at the
// grid node s, with t a grid node as well:
//   (1/Gamma(alpha)) | g~(s) (t-s)^{alpha-1}
//                      + (1-alpha) int_s^t (g~(s)-g~(y)) (y-s)^{alpha-2} dy |
// where g~ = g - g(t) when compensated, else g. The complex unimodular
// factor of the classical kernel formula is dropped; the magnitude is
// returned. holder_hint feeds the end-cell model of the singular quadrature
// (exponent of the assumed local modulus next to y = s).
double right_weyl_derivative(const std::vector<double>& times, const GridFn& g,
                             double alpha, double t, double s, bool compensated,
                             double holder_hint = 1.0);

// Lambda_alpha(t_end, y): (1/Gamma(1-alpha)) sup over grid pairs s < t of the
// Euclidean norm of the per-component compensated Weyl derivatives. Pairs
// with t - s < 2*dt are covered by the local Holder extrapolation bound
// rather than the kernel quadrature. include_time as in holder_sup_norm.
double lambda_alpha(const PathGrid& y, const FracParams& params, bool include_time = true);

// C_alpha(T) = (1/(alpha(1-alpha)) + T^alpha) (1 + T^alpha) Gamma(1-2alpha) T^{1-2alpha}.
double c_alpha(double horizon, double alpha);

// The three functionals that govern iterated-integral growth and the
// deterministic remainder bound.
struct PathNorms {
  double lambda;      // Lambda_alpha(t_end, y)
  double c_alpha;     // C_alpha(t_end)
  double holder_sup;  // ||y||_{alpha, t_end}
};

PathNorms compute_path_norms(const PathGrid& y, const FracParams& params,
                             bool include_time = true);

}  // namespace htx
