#pragma once

// Truncated multivariate Taylor arithmetic ("jets") and the vector-field
// machinery built on top of it: coefficients x -> (V_{i_1} ... V_{i_k} pi)(x0)
// obtained by repeated directional differentiation of the identity map.

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "htx/grid.hpp"

namespace htx {

// Monomial basis of polynomials in `dim` variables of total degree <= `order`,
// enumerated by degree and lexicographically within each degree.  The
// enumeration of degree <= k monomials is a prefix of the degree <= k+1
// enumeration, so coefficient positions are stable across truncation orders.
class JetSpace {
 public:
  JetSpace(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(monos_.size()); }

  const std::vector<int>& mono(int idx) const { return monos_[idx]; }
  int degree(int idx) const { return degrees_[idx]; }

  // Index of a given exponent vector, or -1 if its degree exceeds the order.
  int index_of(const std::vector<int>& expo) const;
  // Index of mono(a) * mono(b), or -1 if the product degree overflows.
  int mul_index(int a, int b) const;

 private:
  int dim_ = 0;
  int order_ = 0;
  std::vector<std::vector<int>> monos_;
  std::vector<int> degrees_;
  std::map<std::vector<int>, int> index_;
};

// Truncated Taylor coefficient vector relative to a JetSpace basis.
struct Jet {
  const JetSpace* space = nullptr;
  std::vector<double> c;

  Jet() = default;
  explicit Jet(const JetSpace& sp) : space(&sp), c(sp.size(), 0.0) {}

  double value() const { return c.empty() ? 0.0 : c[0]; }
};

Jet jet_const(const JetSpace& sp, double v);
// The affine jet base + h_var (offset coordinate around the expansion point).
Jet jet_var(const JetSpace& sp, int var, double base);

Jet jet_add(const Jet& a, const Jet& b);
Jet jet_sub(const Jet& a, const Jet& b);
Jet jet_neg(const Jet& a);
Jet jet_scale(const Jet& a, double s);
Jet jet_mul(const Jet& a, const Jet& b);
Jet jet_pow(const Jet& a, int p);

// Partial derivative with respect to coordinate `var`; drops the top degree.
Jet jet_derivative(const Jet& a, int var);

// Composition with a univariate analytic function given by the Taylor
// coefficients of f about the constant term of u: series[j] = f^(j)(u0)/j!.
Jet jet_compose(const Jet& u, const std::vector<double>& series);

Jet jet_exp(const Jet& a);
Jet jet_sin(const Jet& a);
Jet jet_cos(const Jet& a);

// A vector field on R^n: pointwise values plus jets of all components around
// an arbitrary expansion point.
struct Field {
  int n = 0;
  std::function<Vec(const Vec&)> value;
  std::function<std::vector<Jet>(const JetSpace&, const Vec&)> jets;
};

Field zero_field(int n);
// x -> A x + b.
Field linear_field(const Mat& A, const Vec& b);

// One monomial c * prod_i x_i^powers[i] of a polynomial component.
struct PolyTerm {
  double coeff = 0.0;
  std::vector<int> powers;
};
// Component j is the sum of the terms in comps[j].
Field polynomial_field(int n, std::vector<std::vector<PolyTerm>> comps);

// Right-invariant field X -> X A on m-by-m matrices; the state vector stores
// X row-major, so n = m*m.
Field right_translation_field(const Mat& A);

// Controlled system dx = sum_i V_i(x) dy^i with V_0 driven by the time
// coordinate.  `fields` has d+1 entries.
struct JetSystem {
  int n = 1;
  int d = 1;
  std::vector<Field> fields;
  Vec x0;
  // Radius of the ball around x0 on which the growth certificate is claimed.
  double radius = std::numeric_limits<double>::infinity();

  void validate() const;
  Vec value(int i, const Vec& x) const { return fields[i].value(x); }
};

// The word coefficient (V_{i_1} ... V_{i_k} pi)(x0), with V_{i_k} acting
// first (innermost) on the identity map pi.
Vec coefficient(const JetSystem& sys, const Word& word);

struct CoefficientTable {
  int n = 0;
  int d = 0;
  int k_max = 0;
  std::map<Word, Vec> entries;

  const Vec& at(const Word& w) const;
};

// All coefficients for words of length 1..k_max over letters {0,...,d}.
CoefficientTable build_table(const JetSystem& sys, int k_max);

// Fit of the growth model |P_I| <= M^{|I|} Gamma(gamma |I|) to a table;
// the gamma = 0 factor is read as 1 (factorial-free growth).
struct GrowthFit {
  double gamma = 0.0;
  double m_const = 0.0;
  bool admissible = false;
  // Per-order slack log(M^k Gamma(gamma k)) - max_{|I|=k} log |P_I|.
  std::vector<double> residuals;
};

GrowthFit fit_growth(const CoefficientTable& table,
                     const std::vector<double>& gamma_grid);

}  // namespace htx
