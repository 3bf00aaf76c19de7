#pragma once

// Iterated path integrals over the simplex, the expansion levels
// g_k(t) = sum_{|I|=k} P_I int dy^I, the equivalent inductive construction
// h_k, truncation, tail bounds, and the first time the weighted level sums
// reach a prescribed budget.

#include <limits>
#include <map>
#include <vector>

#include "htx/fraccalc.hpp"
#include "htx/grid.hpp"
#include "htx/jets.hpp"
#include "htx/paths.hpp"

namespace htx {

struct ExpansionLevel {
  int order = 0;
  std::vector<Vec> g;               // g_k at every grid node
  std::map<Word, GridFn> per_word;  // iterated-integral traces when retained
};

// t -> int over {0 <= t_1 <= ... <= t_k <= t} of dy^{i_1} ... dy^{i_k},
// built one letter at a time: I_{w.i}(t) = int_0^t I_w(s) dy^i(s).
GridFn iterated_integral(const PathGrid& y, const Word& word);

// Levels 1..k_max assembled from the coefficient table; word integrals with a
// shared prefix reuse the same Young recursion.
std::vector<ExpansionLevel> expansion_levels(const PathGrid& y,
                                             const CoefficientTable& table,
                                             int k_max,
                                             bool retain_words = false);

// Same levels built without any word bookkeeping: order k integrates the
// epsilon^(k-1) coefficient of V_i(x0 + sum_m eps^m h_m) against dy^i.
std::vector<ExpansionLevel> inductive_levels(const JetSystem& sys,
                                             const PathGrid& y, int k_max);

// x0 + sum_{k<=n_trunc} g_k(t); n_trunc = 0 gives the constant x0.
std::vector<Vec> truncated_solution(const std::vector<ExpansionLevel>& levels,
                                    const Vec& x0, int n_trunc);

struct BoundParams {
  double alpha = 0.25;   // in (1 - beta, 1/2) for a beta-Holder drive
  double gamma = 0.0;    // coefficient growth exponent, in [0, 1 - 2 alpha)
  double m_const = 1.0;  // coefficient growth scale M
  double r = 2.0;        // weight base for the budget criterion, > 1
  double budget = std::numeric_limits<double>::infinity();  // C, may be inf
  int d = 1;             // number of driving components (letter 0 excluded)

  void validate() const;
};

struct TailBound {
  double value = 0.0;        // direct tail sum (primary, tighter)
  double log_value = 0.0;
  double closed_form = 0.0;  // analytic majorant of the same tail
  double closed_form_log = 0.0;
  long terms = 0;            // tail terms accumulated before cutoff
};

// Upper bound on the distance between the solution and its order-N
// truncation:
//   sum_{k>N} (d+1)^k M^k Gamma(k gamma) Lambda^{k-1} C_alpha^{k-1}
//             * |y| Gamma(1-2 alpha) / Gamma(k (1-2 alpha)),
// summed in log space until terms fall below 1e-300 relative, together with
// the closed-form majorant |y| (d+1) M Gamma(1-2a) B(gamma,b') B(b',b')
// (4 e^2 / b') x^N exp(2 x^{1/b'}) / Gamma(N b') where x = (d+1) M Lambda
// C_alpha and b' = 1 - 2 alpha - gamma.  Throws when the term ratio never
// falls below 1 within max_terms (the hypotheses fail at these parameters).
TailBound remainder_bound(const BoundParams& params, const PathNorms& norms,
                          int n_trunc, long max_terms = 5000000);

struct TcResult {
  double time = 0.0;   // first crossing time, or the grid horizon
  int node = -1;       // grid index of the crossing, -1 when absent
  bool crossed = false;
};

// First grid time where sum_k r^k |g_k(t)| plus the tail bound (with M
// replaced by r M, since r^k scales the k-th term) reaches the budget C.
// An infinite budget short-circuits to the horizon sentinel.  `norms` are
// the horizon path functionals, which dominate their running values.
TcResult detect_tc(const std::vector<ExpansionLevel>& levels,
                   const PathGrid& y, const BoundParams& params,
                   const PathNorms& norms);

}  // namespace htx
