#pragma once

// Lie-group form of the expansion for matrix equations dX = sum_i X A_i dy^i:
// permutation-weighted iterated integrals, right-nested bracket matrices, and
// the exponential of the truncated Lie series.

#include <vector>

#include "htx/grid.hpp"
#include "htx/paths.hpp"

namespace htx {

// Number of positions j in {1..k-1} with sigma(j) > sigma(j+1); sigma is
// given as the 1-based value sequence (sigma(1), ..., sigma(k)).
int descent_count(const std::vector<int>& sigma);

// t -> sum over permutations sigma of {1..k} of
//   (-1)^{e(sigma)} / (k^2 binom(k-1, e(sigma)))
//     * int dy^{i_{sigma(1)}} ... dy^{i_{sigma(k)}},
// i.e. slot m of the iterated integral integrates component i_{sigma(m)}.
// The k! enumeration is refused beyond perm_budget letters.
GridFn magnus_coefficient(const PathGrid& y, const Word& word,
                          int perm_budget = 6);

struct MatrixLieSetup {
  int n = 1;                     // matrices are n x n; start point is I
  std::vector<Mat> generators;   // A_1..A_d

  int drives() const { return static_cast<int>(generators.size()); }
  void validate() const;
};

// Right-nested commutator [A_{i_1}, [A_{i_2}, ..., [A_{i_{k-1}}, A_{i_k}]..]];
// a single letter returns its generator.
Mat lie_bracket_word(const MatrixLieSetup& setup, const Word& word);

struct GroupSolution {
  Mat x;                      // exp(series)
  Mat series;                 // truncated Lie series at the requested time
  double series_norm = 0.0;   // Frobenius norm of the series
  bool within_trust = true;   // false once series_norm exceeds the radius
};

// Exponential of sum_{k<=k_max} sum_{|I|=k} magnus_coefficient(I)(t) *
// bracket(I) over drive letters {1..d}.  Outside the trust radius the
// exponential is still computed but flagged: no convergence guarantee is
// claimed there.
GroupSolution group_solution(const MatrixLieSetup& setup, const PathGrid& y,
                             int k_max, double t, double trust_radius = 5.0,
                             int perm_budget = 6);

// Exact value of sum_{sigma in S_k} 1 / (k^2 binom(k-1, e(sigma))) via the
// descent-count distribution; grows like k! sqrt(k) / 2^k.
double coefficient_magnitude_bound(int k);

}  // namespace htx
