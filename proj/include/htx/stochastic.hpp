#pragma once

// Monte Carlo checks of the second-moment inequalities for iterated
// fractional-Brownian integrals (driftless case) and the probabilistic tail
// bound with its Phi_gamma series.

#include <cstdint>
#include <vector>

#include "htx/grid.hpp"
#include "htx/paths.hpp"

namespace htx {

// K^{2m}/m! * t^{2Hm} with alpha_H = H(2H-1) and K^2 = 2/alpha_H; an upper
// bound for E |int_{simplex^m} dB^I|^2 over words of length m.
double l2_bound(int word_length, double t, double hurst);

struct McConfig {
  int replicates = 10000;
  FbmSpec fbm;                   // seed field acts as the seed base
  std::vector<Word> words;       // letters in {1..d}: no drift letter
  double confidence = 0.99;
  int threads = 1;

  void validate() const;
};

struct WordStat {
  Word word;
  int length = 0;
  double empirical = 0.0;      // mean of squared integrals at the horizon
  double ci_halfwidth = 0.0;   // normal-approximation interval half-width
  double bound = 0.0;
  bool pass = false;           // empirical + ci_halfwidth <= bound
};

struct L2Report {
  std::vector<WordStat> stats;
  std::uint64_t seed_base = 0;
  int replicates = 0;
  double confidence = 0.0;
  bool enough_replicates = true;  // false below 100: intervals advisory only
};

// Samples `replicates` paths with seeds seed_base + index, integrates every
// word to the horizon, and compares mean squares against l2_bound.  The
// reduction order is fixed by replicate index, so reports are identical for
// any thread count.
L2Report mc_l2(const McConfig& config);

// sum_k x^k / (k!)^{1/2 - gamma}, for x >= 0 and 0 <= gamma < 1/2.
double phi_gamma(double x, double gamma);

struct ProbTail {
  double value = 0.0;      // direct tail sum_{k>N} base^k/(k!)^{1/2-gamma}
  double displayed = 0.0;  // base^{N+1}/((N+1)!)^{1/2-gamma} * Phi_gamma(base)
};

// Mean-square remainder bound for the driftless fBm expansion truncated at
// order N, with base = d K M t^{2H}; `displayed` carries unit leading
// constant and is a diagnostic, `value` is the tighter primary bound.
ProbTail probabilistic_remainder(int n_trunc, double t, double hurst,
                                 double m_const, double gamma, int d);

}  // namespace htx
