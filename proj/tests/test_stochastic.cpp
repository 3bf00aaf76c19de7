#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "htx/stochastic.hpp"

using namespace htx;

namespace {

McConfig base_config() {
  McConfig cfg;
  cfg.fbm.d = 2;
  cfg.fbm.hurst = 0.75;
  cfg.fbm.horizon = 1.0;
  cfg.fbm.grid_size = 257;
  cfg.fbm.seed = 1000;
  cfg.words = {{1}, {1, 1}, {1, 2}};
  cfg.replicates = 2000;
  return cfg;
}

}  // namespace

TEST_CASE("l2 bound closed forms") {
  // K^2 = 2/(H(2H-1)) = 16/3 at H = 3/4, t = 1
  CHECK(l2_bound(1, 1.0, 0.75) == doctest::Approx(16.0 / 3.0).epsilon(1e-13));
  CHECK(l2_bound(2, 1.0, 0.75) == doctest::Approx(128.0 / 9.0).epsilon(1e-13));
  CHECK(l2_bound(3, 1.0, 0.75) ==
        doctest::Approx(std::pow(16.0 / 3.0, 3) / 6.0).epsilon(1e-13));
  // time scaling t^{2Hm}
  CHECK(l2_bound(2, 0.5, 0.75) ==
        doctest::Approx((128.0 / 9.0) * std::pow(0.5, 3.0)).epsilon(1e-13));
  CHECK_THROWS(l2_bound(0, 1.0, 0.75));
  CHECK_THROWS(l2_bound(1, 1.0, 0.5));
}

TEST_CASE("monte carlo means match the exact second moments") {
  McConfig cfg = base_config();
  L2Report rep = mc_l2(cfg);
  REQUIRE(rep.stats.size() == 3);
  CHECK(rep.enough_replicates);
  // E B_1^2 = 1; Var(B^2) = 2, so 3.5 standard errors is 0.111
  CHECK(std::fabs(rep.stats[0].empirical - 1.0) <= 3.5 * std::sqrt(2.0 / 2000.0));
  // the repeated-letter integral is B^2/2 on the grid exactly:
  // E (B^2/2)^2 = 3/4, Var = (105 - 9)/16 = 6
  CHECK(std::fabs(rep.stats[1].empirical - 0.75) <=
        3.5 * std::sqrt(6.0 / 2000.0));
  for (const WordStat& s : rep.stats) {
    CHECK(s.bound == l2_bound(s.length, 1.0, 0.75));
    CHECK(s.ci_halfwidth > 0.0);
    CHECK(s.pass);  // the moment bounds hold with lots of slack here
  }
}

TEST_CASE("reports are identical for any thread count") {
  McConfig cfg = base_config();
  cfg.replicates = 400;
  cfg.fbm.grid_size = 129;
  cfg.words = {{1}, {2}, {1, 2}, {2, 1}, {1, 1}};
  cfg.threads = 1;
  L2Report a = mc_l2(cfg);
  cfg.threads = 5;
  L2Report b = mc_l2(cfg);
  cfg.threads = 64;  // more threads than work is fine
  L2Report c = mc_l2(cfg);
  REQUIRE(a.stats.size() == b.stats.size());
  for (std::size_t w = 0; w < a.stats.size(); ++w) {
    CHECK(a.stats[w].empirical == b.stats[w].empirical);
    CHECK(a.stats[w].ci_halfwidth == b.stats[w].ci_halfwidth);
    CHECK(a.stats[w].empirical == c.stats[w].empirical);
  }
  // same seed, same everything: rerun is bitwise identical
  cfg.threads = 1;
  L2Report d = mc_l2(cfg);
  for (std::size_t w = 0; w < a.stats.size(); ++w)
    CHECK(a.stats[w].empirical == d.stats[w].empirical);
}

TEST_CASE("few replicates are flagged") {
  McConfig cfg = base_config();
  cfg.replicates = 50;
  cfg.fbm.grid_size = 65;
  L2Report rep = mc_l2(cfg);
  CHECK_FALSE(rep.enough_replicates);
  cfg.replicates = 0;
  CHECK_THROWS(mc_l2(cfg));
  cfg = base_config();
  cfg.words = {{3}};  // letter beyond d
  CHECK_THROWS(mc_l2(cfg));
  cfg = base_config();
  cfg.words = {{0, 1}};  // drift letter has no place in the driftless check
  CHECK_THROWS(mc_l2(cfg));
}

TEST_CASE("phi series against a plain reference sum") {
  CHECK(phi_gamma(0.0, 0.3) == 1.0);
  // sum 1/sqrt(k!), hand-frozen
  CHECK(phi_gamma(1.0, 0.0) == doctest::Approx(3.4695049).epsilon(1e-6));
  for (double gamma : {0.0, 0.25, 0.45}) {
    for (double x : {0.3, 1.0, 5.0}) {
      // terms decay only past k = x^{1/(1/2-gamma)}; skip the pair whose sum
      // exceeds double range (the peak sits past k = 10^13 there)
      if (gamma == 0.45 && x == 5.0) continue;
      double ref = 0.0, term = 1.0;
      for (int k = 1; k < 100000; ++k) {
        ref += term;
        term *= x / std::pow(static_cast<double>(k), 0.5 - gamma);
        if (term < ref * 1e-18) break;
      }
      ref += term;
      CHECK(phi_gamma(x, gamma) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
  // past the double-range horizon the sum is legitimately infinite
  CHECK(std::isinf(phi_gamma(5.0, 0.45)));
  CHECK_THROWS_AS(phi_gamma(1.0, 0.5), std::domain_error);
  CHECK_THROWS(phi_gamma(-1.0, 0.1));
}

TEST_CASE("probabilistic tail: direct sum and displayed majorant") {
  const double hurst = 0.6, t = 0.5, m_const = 1.0;
  const double alpha_h = hurst * (2.0 * hurst - 1.0);
  const double base =
      1.0 * std::sqrt(2.0 / alpha_h) * m_const * std::pow(t, 2.0 * hurst);
  for (int n = 0; n <= 6; ++n) {
    ProbTail tail = probabilistic_remainder(n, t, hurst, m_const, 0.0, 1);
    double ref = 0.0;
    for (int k = n + 1; k < n + 300; ++k)
      ref += std::exp(k * std::log(base) - 0.5 * std::lgamma(k + 1.0));
    CHECK(tail.value == doctest::Approx(ref).epsilon(1e-12));
    CHECK(tail.value <= tail.displayed);
  }
  // the tail decreases in the truncation order
  CHECK(probabilistic_remainder(5, t, hurst, m_const, 0.0, 1).value <
        probabilistic_remainder(4, t, hurst, m_const, 0.0, 1).value);
}

TEST_CASE("probabilistic tail parameter handling") {
  for (double gamma : {0.0, 0.2, 0.45}) {
    ProbTail tail = probabilistic_remainder(3, 0.5, 0.75, 0.7, gamma, 2);
    CHECK(tail.value > 0.0);
    CHECK(tail.value <= tail.displayed);
  }
  ProbTail zero = probabilistic_remainder(3, 0.5, 0.75, 0.0, 0.0, 2);
  CHECK(zero.value == 0.0);
  CHECK(zero.displayed == 0.0);
  CHECK_THROWS_AS(probabilistic_remainder(3, 0.5, 0.5, 1.0, 0.0, 1),
                  std::domain_error);
  CHECK_THROWS_AS(probabilistic_remainder(3, 0.5, 0.75, 1.0, 0.5, 1),
                  std::domain_error);
  CHECK_THROWS(probabilistic_remainder(3, 0.5, 0.75, 1.0, 0.0, 0));
  CHECK_THROWS(probabilistic_remainder(-1, 0.5, 0.75, 1.0, 0.0, 1));
}
