#include "htx/stochastic.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "htx/rng.hpp"
#include "htx/special.hpp"
#include "htx/taylor.hpp"

namespace htx {

double l2_bound(int word_length, double t, double hurst) {
  if (word_length < 1)
    throw std::invalid_argument("l2_bound: word length must be >= 1");
  if (!(t > 0.0)) throw std::invalid_argument("l2_bound: t must be positive");
  if (!(hurst > 0.5 && hurst < 1.0))
    throw std::domain_error("l2_bound: hurst must lie in (1/2, 1)");
  const double alpha_h = hurst * (2.0 * hurst - 1.0);
  const double k2 = 2.0 / alpha_h;
  // log of K^{2m}/m! t^{2Hm}
  const double m = word_length;
  return std::exp(m * std::log(k2) - std::lgamma(m + 1.0) +
                  2.0 * hurst * m * std::log(t));
}

void McConfig::validate() const {
  if (replicates < 1)
    throw std::invalid_argument("McConfig: replicates must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("McConfig: confidence must lie in (0, 1)");
  if (threads < 1) throw std::invalid_argument("McConfig: threads must be >= 1");
  if (words.empty()) throw std::invalid_argument("McConfig: no words given");
  for (const Word& w : words) {
    if (w.empty()) throw std::invalid_argument("McConfig: empty word");
    for (int letter : w)
      if (letter < 1 || letter > fbm.d)
        throw std::invalid_argument(
            "McConfig: word letters must name drive components 1..d");
  }
}

L2Report mc_l2(const McConfig& config) {
  config.validate();
  FbmSampler sampler(config.fbm);
  const int r = config.replicates;
  const int nw = static_cast<int>(config.words.size());

  // One row per word, one slot per replicate: the reduction below walks the
  // slots in index order, so the result cannot depend on the thread split.
  std::vector<std::vector<double>> sq(nw, std::vector<double>(r, 0.0));
  const auto worker = [&](int lo, int hi) {
    for (int rep = lo; rep < hi; ++rep) {
      const PathGrid path =
          sampler.sample(config.fbm.seed + static_cast<std::uint64_t>(rep));
      for (int w = 0; w < nw; ++w) {
        const GridFn integral = iterated_integral(path, config.words[w]);
        sq[w][rep] = integral.back() * integral.back();
      }
    }
  };
  const int n_threads = std::min(config.threads, r);
  if (n_threads <= 1) {
    worker(0, r);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) {
      const int lo = static_cast<int>(static_cast<long long>(i) * r / n_threads);
      const int hi =
          static_cast<int>(static_cast<long long>(i + 1) * r / n_threads);
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  L2Report report;
  report.seed_base = config.fbm.seed;
  report.replicates = r;
  report.confidence = config.confidence;
  report.enough_replicates = r >= 100;
  const double z = normal_quantile(0.5 * (1.0 + config.confidence));
  for (int w = 0; w < nw; ++w) {
    WordStat stat;
    stat.word = config.words[w];
    stat.length = static_cast<int>(config.words[w].size());
    // Compensated two-pass mean/variance keeps the reduction exact enough
    // for tiny mean-squares and is independent of the thread count.
    double s = 0.0, comp = 0.0;
    for (int rep = 0; rep < r; ++rep) {
      const double yv = sq[w][rep] - comp;
      const double tv = s + yv;
      comp = (tv - s) - yv;
      s = tv;
    }
    stat.empirical = s / r;
    double v = 0.0;
    comp = 0.0;
    for (int rep = 0; rep < r; ++rep) {
      const double dv = sq[w][rep] - stat.empirical;
      const double yv = dv * dv - comp;
      const double tv = v + yv;
      comp = (tv - v) - yv;
      v = tv;
    }
    const double var = r > 1 ? v / (r - 1) : 0.0;
    stat.ci_halfwidth = z * std::sqrt(var / r);
    stat.bound = l2_bound(stat.length, sampler.spec().horizon,
                          sampler.spec().hurst);
    stat.pass = stat.empirical + stat.ci_halfwidth <= stat.bound;
    report.stats.push_back(stat);
  }
  return report;
}

double phi_gamma(double x, double gamma) {
  if (!(x >= 0.0)) throw std::invalid_argument("phi_gamma: x must be >= 0");
  if (!(gamma >= 0.0 && gamma < 0.5))
    throw std::domain_error("phi_gamma: gamma must lie in [0, 1/2)");
  if (x == 0.0) return 1.0;
  const double p = 0.5 - gamma;
  const double lx = std::log(x);
  LogSum sum;
  double prev = 0.0;
  for (long k = 0; k < 1000000; ++k) {
    const double lt = k * lx - p * std::lgamma(static_cast<double>(k) + 1.0);
    sum.add(lt);
    if (k > 0 && lt < prev && lt < sum.log_value() - 700.0) break;
    prev = lt;
  }
  return sum.value();
}

ProbTail probabilistic_remainder(int n_trunc, double t, double hurst,
                                 double m_const, double gamma, int d) {
  if (n_trunc < 0)
    throw std::invalid_argument(
        "probabilistic_remainder: n_trunc must be >= 0");
  if (!(t > 0.0))
    throw std::invalid_argument("probabilistic_remainder: t must be positive");
  if (!(hurst > 0.5 && hurst < 1.0))
    throw std::domain_error(
        "probabilistic_remainder: hurst must lie in (1/2, 1)");
  if (!(m_const >= 0.0))
    throw std::invalid_argument("probabilistic_remainder: M must be >= 0");
  if (!(gamma >= 0.0 && gamma < 0.5))
    throw std::domain_error(
        "probabilistic_remainder: gamma must lie in [0, 1/2)");
  if (d < 1)
    throw std::invalid_argument("probabilistic_remainder: d must be >= 1");

  ProbTail out;
  if (m_const == 0.0) return out;
  const double alpha_h = hurst * (2.0 * hurst - 1.0);
  const double kconst = std::sqrt(2.0 / alpha_h);
  const double base = d * kconst * m_const * std::pow(t, 2.0 * hurst);
  const double p = 0.5 - gamma;
  const double lb = std::log(base);

  LogSum sum;
  double prev = std::numeric_limits<double>::infinity();
  for (long k = n_trunc + 1; k < 1000000 + n_trunc; ++k) {
    const double lt = k * lb - p * std::lgamma(static_cast<double>(k) + 1.0);
    sum.add(lt);
    if (lt < prev && lt < sum.log_value() - 700.0) break;
    prev = lt;
  }
  out.value = sum.value();
  out.displayed =
      std::exp((n_trunc + 1) * lb -
               p * std::lgamma(static_cast<double>(n_trunc) + 2.0)) *
      phi_gamma(base, gamma);
  return out;
}

}  // namespace htx
