#include "htx/taylor.hpp"

#include <cmath>
#include <stdexcept>

#include "htx/special.hpp"
#include "htx/young.hpp"

namespace htx {

namespace {

void check_word(const Word& word, int d) {
  if (word.empty()) throw std::invalid_argument("word must be nonempty");
  for (int letter : word)
    if (letter < 0 || letter > d)
      throw std::invalid_argument("word letter out of alphabet range");
}

}  // namespace

GridFn iterated_integral(const PathGrid& y, const Word& word) {
  y.validate();
  check_word(word, y.drives());
  GridFn cur(y.size(), 1.0);
  for (int letter : word) cur = young_integral(cur, y.comps[letter]);
  return cur;
}

namespace {

struct LevelDfs {
  const PathGrid* y = nullptr;
  const CoefficientTable* table = nullptr;
  int k_max = 0;
  bool retain = false;
  std::vector<ExpansionLevel>* levels = nullptr;

  void run(Word& word, const GridFn& integral) {
    const int k = static_cast<int>(word.size());
    const Vec& p = table->at(word);
    ExpansionLevel& lvl = (*levels)[k - 1];
    for (std::size_t j = 0; j < integral.size(); ++j) lvl.g[j] += p * integral[j];
    if (retain) lvl.per_word[word] = integral;
    if (k == k_max) return;
    for (int i = 0; i <= table->d; ++i) {
      word.push_back(i);
      GridFn ext = young_integral(integral, y->comps[i]);
      run(word, ext);
      word.pop_back();
    }
  }
};

}  // namespace

std::vector<ExpansionLevel> expansion_levels(const PathGrid& y,
                                             const CoefficientTable& table,
                                             int k_max, bool retain_words) {
  y.validate();
  if (k_max < 1)
    throw std::invalid_argument("expansion_levels: k_max must be >= 1");
  if (k_max > table.k_max)
    throw std::invalid_argument("expansion_levels: table does not cover k_max");
  if (table.d != y.drives())
    throw std::invalid_argument("expansion_levels: table/path drive mismatch");

  std::vector<ExpansionLevel> levels(k_max);
  for (int k = 1; k <= k_max; ++k) {
    levels[k - 1].order = k;
    levels[k - 1].g.assign(y.size(), Vec::Zero(table.n));
  }
  LevelDfs dfs{&y, &table, k_max, retain_words, &levels};
  GridFn ones(y.size(), 1.0);
  Word word;
  for (int i = 0; i <= table.d; ++i) {
    word.push_back(i);
    dfs.run(word, young_integral(ones, y.comps[i]));
    word.pop_back();
  }
  return levels;
}

namespace {

// c <- c * u, both formal series in epsilon truncated at length L.
void poly_mul_trunc(std::vector<double>& c, const std::vector<double>& u,
                    int L) {
  std::vector<double> out(L, 0.0);
  for (int a = 0; a < L; ++a) {
    if (c[a] == 0.0) continue;
    for (int b = 0; a + b < L; ++b) {
      if (u[b] == 0.0) continue;
      out[a + b] += c[a] * u[b];
    }
  }
  c.swap(out);
}

}  // namespace

std::vector<ExpansionLevel> inductive_levels(const JetSystem& sys,
                                             const PathGrid& y, int k_max) {
  sys.validate();
  y.validate();
  if (k_max < 1)
    throw std::invalid_argument("inductive_levels: k_max must be >= 1");
  if (sys.d != y.drives())
    throw std::invalid_argument("inductive_levels: system/path drive mismatch");

  const int n = sys.n;
  const int m = static_cast<int>(y.size());
  JetSpace sp(n, k_max - 1);
  std::vector<std::vector<Jet>> field_jets(sys.d + 1);
  for (int i = 0; i <= sys.d; ++i)
    field_jets[i] = sys.fields[i].jets(sp, sys.x0);

  std::vector<ExpansionLevel> levels(k_max);
  for (int k = 1; k <= k_max; ++k) {
    levels[k - 1].order = k;
    levels[k - 1].g.assign(m, Vec::Zero(n));
  }

  std::vector<std::vector<double>> weight(m);  // per-node monomial weights
  for (int k = 1; k <= k_max; ++k) {
    const int deg = k - 1;
    const int L = deg + 1;
    // weight[t][a] = [eps^deg] prod_l u_l(eps)^{lambda_a(l)} where
    // u_l(eps) = sum_{m<k} eps^m h_m(t)(l); shared across fields/components.
    for (int t = 0; t < m; ++t) {
      weight[t].assign(sp.size(), 0.0);
      std::vector<std::vector<double>> u(n, std::vector<double>(L, 0.0));
      for (int l = 0; l < n; ++l)
        for (int q = 1; q < k; ++q) u[l][q] = levels[q - 1].g[t](l);
      std::vector<double> acc(L);
      for (int a = 0; a < sp.size(); ++a) {
        if (sp.degree(a) > deg) break;
        std::fill(acc.begin(), acc.end(), 0.0);
        acc[0] = 1.0;
        for (int l = 0; l < n; ++l)
          for (int rep = 0; rep < sp.mono(a)[l]; ++rep)
            poly_mul_trunc(acc, u[l], L);
        weight[t][a] = acc[deg];
      }
    }
    GridFn integrand(m);
    for (int comp = 0; comp < n; ++comp) {
      for (int i = 0; i <= sys.d; ++i) {
        const Jet& f = field_jets[i][comp];
        for (int t = 0; t < m; ++t) {
          double s = 0.0;
          for (int a = 0; a < sp.size(); ++a) {
            if (sp.degree(a) > deg) break;
            s += f.c[a] * weight[t][a];
          }
          integrand[t] = s;
        }
        GridFn inc = young_integral(integrand, y.comps[i]);
        for (int t = 0; t < m; ++t) levels[k - 1].g[t](comp) += inc[t];
      }
    }
  }
  return levels;
}

std::vector<Vec> truncated_solution(const std::vector<ExpansionLevel>& levels,
                                    const Vec& x0, int n_trunc) {
  if (n_trunc < 0)
    throw std::invalid_argument("truncated_solution: negative order");
  if (n_trunc > static_cast<int>(levels.size()))
    throw std::invalid_argument("truncated_solution: not enough levels");
  if (levels.empty())
    throw std::invalid_argument("truncated_solution: no levels supplied");
  std::vector<Vec> out(levels[0].g.size(), x0);
  for (int k = 1; k <= n_trunc; ++k)
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += levels[k - 1].g[t];
  return out;
}

void BoundParams::validate() const {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::invalid_argument("BoundParams: alpha must lie in (0, 1/2)");
  if (!(gamma >= 0.0 && 1.0 - 2.0 * alpha - gamma > 0.0))
    throw std::invalid_argument(
        "BoundParams: gamma must lie in [0, 1 - 2 alpha)");
  if (!(m_const > 0.0))
    throw std::invalid_argument("BoundParams: M must be positive");
  if (!(r > 1.0)) throw std::invalid_argument("BoundParams: r must exceed 1");
  if (!(budget > 0.0))
    throw std::invalid_argument("BoundParams: budget must be positive");
  if (d < 1) throw std::invalid_argument("BoundParams: d must be >= 1");
}

TailBound remainder_bound(const BoundParams& params, const PathNorms& norms,
                          int n_trunc, long max_terms) {
  params.validate();
  if (n_trunc < 1)
    throw std::invalid_argument("remainder_bound: n_trunc must be >= 1");
  if (max_terms < 1)
    throw std::invalid_argument("remainder_bound: max_terms must be >= 1");
  if (!(norms.lambda >= 0.0 && norms.c_alpha > 0.0 && norms.holder_sup >= 0.0))
    throw std::invalid_argument("remainder_bound: invalid path norms");

  const double neg_inf = -std::numeric_limits<double>::infinity();
  TailBound out;
  out.log_value = neg_inf;
  out.closed_form_log = neg_inf;
  // Every tail term carries Lambda^{k-1} with k >= 2, and |y| linearly.
  if (norms.lambda == 0.0 || norms.holder_sup == 0.0) return out;

  const double a2 = 1.0 - 2.0 * params.alpha;
  const double log_base = std::log(static_cast<double>(params.d + 1) *
                                   params.m_const);
  const double log_lc = std::log(norms.lambda * norms.c_alpha);
  const double log_y = std::log(norms.holder_sup);
  const double lg_a2 = std::lgamma(a2);

  const auto log_term = [&](long k) {
    const double kk = static_cast<double>(k);
    const double growth =
        params.gamma > 0.0 ? std::lgamma(params.gamma * kk) : 0.0;
    return kk * log_base + growth + (kk - 1.0) * log_lc + log_y + lg_a2 -
           std::lgamma(kk * a2);
  };

  LogSum sum;
  double prev = neg_inf;
  double ratio = std::numeric_limits<double>::infinity();
  bool contracted = false;
  long k = n_trunc + 1;
  for (long used = 0; used < max_terms; ++used, ++k) {
    const double lt = log_term(k);
    sum.add(lt);
    ++out.terms;
    ratio = std::exp(lt - prev);
    prev = lt;
    if (used > 0 && ratio < 1.0) contracted = true;
    if (contracted && lt < sum.log_value() - 700.0) break;
    if (used + 1 == max_terms) {
      if (!contracted || ratio >= 1.0)
        throw std::runtime_error(
            "remainder_bound: tail terms do not contract within the term "
            "horizon; the convergence hypotheses fail at these parameters");
      // Close the remaining tail geometrically so the result stays an upper
      // bound even under an early cutoff.
      sum.add(lt + std::log(ratio / (1.0 - ratio)));
    }
  }
  out.log_value = sum.log_value();
  out.value = sum.value();

  const double bp = a2 - params.gamma;  // 1 - 2 alpha - gamma
  const double x = static_cast<double>(params.d + 1) * params.m_const *
                   norms.lambda * norms.c_alpha;
  double log_closed = log_y + log_base + lg_a2 + std::log(4.0 / bp) + 2.0 +
                      std::log(beta_fn(bp, bp)) + n_trunc * std::log(x) +
                      2.0 * std::pow(x, 1.0 / bp) -
                      std::lgamma(n_trunc * bp);
  if (params.gamma > 0.0) log_closed += std::log(beta_fn(params.gamma, bp));
  out.closed_form_log = log_closed;
  out.closed_form = std::exp(log_closed);
  return out;
}

TcResult detect_tc(const std::vector<ExpansionLevel>& levels,
                   const PathGrid& y, const BoundParams& params,
                   const PathNorms& norms) {
  params.validate();
  y.validate();
  if (levels.empty()) throw std::invalid_argument("detect_tc: no levels");
  const int m = static_cast<int>(y.size());
  for (const auto& lvl : levels)
    if (static_cast<int>(lvl.g.size()) != m)
      throw std::invalid_argument("detect_tc: level/grid size mismatch");

  TcResult res;
  res.time = y.horizon();
  if (std::isinf(params.budget)) return res;

  const int k_max = static_cast<int>(levels.size());
  // r^k scales the k-th tail term exactly like M -> r M does.
  BoundParams folded = params;
  folded.m_const = params.r * params.m_const;
  const double tail = remainder_bound(folded, norms, k_max).value;

  std::vector<double> rk(k_max + 1, 1.0);
  for (int k = 1; k <= k_max; ++k) rk[k] = rk[k - 1] * params.r;
  for (int j = 0; j < m; ++j) {
    double s = tail;
    for (int k = 1; k <= k_max; ++k) s += rk[k] * levels[k - 1].g[j].norm();
    if (s >= params.budget) {
      res.time = y.times[j];
      res.node = j;
      res.crossed = true;
      return res;
    }
  }
  return res;
}

}  // namespace htx
