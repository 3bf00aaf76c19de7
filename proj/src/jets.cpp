#include "htx/jets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "htx/special.hpp"

namespace htx {

namespace {

void gen_monos(int dim, int pos, int remaining, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
  if (pos == dim - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur[pos] = e;
    gen_monos(dim, pos + 1, remaining - e, cur, out);
  }
}

}  // namespace

JetSpace::JetSpace(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1) throw std::invalid_argument("JetSpace: dim must be >= 1");
  if (order < 0) throw std::invalid_argument("JetSpace: order must be >= 0");
  std::vector<int> cur(dim, 0);
  for (int deg = 0; deg <= order; ++deg) {
    gen_monos(dim, 0, deg, cur, monos_);
  }
  degrees_.resize(monos_.size());
  for (std::size_t i = 0; i < monos_.size(); ++i) {
    int s = 0;
    for (int e : monos_[i]) s += e;
    degrees_[i] = s;
    index_[monos_[i]] = static_cast<int>(i);
  }
}

int JetSpace::index_of(const std::vector<int>& expo) const {
  auto it = index_.find(expo);
  return it == index_.end() ? -1 : it->second;
}

int JetSpace::mul_index(int a, int b) const {
  if (degrees_[a] + degrees_[b] > order_) return -1;
  std::vector<int> expo(dim_);
  for (int i = 0; i < dim_; ++i) expo[i] = monos_[a][i] + monos_[b][i];
  return index_of(expo);
}

namespace {

void check_same_space(const Jet& a, const Jet& b) {
  if (a.space == nullptr || a.space != b.space)
    throw std::invalid_argument("jet arithmetic: operands from different spaces");
}

}  // namespace

Jet jet_const(const JetSpace& sp, double v) {
  Jet r(sp);
  r.c[0] = v;
  return r;
}

Jet jet_var(const JetSpace& sp, int var, double base) {
  if (var < 0 || var >= sp.dim())
    throw std::invalid_argument("jet_var: variable index out of range");
  Jet r(sp);
  r.c[0] = base;
  if (sp.order() >= 1) {
    std::vector<int> expo(sp.dim(), 0);
    expo[var] = 1;
    r.c[sp.index_of(expo)] = 1.0;
  }
  return r;
}

Jet jet_add(const Jet& a, const Jet& b) {
  check_same_space(a, b);
  Jet r = a;
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
  return r;
}

Jet jet_sub(const Jet& a, const Jet& b) {
  check_same_space(a, b);
  Jet r = a;
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i];
  return r;
}

Jet jet_neg(const Jet& a) {
  Jet r = a;
  for (double& v : r.c) v = -v;
  return r;
}

Jet jet_scale(const Jet& a, double s) {
  Jet r = a;
  for (double& v : r.c) v *= s;
  return r;
}

Jet jet_mul(const Jet& a, const Jet& b) {
  check_same_space(a, b);
  const JetSpace& sp = *a.space;
  Jet r(sp);
  const int n = sp.size();
  // For a fixed target monomial the factor pairs are visited in ascending
  // first-factor index, which keeps the accumulation order independent of
  // the truncation order of the ambient space.
  for (int i = 0; i < n; ++i) {
    if (a.c[i] == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (sp.degree(i) + sp.degree(j) > sp.order()) break;
      if (b.c[j] == 0.0) continue;
      const int t = sp.mul_index(i, j);
      r.c[t] += a.c[i] * b.c[j];
    }
  }
  return r;
}

Jet jet_pow(const Jet& a, int p) {
  if (p < 0) throw std::invalid_argument("jet_pow: negative exponent");
  if (a.space == nullptr) throw std::invalid_argument("jet_pow: empty jet");
  if (p == 0) return jet_const(*a.space, 1.0);
  Jet r = a;
  for (int i = 2; i <= p; ++i) r = jet_mul(r, a);
  return r;
}

Jet jet_derivative(const Jet& a, int var) {
  const JetSpace& sp = *a.space;
  if (var < 0 || var >= sp.dim())
    throw std::invalid_argument("jet_derivative: variable index out of range");
  Jet r(sp);
  std::vector<int> expo(sp.dim());
  for (int i = 0; i < sp.size(); ++i) {
    const int e = sp.mono(i)[var];
    if (e == 0 || a.c[i] == 0.0) continue;
    expo = sp.mono(i);
    expo[var] -= 1;
    r.c[sp.index_of(expo)] += static_cast<double>(e) * a.c[i];
  }
  return r;
}

Jet jet_compose(const Jet& u, const std::vector<double>& series) {
  const JetSpace& sp = *u.space;
  if (series.empty()) return jet_const(sp, 0.0);
  Jet w = u;
  w.c[0] = 0.0;
  Jet r = jet_const(sp, series.back());
  for (int j = static_cast<int>(series.size()) - 2; j >= 0; --j) {
    r = jet_add(jet_mul(r, w), jet_const(sp, series[j]));
  }
  return r;
}

Jet jet_exp(const Jet& a) {
  const JetSpace& sp = *a.space;
  std::vector<double> series(sp.order() + 1);
  series[0] = std::exp(a.value());
  for (int j = 1; j <= sp.order(); ++j) series[j] = series[j - 1] / j;
  return jet_compose(a, series);
}

Jet jet_sin(const Jet& a) {
  const JetSpace& sp = *a.space;
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {s, c, -s, -c};
  std::vector<double> series(sp.order() + 1);
  double fact = 1.0;
  for (int j = 0; j <= sp.order(); ++j) {
    if (j > 0) fact *= j;
    series[j] = cycle[j % 4] / fact;
  }
  return jet_compose(a, series);
}

Jet jet_cos(const Jet& a) {
  const JetSpace& sp = *a.space;
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {c, -s, -c, s};
  std::vector<double> series(sp.order() + 1);
  double fact = 1.0;
  for (int j = 0; j <= sp.order(); ++j) {
    if (j > 0) fact *= j;
    series[j] = cycle[j % 4] / fact;
  }
  return jet_compose(a, series);
}

Field zero_field(int n) {
  Field f;
  f.n = n;
  f.value = [n](const Vec&) { return Vec(Vec::Zero(n)); };
  f.jets = [n](const JetSpace& sp, const Vec&) {
    return std::vector<Jet>(n, jet_const(sp, 0.0));
  };
  return f;
}

Field linear_field(const Mat& A, const Vec& b) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || b.size() != n)
    throw std::invalid_argument("linear_field: A must be square and match b");
  Field f;
  f.n = n;
  f.value = [A, b](const Vec& x) { return Vec(A * x + b); };
  f.jets = [A, b, n](const JetSpace& sp, const Vec& base) {
    std::vector<Jet> out;
    out.reserve(n);
    for (int j = 0; j < n; ++j) {
      Jet g = jet_const(sp, b(j));
      for (int l = 0; l < n; ++l) {
        if (A(j, l) == 0.0) continue;
        g = jet_add(g, jet_scale(jet_var(sp, l, base(l)), A(j, l)));
      }
      out.push_back(g);
    }
    return out;
  };
  return f;
}

Field polynomial_field(int n, std::vector<std::vector<PolyTerm>> comps) {
  if (static_cast<int>(comps.size()) != n)
    throw std::invalid_argument("polynomial_field: one term list per component");
  for (const auto& terms : comps)
    for (const auto& t : terms) {
      if (static_cast<int>(t.powers.size()) != n)
        throw std::invalid_argument("polynomial_field: powers must have length n");
      for (int p : t.powers)
        if (p < 0) throw std::invalid_argument("polynomial_field: negative power");
    }
  Field f;
  f.n = n;
  f.value = [n, comps](const Vec& x) {
    Vec out = Vec::Zero(n);
    for (int j = 0; j < n; ++j) {
      for (const auto& t : comps[j]) {
        double v = t.coeff;
        for (int i = 0; i < n; ++i)
          for (int p = 0; p < t.powers[i]; ++p) v *= x(i);
        out(j) += v;
      }
    }
    return out;
  };
  f.jets = [n, comps](const JetSpace& sp, const Vec& base) {
    std::vector<Jet> out;
    out.reserve(n);
    for (int j = 0; j < n; ++j) {
      Jet g = jet_const(sp, 0.0);
      for (const auto& t : comps[j]) {
        Jet term = jet_const(sp, t.coeff);
        for (int i = 0; i < n; ++i) {
          if (t.powers[i] == 0) continue;
          term = jet_mul(term, jet_pow(jet_var(sp, i, base(i)), t.powers[i]));
        }
        g = jet_add(g, term);
      }
      out.push_back(g);
    }
    return out;
  };
  return f;
}

Field right_translation_field(const Mat& A) {
  const int m = static_cast<int>(A.rows());
  if (A.cols() != m)
    throw std::invalid_argument("right_translation_field: A must be square");
  const int n = m * m;
  Field f;
  f.n = n;
  f.value = [A, m, n](const Vec& x) {
    Mat X(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) X(r, c) = x(r * m + c);
    Mat P = X * A;
    Vec out(n);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) out(r * m + c) = P(r, c);
    return out;
  };
  f.jets = [A, m, n](const JetSpace& sp, const Vec& base) {
    std::vector<Jet> out;
    out.reserve(n);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) {
        Jet g = jet_const(sp, 0.0);
        for (int k = 0; k < m; ++k) {
          if (A(k, c) == 0.0) continue;
          g = jet_add(g, jet_scale(jet_var(sp, r * m + k, base(r * m + k)),
                                   A(k, c)));
        }
        out.push_back(g);
      }
    return out;
  };
  return f;
}

void JetSystem::validate() const {
  if (n < 1) throw std::invalid_argument("JetSystem: n must be >= 1");
  if (d < 1) throw std::invalid_argument("JetSystem: d must be >= 1");
  if (static_cast<int>(fields.size()) != d + 1)
    throw std::invalid_argument("JetSystem: need d+1 fields (drift + drives)");
  for (const Field& f : fields)
    if (f.n != n)
      throw std::invalid_argument("JetSystem: field dimension mismatch");
  if (x0.size() != n)
    throw std::invalid_argument("JetSystem: x0 dimension mismatch");
  if (!(radius > 0.0))
    throw std::invalid_argument("JetSystem: radius must be positive");
}

namespace {

// (V G)_j = sum_l V^l d_l G_j; one truncation order is lost per application.
std::vector<Jet> apply_field(const std::vector<Jet>& field,
                             const std::vector<Jet>& g) {
  const int n = static_cast<int>(g.size());
  std::vector<Jet> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    Jet acc = jet_const(*g[j].space, 0.0);
    for (int l = 0; l < n; ++l) {
      acc = jet_add(acc, jet_mul(field[l], jet_derivative(g[j], l)));
    }
    out.push_back(acc);
  }
  return out;
}

std::vector<Jet> identity_jets(const JetSpace& sp, const Vec& x0) {
  std::vector<Jet> out;
  out.reserve(x0.size());
  for (int j = 0; j < x0.size(); ++j) out.push_back(jet_var(sp, j, x0(j)));
  return out;
}

Vec jet_values(const std::vector<Jet>& g) {
  Vec v(static_cast<int>(g.size()));
  for (std::size_t j = 0; j < g.size(); ++j) v(static_cast<int>(j)) =
      g[j].value();
  return v;
}

}  // namespace

Vec coefficient(const JetSystem& sys, const Word& word) {
  sys.validate();
  if (word.empty()) return sys.x0;
  for (int letter : word)
    if (letter < 0 || letter > sys.d)
      throw std::invalid_argument("coefficient: letter out of range");
  const int k = static_cast<int>(word.size());
  JetSpace sp(sys.n, std::max(1, k - 1));
  std::vector<std::vector<Jet>> field_jets(sys.d + 1);
  std::vector<Jet> g = identity_jets(sp, sys.x0);
  // V_{i_k} acts first on the identity, so walk the word right to left.
  for (int m = k - 1; m >= 0; --m) {
    const int i = word[m];
    if (field_jets[i].empty()) field_jets[i] = sys.fields[i].jets(sp, sys.x0);
    g = apply_field(field_jets[i], g);
  }
  return jet_values(g);
}

const Vec& CoefficientTable::at(const Word& w) const {
  auto it = entries.find(w);
  if (it == entries.end())
    throw std::out_of_range("CoefficientTable: word not present");
  return it->second;
}

namespace {

void table_dfs(const std::vector<std::vector<Jet>>& field_jets, int d,
               int k_max, Word& word, const std::vector<Jet>& g,
               std::map<Word, Vec>& entries) {
  if (!word.empty()) entries[word] = jet_values(g);
  if (static_cast<int>(word.size()) == k_max) return;
  for (int i = 0; i <= d; ++i) {
    // Prepending a letter applies its field after everything already there,
    // so all words sharing a suffix share the inner computation.
    word.insert(word.begin(), i);
    table_dfs(field_jets, d, k_max, word, apply_field(field_jets[i], g),
              entries);
    word.erase(word.begin());
  }
}

}  // namespace

CoefficientTable build_table(const JetSystem& sys, int k_max) {
  sys.validate();
  if (k_max < 1) throw std::invalid_argument("build_table: k_max must be >= 1");
  CoefficientTable table;
  table.n = sys.n;
  table.d = sys.d;
  table.k_max = k_max;
  JetSpace sp(sys.n, std::max(1, k_max - 1));
  std::vector<std::vector<Jet>> field_jets(sys.d + 1);
  for (int i = 0; i <= sys.d; ++i) field_jets[i] = sys.fields[i].jets(sp, sys.x0);
  Word word;
  table_dfs(field_jets, sys.d, k_max, word, identity_jets(sp, sys.x0),
            table.entries);
  return table;
}

GrowthFit fit_growth(const CoefficientTable& table,
                     const std::vector<double>& gamma_grid) {
  if (gamma_grid.empty())
    throw std::invalid_argument("fit_growth: empty gamma grid");
  const double neg_inf = -std::numeric_limits<double>::infinity();
  // Largest coefficient log-norm per word length.
  std::vector<double> peak(table.k_max + 1, neg_inf);
  for (const auto& [w, p] : table.entries) {
    const int k = static_cast<int>(w.size());
    const double nrm = p.norm();
    if (nrm > 0.0) peak[k] = std::max(peak[k], std::log(nrm));
  }

  const auto log_gamma_factor = [](double gamma, int k) {
    // log Gamma(gamma k), with the gamma = 0 factor read as 1.
    return gamma <= 0.0 ? 0.0 : std::lgamma(gamma * k);
  };

  GrowthFit best;
  double best_score = std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (double gamma : gamma_grid) {
    if (gamma < 0.0)
      throw std::invalid_argument("fit_growth: gamma must be >= 0");
    double log_m = neg_inf;
    for (int k = 1; k <= table.k_max; ++k) {
      if (peak[k] == neg_inf) continue;
      log_m = std::max(log_m, (peak[k] - log_gamma_factor(gamma, k)) / k);
    }
    // Predicted log-size of an order-8 coefficient under this model; the
    // flattest extrapolation wins, ties go to the smaller gamma.
    const double score =
        log_m == neg_inf ? neg_inf : log_gamma_factor(gamma, 8) + 8.0 * log_m;
    if (!have_best || score < best_score - 1e-12) {
      have_best = true;
      best_score = score;
      best.gamma = gamma;
      best.m_const = log_m == neg_inf ? 0.0 : std::exp(log_m);
    }
  }

  const double log_m_best =
      best.m_const > 0.0 ? std::log(best.m_const) : neg_inf;
  best.residuals.assign(table.k_max, 0.0);
  // Smallest log M that would cover each order on its own.
  std::vector<double> need(table.k_max + 1, neg_inf);
  for (int k = 1; k <= table.k_max; ++k) {
    const double model = k * log_m_best + log_gamma_factor(best.gamma, k);
    need[k] = peak[k] == neg_inf
                  ? neg_inf
                  : (peak[k] - log_gamma_factor(best.gamma, k)) / k;
    best.residuals[k - 1] =
        peak[k] == neg_inf ? std::numeric_limits<double>::infinity()
                           : model - peak[k];
  }
  bool tail_ok = table.k_max >= 3;
  for (int k = table.k_max - 2; k <= table.k_max - 1 && tail_ok; ++k) {
    // Demand the per-order requirement stop growing over the last three
    // orders; blow-up there means the model underestimates the true growth.
    if (need[k + 1] > need[k] + 1e-9) tail_ok = false;
  }
  best.admissible = tail_ok;
  return best;
}

}  // namespace htx
