#include "htx/magnus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "htx/taylor.hpp"

namespace htx {

int descent_count(const std::vector<int>& sigma) {
  const int k = static_cast<int>(sigma.size());
  if (k < 1) throw std::invalid_argument("descent_count: empty permutation");
  std::vector<bool> seen(k, false);
  for (int v : sigma) {
    if (v < 1 || v > k || seen[v - 1])
      throw std::invalid_argument("descent_count: not a permutation of 1..k");
    seen[v - 1] = true;
  }
  int e = 0;
  for (int j = 0; j + 1 < k; ++j)
    if (sigma[j] > sigma[j + 1]) ++e;
  return e;
}

namespace {

std::uint64_t binom_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Adds the permutation-weighted integrals of `word` into out, memoizing the
// plain iterated integrals by permuted word (repeated letters collapse many
// of the k! terms onto few distinct words).
void accumulate_magnus(const PathGrid& y, const Word& word,
                       std::map<Word, GridFn>& memo, GridFn& out) {
  const int k = static_cast<int>(word.size());
  std::vector<int> sigma(k);
  std::iota(sigma.begin(), sigma.end(), 1);
  const double k2 = static_cast<double>(k) * k;
  Word permuted(k);
  do {
    const int e = descent_count(sigma);
    const double w =
        ((e % 2 == 0) ? 1.0 : -1.0) /
        (k2 * static_cast<double>(binom_u64(k - 1, e)));
    for (int m = 0; m < k; ++m) permuted[m] = word[sigma[m] - 1];
    auto it = memo.find(permuted);
    if (it == memo.end())
      it = memo.emplace(permuted, iterated_integral(y, permuted)).first;
    const GridFn& integral = it->second;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += w * integral[j];
  } while (std::next_permutation(sigma.begin(), sigma.end()));
}

}  // namespace

GridFn magnus_coefficient(const PathGrid& y, const Word& word,
                          int perm_budget) {
  y.validate();
  if (word.empty())
    throw std::invalid_argument("magnus_coefficient: empty word");
  if (static_cast<int>(word.size()) > perm_budget)
    throw std::invalid_argument(
        "magnus_coefficient: word length exceeds the permutation budget");
  for (int letter : word)
    if (letter < 0 || letter > y.drives())
      throw std::invalid_argument("magnus_coefficient: letter out of range");
  std::map<Word, GridFn> memo;
  GridFn out(y.size(), 0.0);
  accumulate_magnus(y, word, memo, out);
  return out;
}

void MatrixLieSetup::validate() const {
  if (n < 1) throw std::invalid_argument("MatrixLieSetup: n must be >= 1");
  if (generators.empty())
    throw std::invalid_argument("MatrixLieSetup: need at least one generator");
  for (const Mat& a : generators) {
    if (a.rows() != n || a.cols() != n)
      throw std::invalid_argument("MatrixLieSetup: generator size mismatch");
    if (!a.allFinite())
      throw std::invalid_argument("MatrixLieSetup: non-finite generator");
  }
}

Mat lie_bracket_word(const MatrixLieSetup& setup, const Word& word) {
  setup.validate();
  if (word.empty())
    throw std::invalid_argument("lie_bracket_word: empty word");
  for (int letter : word)
    if (letter < 1 || letter > setup.drives())
      throw std::invalid_argument("lie_bracket_word: letter out of range");
  Mat b = setup.generators[word.back() - 1];
  for (int m = static_cast<int>(word.size()) - 2; m >= 0; --m) {
    const Mat& a = setup.generators[word[m] - 1];
    b = a * b - b * a;
  }
  return b;
}

namespace {

void series_words(const MatrixLieSetup& setup, const PathGrid& y, int node,
                  int k_max, Word& word, std::map<Word, GridFn>& memo,
                  Mat& series) {
  if (!word.empty()) {
    GridFn lam(y.size(), 0.0);
    accumulate_magnus(y, word, memo, lam);
    if (lam[node] != 0.0) series += lam[node] * lie_bracket_word(setup, word);
  }
  if (static_cast<int>(word.size()) == k_max) return;
  for (int i = 1; i <= setup.drives(); ++i) {
    word.push_back(i);
    series_words(setup, y, node, k_max, word, memo, series);
    word.pop_back();
  }
}

}  // namespace

GroupSolution group_solution(const MatrixLieSetup& setup, const PathGrid& y,
                             int k_max, double t, double trust_radius,
                             int perm_budget) {
  setup.validate();
  y.validate();
  if (k_max < 1)
    throw std::invalid_argument("group_solution: k_max must be >= 1");
  if (k_max > perm_budget)
    throw std::invalid_argument(
        "group_solution: k_max exceeds the permutation budget");
  if (setup.drives() > y.drives())
    throw std::invalid_argument("group_solution: path has too few components");
  const int node = node_index(y.times, t);
  if (node < 0)
    throw std::invalid_argument("group_solution: t is not a grid node");

  GroupSolution out;
  out.series = Mat::Zero(setup.n, setup.n);
  std::map<Word, GridFn> memo;
  Word word;
  series_words(setup, y, node, k_max, word, memo, out.series);
  out.series_norm = out.series.norm();
  out.within_trust = out.series_norm <= trust_radius;
  out.x = out.series.exp();
  return out;
}

double coefficient_magnitude_bound(int k) {
  if (k < 1)
    throw std::invalid_argument("coefficient_magnitude_bound: k must be >= 1");
  if (k > 20)
    throw std::invalid_argument(
        "coefficient_magnitude_bound: exact descent counts overflow past 20");
  // eul[j] = number of permutations of {1..k} with j descents.
  std::vector<std::uint64_t> eul(1, 1);
  for (int m = 2; m <= k; ++m) {
    std::vector<std::uint64_t> next(m, 0);
    for (int j = 0; j < m; ++j) {
      const std::uint64_t a = j < static_cast<int>(eul.size())
                                  ? eul[j] * (j + 1)
                                  : 0;
      const std::uint64_t b = (j >= 1 && j - 1 < static_cast<int>(eul.size()))
                                  ? eul[j - 1] * (m - j)
                                  : 0;
      next[j] = a + b;
    }
    eul.swap(next);
  }
  double s = 0.0;
  const double k2 = static_cast<double>(k) * k;
  for (int j = 0; j < k; ++j) {
    if (eul[j] == 0) continue;
    s += static_cast<double>(eul[j]) /
         (k2 * static_cast<double>(binom_u64(k - 1, j)));
  }
  return s;
}

}  // namespace htx
