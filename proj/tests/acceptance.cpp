// End-to-end acceptance checks for the expansion toolkit.  Each criterion
// prints exactly one PASS/FAIL line; the process exit code is the number of
// failed criteria.  Tolerances and instance parameters are fixed here and are
// not tuned at runtime.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "htx/cli.hpp"
#include "htx/fraccalc.hpp"
#include "htx/jets.hpp"
#include "htx/magnus.hpp"
#include "htx/paths.hpp"
#include "htx/special.hpp"
#include "htx/stochastic.hpp"
#include "htx/taylor.hpp"
#include "htx/young.hpp"

using namespace htx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void run_criterion(int idx, const char* name, double time_budget_s,
                   const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.ok = false;
    out.note(std::string("exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (time_budget_s > 0.0 && elapsed > time_budget_s) {
    out.ok = false;
    out.note("over time budget " + fmt(time_budget_s) + "s");
  }
  std::printf("%s [%d] %s (%.1fs%s%s)\n", out.ok ? "PASS" : "FAIL", idx, name,
              elapsed, out.detail.empty() ? "" : ": ", out.detail.c_str());
  std::fflush(stdout);
  if (!out.ok) ++g_failures;
}

JetSystem scalar_linear_system(double a, double x0) {
  JetSystem sys;
  sys.n = 1;
  sys.d = 1;
  sys.fields = {zero_field(1),
                linear_field(Mat::Constant(1, 1, a), Vec::Zero(1))};
  sys.x0 = Vec::Constant(1, x0);
  return sys;
}

// Restart of the tail [s, T] as a path in its own right.
PathGrid subpath_from(const PathGrid& y, std::size_t js) {
  const std::size_t m = y.size() - js;
  std::vector<GridFn> drives(y.drives());
  for (int i = 1; i <= y.drives(); ++i) {
    drives[i - 1].resize(m);
    for (std::size_t j = 0; j < m; ++j)
      drives[i - 1][j] = y.comps[i][js + j] - y.comps[i][js];
  }
  return make_path(y.times.back() - y.times[js], m, drives, y.beta_hint);
}

std::vector<Word> words_up_to(int letters_from, int letters_to, int max_len) {
  std::vector<Word> out, frontier{{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const Word& w : frontier)
      for (int a = letters_from; a <= letters_to; ++a) {
        Word e = w;
        e.push_back(a);
        next.push_back(e);
      }
    for (const Word& w : next) out.push_back(w);
    frontier = std::move(next);
  }
  return out;
}

Mat reshape_state(const Vec& v, int m) {
  Mat x(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) x(r, c) = v(r * m + c);
  return x;
}

// Matrix flow dX = sum_i X A_i dy^i integrated by the fixed-point solver on
// the row-major flattening; the reference for the group-form truncation.
Mat picard_group_state(const MatrixLieSetup& setup, const PathGrid& y) {
  JetSystem sys;
  sys.n = setup.n * setup.n;
  sys.d = setup.drives();
  sys.fields.push_back(zero_field(sys.n));
  for (const Mat& a : setup.generators)
    sys.fields.push_back(right_translation_field(a));
  Mat id = Mat::Identity(setup.n, setup.n);
  sys.x0 = Vec(sys.n);
  for (int r = 0; r < setup.n; ++r)
    for (int c = 0; c < setup.n; ++c) sys.x0(r * setup.n + c) = id(r, c);
  PicardConfig pc;
  pc.max_iterations = 120;
  SolverOutput sol = picard_solve(sys, y, pc);
  return reshape_state(sol.trajectory.back(), setup.n);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

void criterion_scalar_flow(Outcome& out) {
  FbmSpec spec;
  spec.d = 1;
  spec.hurst = 0.75;
  spec.horizon = 0.5;
  spec.grid_size = 4096;
  spec.seed = 4242;
  PathGrid y = sample_fbm(spec);
  JetSystem sys = scalar_linear_system(1.0, 1.0);
  const int n_trunc = 12;
  const CoefficientTable table = build_table(sys, n_trunc);
  const auto levels = expansion_levels(y, table, n_trunc);
  const auto trunc = truncated_solution(levels, sys.x0, n_trunc);
  const SolverOutput sol = picard_solve(sys, y, {});
  double err_exact = 0.0, err_solver = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double flow = std::exp(y.comps[1][j] - y.comps[1][0]);
    err_exact = std::max(err_exact, std::abs(trunc[j](0) - flow));
    err_solver = std::max(err_solver, std::abs(trunc[j](0) - sol.trajectory[j](0)));
  }
  out.require(err_exact <= 1e-6,
              "exp-flow error " + fmt(err_exact) + " > 1e-6");
  out.require(err_solver <= 1e-4,
              "solver gap " + fmt(err_solver) + " > 1e-4");
  out.note("exp gap " + fmt(err_exact) + ", solver gap " + fmt(err_solver));
}

void criterion_level_agreement(Outcome& out) {
  FbmSpec spec;
  spec.d = 2;
  spec.hurst = 0.75;
  spec.horizon = 0.5;
  spec.grid_size = 4096;
  spec.seed = 911;
  PathGrid y = sample_fbm(spec);
  JetSystem sys;
  sys.n = 2;
  sys.d = 2;
  sys.fields = {
      zero_field(2),
      polynomial_field(2, {{PolyTerm{0.3, {0, 0}}, PolyTerm{0.15, {0, 1}}},
                           {PolyTerm{-0.2, {1, 0}}}}),
      polynomial_field(2, {{PolyTerm{0.1, {1, 1}}},
                           {PolyTerm{0.25, {0, 0}}, PolyTerm{-0.1, {1, 0}}}})};
  sys.x0 = Vec(2);
  sys.x0 << 0.4, -0.3;
  const int k_max = 4;
  const auto direct = expansion_levels(y, build_table(sys, k_max), k_max);
  const auto inductive = inductive_levels(sys, y, k_max);
  double worst = 0.0;
  for (int k = 0; k < k_max; ++k)
    for (std::size_t j = 0; j < y.size(); ++j)
      worst = std::max(worst,
                       (direct[k].g[j] - inductive[k].g[j]).cwiseAbs().maxCoeff());
  out.require(worst <= 1e-6, "construction gap " + fmt(worst) + " > 1e-6");
  out.note("max gap " + fmt(worst));
}

void criterion_integral_algebra(Outcome& out) {
  FbmSpec spec;
  spec.d = 2;
  spec.hurst = 0.75;
  spec.horizon = 0.5;
  spec.grid_size = 4096;
  spec.seed = 100;
  PathGrid y = sample_fbm(spec);
  const std::size_t m = y.size();

  // repeated letters collapse to powers of the increment
  double worst_pow = 0.0;
  for (int letter : {1, 2}) {
    Word w;
    for (int k = 1; k <= 5; ++k) {
      w.push_back(letter);
      const GridFn ik = iterated_integral(y, w);
      double kfac = 1.0;
      for (int i = 2; i <= k; ++i) kfac *= i;
      for (std::size_t j = 0; j < m; ++j) {
        const double dy = y.comps[letter][j] - y.comps[letter][0];
        worst_pow = std::max(worst_pow,
                             std::abs(ik[j] - std::pow(dy, k) / kfac));
      }
    }
  }
  out.require(worst_pow <= 1e-6, "power identity " + fmt(worst_pow) + " > 1e-6");

  // multiplicative splitting at the midpoint
  const std::size_t js = (m - 1) / 2;
  PathGrid tail = subpath_from(y, js);
  double worst_split = 0.0;
  for (const Word& w : {Word{1, 2}, Word{2, 1}, Word{1, 1, 2}, Word{1, 2, 2, 1}}) {
    const double full = iterated_integral(y, w).back();
    double split = iterated_integral(tail, w).back();  // empty prefix
    for (std::size_t cut = 1; cut < w.size(); ++cut) {
      const Word u(w.begin(), w.begin() + cut), v(w.begin() + cut, w.end());
      split += iterated_integral(y, u)[js] * iterated_integral(tail, v).back();
    }
    split += iterated_integral(y, w)[js];  // empty suffix
    worst_split = std::max(worst_split, std::abs(full - split));
  }
  out.require(worst_split <= 1e-6, "splitting " + fmt(worst_split) + " > 1e-6");

  // degree-two shuffle: I_i I_j = I_ij + I_ji
  double worst_shuffle = 0.0;
  for (int a : {1, 2})
    for (int b : {1, 2}) {
      const GridFn ia = iterated_integral(y, {a});
      const GridFn ib = iterated_integral(y, {b});
      const GridFn iab = iterated_integral(y, {a, b});
      const GridFn iba = iterated_integral(y, {b, a});
      for (std::size_t j = 0; j < m; ++j)
        worst_shuffle = std::max(
            worst_shuffle, std::abs(ia[j] * ib[j] - iab[j] - iba[j]));
    }
  out.require(worst_shuffle <= 1e-6, "shuffle " + fmt(worst_shuffle) + " > 1e-6");
  out.note("pow " + fmt(worst_pow) + ", split " + fmt(worst_split) +
           ", shuffle " + fmt(worst_shuffle));
}

void criterion_integral_envelope(Outcome& out) {
  const auto words = words_up_to(0, 2, 4);
  int violations = 0, checked = 0;
  double worst_ratio = 0.0;
  for (double hurst : {0.6, 0.75}) {
    FbmSpec spec;
    spec.d = 2;
    spec.hurst = hurst;
    spec.horizon = 1.0;
    spec.grid_size = 1025;
    FbmSampler sampler(spec);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      PathGrid y = sampler.sample(500 + seed);
      for (double alpha : {0.2, 0.3}) {
        const PathNorms norms = compute_path_norms(y, {alpha, y.horizon()});
        for (const Word& w : words) {
          const int n = static_cast<int>(w.size());
          const double log_bound = lgamma_pos(1.0 - 2.0 * alpha) -
                                   lgamma_pos(n * (1.0 - 2.0 * alpha)) +
                                   (n - 1) * std::log(norms.c_alpha * norms.lambda) +
                                   std::log(norms.holder_sup);
          const double bound = std::exp(log_bound);
          const GridFn iw = iterated_integral(y, w);
          double sup = 0.0;
          for (double v : iw) sup = std::max(sup, std::abs(v));
          ++checked;
          worst_ratio = std::max(worst_ratio, sup / bound);
          if (sup > bound) ++violations;
        }
      }
    }
  }
  out.require(violations == 0,
              std::to_string(violations) + " envelope violations");
  out.note(std::to_string(checked) + " cases, worst ratio " + fmt(worst_ratio));
}

void criterion_tail_bound_validity(Outcome& out) {
  int violations = 0;
  double worst_margin = 0.0;  // largest error/bound ratio seen

  // rough instance, unbounded budget: the whole horizon is in scope
  {
    FbmSpec spec;
    spec.d = 1;
    spec.hurst = 0.75;
    spec.horizon = 0.5;
    spec.grid_size = 2049;
    spec.seed = 321;
    PathGrid y = sample_fbm(spec);
    JetSystem sys = scalar_linear_system(0.05, 1.0);
    const int n_max = 8;
    const auto levels = expansion_levels(y, build_table(sys, n_max), n_max);
    const SolverOutput sol = picard_solve(sys, y, {});
    BoundParams bp;
    bp.alpha = 0.25;
    bp.m_const = 0.05;
    bp.r = 1.25;
    bp.d = 1;
    const PathNorms norms = compute_path_norms(y, {bp.alpha, y.horizon()});
    for (int n = 1; n <= n_max; ++n) {
      const double bound = remainder_bound(bp, norms, n).value;
      const auto trunc = truncated_solution(levels, sys.x0, n);
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double err = std::abs(sol.trajectory[j](0) - trunc[j](0));
        worst_margin = std::max(worst_margin, err / bound);
        if (err > bound) ++violations;
      }
    }
  }

  // smooth instance with a finite budget: check only inside the window
  {
    const std::size_t m = 1025;
    GridFn drive = uniform_times(0.2, m);
    PathGrid y = make_path(0.2, m, {drive}, 1.0);
    JetSystem sys = scalar_linear_system(0.05, 1.0);
    const int n_max = 8;
    const auto levels = expansion_levels(y, build_table(sys, n_max), n_max);
    const SolverOutput sol = picard_solve(sys, y, {});
    BoundParams bp;
    bp.alpha = 0.35;
    bp.m_const = 0.05;
    bp.r = 1.25;
    bp.d = 1;
    const PathNorms norms = compute_path_norms(y, {bp.alpha, y.horizon()});
    // place the budget so the crossing lands strictly inside the grid
    BoundParams folded = bp;
    folded.m_const = bp.r * bp.m_const;
    const double tail = remainder_bound(folded, norms, n_max).value;
    auto level_sum = [&](std::size_t j) {
      double s = 0.0, rk = 1.0;
      for (int k = 1; k <= n_max; ++k) {
        rk *= bp.r;
        s += rk * levels[k - 1].g[j].norm();
      }
      return s;
    };
    const std::size_t j_target = (3 * (m - 1)) / 5;
    bp.budget = tail + 0.5 * (level_sum(j_target) + level_sum(j_target + 1));
    const TcResult tc = detect_tc(levels, y, bp, norms);
    out.require(tc.crossed, "no budget crossing on the smooth instance");
    out.require(tc.node > 0 && tc.node + 1 < static_cast<int>(m),
                "crossing not interior (node " + std::to_string(tc.node) + ")");
    if (tc.crossed && tc.node > 0) {
      for (int n = 1; n <= n_max; ++n) {
        const double bound = remainder_bound(bp, norms, n).value;
        const auto trunc = truncated_solution(levels, sys.x0, n);
        for (int j = 0; j < tc.node; ++j) {
          const double err = std::abs(sol.trajectory[j](0) - trunc[j](0));
          worst_margin = std::max(worst_margin, err / bound);
          if (err > bound) ++violations;
        }
      }
      out.note("crossing at t=" + fmt(tc.time) + " node " +
               std::to_string(tc.node));
    }
  }

  out.require(violations == 0,
              std::to_string(violations) + " bound violations");
  out.note("worst error/bound " + fmt(worst_margin));
}

void criterion_monte_carlo(Outcome& out) {
  const int reps = 10000;
  const unsigned hw = std::thread::hardware_concurrency();
  const int threads = static_cast<int>(std::clamp(hw, 1u, 8u));
  for (double hurst : {0.6, 0.75}) {
    McConfig cfg;
    cfg.replicates = reps;
    cfg.fbm.d = 2;
    cfg.fbm.hurst = hurst;
    cfg.fbm.horizon = 1.0;
    cfg.fbm.grid_size = 512;
    cfg.fbm.seed = hurst < 0.7 ? 9006 : 9007;
    cfg.words = {{1}, {2}, {1, 1}, {1, 2}, {2, 1}, {1, 2, 1}, {2, 2, 2}};
    cfg.confidence = 0.99;
    cfg.threads = threads;
    const L2Report rep = mc_l2(cfg);
    for (const WordStat& st : rep.stats) {
      out.require(st.pass, "H=" + fmt(hurst) + " word len " +
                               std::to_string(st.length) +
                               " exceeds its envelope (" + fmt(st.empirical) +
                               " + " + fmt(st.ci_halfwidth) + " > " +
                               fmt(st.bound) + ")");
      if (st.word == Word{1}) {
        // E (B_1)^2 = 1, Var (B_1)^2 = 2
        const double se = std::sqrt(2.0 / reps);
        out.require(std::abs(st.empirical - 1.0) <= 3.0 * se,
                    "H=" + fmt(hurst) + " first moment off: " +
                        fmt(st.empirical) + " vs 1 +- " + fmt(3.0 * se));
      }
      if (st.word == Word{1, 1}) {
        // integral is B^2/2: mean square 3/4, variance 6
        const double se = std::sqrt(6.0 / reps);
        out.require(std::abs(st.empirical - 0.75) <= 3.0 * se,
                    "H=" + fmt(hurst) + " repeated-letter moment off: " +
                        fmt(st.empirical) + " vs 0.75 +- " + fmt(3.0 * se));
      }
    }
  }
  out.note("2 surfaces x 7 words at " + std::to_string(reps) + " replicates, " +
           std::to_string(threads) + " threads");
}

void criterion_group_form(Outcome& out) {
  // nilpotent pair: truncation terminates exactly at depth two
  {
    MatrixLieSetup setup;
    setup.n = 3;
    Mat a1 = Mat::Zero(3, 3), a2 = Mat::Zero(3, 3);
    a1(0, 1) = 1.0;
    a2(1, 2) = 1.0;
    setup.generators = {a1, a2};
    const std::size_t m = 2049;
    GridFn t = uniform_times(1.0, m), t2(m);
    for (std::size_t j = 0; j < m; ++j) t2[j] = t[j] * t[j];
    PathGrid y = make_path(1.0, m, {t, t2}, 1.0);
    const GroupSolution g2 = group_solution(setup, y, 2, 1.0);
    const GroupSolution g3 = group_solution(setup, y, 3, 1.0);
    const double stab = (g2.x - g3.x).norm();
    out.require(stab <= 1e-12, "depth-3 terms did not vanish: " + fmt(stab));
    const Mat ref = picard_group_state(setup, y);
    const double gap = (g2.x - ref).norm();
    out.require(gap <= 1e-6, "nilpotent flow gap " + fmt(gap) + " > 1e-6");
    out.note("nilpotent gap " + fmt(gap));
  }
  // rotation pair: depth five against the solver, exact orthogonality
  {
    MatrixLieSetup setup;
    setup.n = 3;
    Mat az = Mat::Zero(3, 3), ay = Mat::Zero(3, 3);
    az(0, 1) = -1.0;
    az(1, 0) = 1.0;
    ay(0, 2) = 1.0;
    ay(2, 0) = -1.0;
    setup.generators = {az, ay};
    const std::size_t m = 1025;
    GridFn t = uniform_times(0.2, m), s1(m), s2(m);
    for (std::size_t j = 0; j < m; ++j) {
      s1[j] = 0.5 * std::sin(t[j]);
      s2[j] = 0.5 * (1.0 - std::cos(t[j]));
    }
    PathGrid y = make_path(0.2, m, {s1, s2}, 1.0);
    const GroupSolution g = group_solution(setup, y, 5, 0.2);
    const Mat ref = picard_group_state(setup, y);
    const double gap = (g.x - ref).norm();
    out.require(gap <= 1e-6, "rotation flow gap " + fmt(gap) + " > 1e-6");
    const double ortho = (g.x.transpose() * g.x - Mat::Identity(3, 3)).norm();
    out.require(ortho <= 1e-10, "orthogonality defect " + fmt(ortho));
    out.note("rotation gap " + fmt(gap) + ", orthogonality " + fmt(ortho));
  }
}

void criterion_tail_comparison(Outcome& out) {
  // matched parameters, unit path functionals; ratios compared in log space
  const PathNorms norms{1.0, 1.0, 1.0};
  BoundParams bp;
  bp.alpha = 0.45;
  bp.gamma = 0.0;
  bp.m_const = 1.0;
  bp.r = 2.0;
  bp.d = 1;
  const double t = 0.5, hurst = 0.6;
  double prev = std::numeric_limits<double>::infinity();
  double last = 0.0;
  bool monotone = true;
  for (int n = 2; n <= 10; ++n) {
    const TailBound det = remainder_bound(bp, norms, n);
    const ProbTail prob = probabilistic_remainder(n, t, hurst, 1.0, 0.0, 1);
    const double log_ratio = std::log(prob.value) - det.log_value;
    if (!(log_ratio < prev)) monotone = false;
    prev = log_ratio;
    last = log_ratio;
  }
  out.require(monotone, "ratio not strictly decreasing in the cut order");
  out.require(last < std::log(1e-2),
              "final log ratio " + fmt(last) + " >= log(1e-2)");
  out.note("log ratio at N=10: " + fmt(last));
}

void criterion_rerun_identity(Outcome& out) {
  const json solve_cfg = {
      {"experiment", "solve"},
      {"horizon", 1.0},
      {"grid_size", 257},
      {"path", {{"kind", "smooth"}, {"components", {"x1"}}}},
      {"system",
       {{"kind", "linear"},
        {"n", 1},
        {"matrices", {json::array({0.0}), json::array({1.0})}},
        {"x0", {2.0}}}}};
  const json bound_cfg = {
      {"experiment", "bound"},
      {"horizon", 0.2},
      {"grid_size", 129},
      {"path", {{"kind", "fbm"}, {"d", 1}, {"hurst", 0.75}, {"seed", 11}}},
      {"params", {{"alpha", 0.3}, {"M", 0.5}, {"N", 5}}}};
  const json mc_cfg = {
      {"experiment", "mc-l2"},
      {"horizon", 1.0},
      {"grid_size", 65},
      {"path", {{"kind", "fbm"}, {"d", 2}, {"hurst", 0.75}, {"seed", 5}}},
      {"mc",
       {{"replicates", 200},
        {"words", {json::array({1}), json::array({1, 2})}}}}};
  int compared = 0;
  for (const json& cfg : {solve_cfg, bound_cfg, mc_cfg}) {
    const fs::path a = "acc_rerun_a", b = "acc_rerun_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const RunResult ra = run_experiment(cfg, a.string(), 2);
    run_experiment(cfg, b.string(), 1);
    for (const std::string& o : ra.outputs) {
      const std::string base = fs::path(o).filename().string();
      ++compared;
      out.require(slurp(a / base) == slurp(b / base),
                  base + " differs between reruns for " +
                      cfg.at("experiment").get<std::string>());
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }
  out.note(std::to_string(compared) + " artifacts compared");
}

}  // namespace

int main() {
  run_criterion(1, "truncated expansion tracks the scalar exponential flow",
                10.0, criterion_scalar_flow);
  run_criterion(2, "direct and inductive level constructions agree", 60.0,
                criterion_level_agreement);
  run_criterion(3, "iterated-integral algebra: powers, splitting, shuffle",
                30.0, criterion_integral_algebra);
  run_criterion(4, "sampled iterated integrals respect the factorial envelope",
                300.0, criterion_integral_envelope);
  run_criterion(5, "solver-vs-truncation error stays below the tail bound",
                120.0, criterion_tail_bound_validity);
  run_criterion(6, "Monte Carlo second moments respect their envelopes", 600.0,
                criterion_monte_carlo);
  run_criterion(7, "group-form truncation reproduces matrix flows", 60.0,
                criterion_group_form);
  run_criterion(8, "probabilistic tails overtake deterministic tails", 10.0,
                criterion_tail_comparison);
  run_criterion(9, "experiment artifacts are byte-identical across reruns", 0.0,
                criterion_rerun_identity);
  std::printf("%d of 9 criteria failed\n", g_failures);
  return g_failures;
}
