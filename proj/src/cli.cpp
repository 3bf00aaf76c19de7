#include "htx/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "htx/expr.hpp"
#include "htx/fraccalc.hpp"
#include "htx/jets.hpp"
#include "htx/magnus.hpp"
#include "htx/paths.hpp"
#include "htx/stochastic.hpp"
#include "htx/taylor.hpp"
#include "htx/young.hpp"

namespace htx {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

const json& need(const json& j, const char* key, const char* ctx) {
  if (!j.is_object() || !j.contains(key))
    fail(std::string(ctx) + ": missing field '" + key + "'");
  return j.at(key);
}

double num_or(const json& j, const char* key, double dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

int int_or(const json& j, const char* key, int dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    fail(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::string str_or(const json& j, const char* key, const std::string& dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_string()) fail(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Mat parse_mat(const json& v, int n, const char* ctx) {
  if (!v.is_array() || static_cast<int>(v.size()) != n * n)
    fail(std::string(ctx) + ": expected a row-major array of " +
         std::to_string(n * n) + " numbers");
  Mat m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const json& e = v.at(r * n + c);
      if (!e.is_number()) fail(std::string(ctx) + ": non-numeric entry");
      m(r, c) = e.get<double>();
    }
  return m;
}

Vec parse_vec(const json& v, int n, const char* ctx) {
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    fail(std::string(ctx) + ": expected an array of " + std::to_string(n) +
         " numbers");
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    const json& e = v.at(i);
    if (!e.is_number()) fail(std::string(ctx) + ": non-numeric entry");
    out(i) = e.get<double>();
  }
  return out;
}

std::vector<Word> parse_words(const json& v, int d) {
  if (!v.is_array() || v.empty()) fail("mc.words: expected a nonempty array");
  std::vector<Word> words;
  for (const json& wj : v) {
    if (!wj.is_array() || wj.empty())
      fail("mc.words: each word is a nonempty array of letters");
    Word w;
    for (const json& lj : wj) {
      if (!lj.is_number_integer()) fail("mc.words: letters are integers");
      const int letter = lj.get<int>();
      if (letter < 1 || letter > d)
        fail("mc.words: letters must lie in 1.." + std::to_string(d));
      w.push_back(letter);
    }
    words.push_back(std::move(w));
  }
  return words;
}

std::string word_dotted(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(w[i]);
  }
  return s;
}

FbmSpec parse_fbm_spec(const json& cfg) {
  const json& p = need(cfg, "path", "config");
  FbmSpec spec;
  spec.d = int_or(p, "d", 1);
  spec.hurst = num_or(p, "hurst", 0.75);
  spec.horizon = num_or(cfg, "horizon", 1.0);
  spec.grid_size = int_or(cfg, "grid_size", 1024);
  spec.seed = static_cast<std::uint64_t>(int_or(p, "seed", 0));
  spec.beta_hint = num_or(p, "beta_hint", 0.0);
  return spec;
}

PathGrid build_path(const json& cfg) {
  const json& p = need(cfg, "path", "config");
  const std::string kind = need(p, "kind", "path").get<std::string>();
  if (kind == "fbm") return sample_fbm(parse_fbm_spec(cfg));
  if (kind == "file") {
    const std::string file = need(p, "file", "path").get<std::string>();
    const double beta = num_or(p, "beta_hint", 0.0);
    return read_path_csv(file, beta);
  }
  if (kind == "smooth") {
    const json& comps = need(p, "components", "path");
    if (!comps.is_array() || comps.empty())
      fail("path.components: expected a nonempty array of expressions in x1");
    const double horizon = num_or(cfg, "horizon", 1.0);
    const int m = int_or(cfg, "grid_size", 1024);
    const GridFn times = uniform_times(horizon, m);
    std::vector<GridFn> drives;
    Vec tv(1);
    for (const json& cj : comps) {
      if (!cj.is_string()) fail("path.components: entries are strings");
      const ExprPtr e = parse_expr(cj.get<std::string>(), 1);
      GridFn g(times.size());
      for (std::size_t j = 0; j < times.size(); ++j) {
        tv(0) = times[j];
        g[j] = expr_value(e, tv);
      }
      drives.push_back(std::move(g));
    }
    return make_path(horizon, m, drives, num_or(p, "beta_hint", 1.0));
  }
  fail("path.kind must be one of fbm|file|smooth");
}

JetSystem build_system(const json& cfg, int path_d) {
  const json& s = need(cfg, "system", "config");
  const std::string kind = str_or(s, "kind", "linear");
  JetSystem sys;
  if (kind == "linear") {
    sys.n = int_or(s, "n", 1);
    const json& mats = need(s, "matrices", "system");
    if (!mats.is_array() || mats.empty())
      fail("system.matrices: expected d+1 row-major matrices");
    sys.d = static_cast<int>(mats.size()) - 1;
    const json* offs = s.contains("offsets") ? &s.at("offsets") : nullptr;
    if (offs && (!offs->is_array() || offs->size() != mats.size()))
      fail("system.offsets: need one offset vector per field");
    for (std::size_t i = 0; i < mats.size(); ++i) {
      Mat a = parse_mat(mats.at(i), sys.n, "system.matrices");
      Vec b = offs ? parse_vec(offs->at(i), sys.n, "system.offsets")
                   : Vec(Vec::Zero(sys.n));
      sys.fields.push_back(linear_field(a, b));
    }
  } else if (kind == "expression") {
    const json& fields = need(s, "fields", "system");
    if (!fields.is_array() || fields.empty())
      fail("system.fields: expected d+1 component lists");
    sys.d = static_cast<int>(fields.size()) - 1;
    const json& first = fields.at(0);
    if (!first.is_array() || first.empty())
      fail("system.fields: each field is a nonempty array of expressions");
    sys.n = static_cast<int>(first.size());
    for (const json& fj : fields) {
      if (!fj.is_array() || static_cast<int>(fj.size()) != sys.n)
        fail("system.fields: all fields need exactly n components");
      std::vector<std::string> srcs;
      for (const json& cj : fj) {
        if (!cj.is_string()) fail("system.fields: components are strings");
        srcs.push_back(cj.get<std::string>());
      }
      sys.fields.push_back(expression_field(parse_component_list(srcs, sys.n)));
    }
  } else {
    fail("system.kind must be linear|expression");
  }
  sys.x0 = parse_vec(need(s, "x0", "system"), sys.n, "system.x0");
  if (s.contains("radius")) sys.radius = num_or(s, "radius", 0.0);
  sys.validate();
  if (sys.d != path_d)
    fail("system defines " + std::to_string(sys.d) + " drives but the path has " +
         std::to_string(path_d));
  return sys;
}

struct ParamSet {
  BoundParams bp;
  int n_trunc = 8;
  int k_max = 4;
  bool m_fitted = false;
  GrowthFit fit;
};

ParamSet parse_params(const json& cfg, int d, const JetSystem* sys) {
  const json& p = need(cfg, "params", "config");
  ParamSet out;
  out.bp.alpha = need(p, "alpha", "params").get<double>();
  out.bp.gamma = num_or(p, "gamma", 0.0);
  out.bp.r = num_or(p, "r", 2.0);
  out.bp.d = d;
  if (p.contains("C") && !p.at("C").is_null())
    out.bp.budget = num_or(p, "C", 0.0);
  out.n_trunc = int_or(p, "N", 8);
  out.k_max = int_or(p, "k_max", std::max(4, out.n_trunc));
  if (p.contains("M")) {
    out.bp.m_const = num_or(p, "M", 1.0);
  } else {
    if (sys == nullptr)
      fail("params.M is required when no system is configured");
    std::vector<double> grid;
    if (p.contains("gamma_grid"))
      for (const json& g : p.at("gamma_grid")) grid.push_back(g.get<double>());
    if (grid.empty()) grid.push_back(out.bp.gamma);
    const int k_fit = int_or(p, "fit_k", std::min(6, out.k_max));
    out.fit = fit_growth(build_table(*sys, k_fit), grid);
    out.bp.m_const = out.fit.m_const;
    out.bp.gamma = out.fit.gamma;
    out.m_fitted = true;
  }
  out.bp.validate();
  if (out.n_trunc < 1) fail("params.N must be >= 1");
  if (out.k_max < 1) fail("params.k_max must be >= 1");
  return out;
}

PicardConfig parse_picard(const json& cfg) {
  PicardConfig pc;
  if (!cfg.contains("picard")) return pc;
  const json& p = cfg.at("picard");
  pc.max_iterations = int_or(p, "max_iterations", pc.max_iterations);
  pc.tolerance = num_or(p, "tolerance", pc.tolerance);
  pc.windows = int_or(p, "windows", pc.windows);
  return pc;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& dir, const std::string& name,
            const std::string& header, RunResult& result)
      : path_(dir / name), out_(path_, std::ios::binary), name_(name) {
    if (!out_) fail("cannot open output file " + path_.string());
    out_ << header << "\n";
    result.outputs.push_back(path_.string());
  }

  void row(const std::string& line) { out_ << line << "\n"; }

  void close() {
    out_.flush();
    if (!out_) fail("write failure on " + path_.string());
    out_.close();
  }

  const std::string& name() const { return name_; }

 private:
  fs::path path_;
  std::ofstream out_;
  std::string name_;
};

std::string join(std::initializer_list<std::string> cells) {
  std::string line;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) line += ',';
    line += c;
    first = false;
  }
  return line;
}

// ---- experiment runners ---------------------------------------------------

void run_solve(const json& cfg, const fs::path& dir, RunResult& result,
               json& extra) {
  const PathGrid path = build_path(cfg);
  const JetSystem sys = build_system(cfg, path.drives());
  const SolverOutput sol = picard_solve(sys, path, parse_picard(cfg));
  CsvWriter csv(dir, "solve.csv", "t,component,value", result);
  for (std::size_t j = 0; j < path.size(); ++j)
    for (int c = 0; c < sys.n; ++c)
      csv.row(join({csv_num(path.times[j]), std::to_string(c),
                    csv_num(sol.trajectory[j](c))}));
  csv.close();
  extra["solver"] = {{"iterations", sol.iterations},
                     {"converged", sol.converged},
                     {"final_delta", sol.deltas.empty() ? 0.0 : sol.deltas.back()}};
}

void run_expand(const json& cfg, const fs::path& dir, RunResult& result,
                json& extra) {
  const PathGrid path = build_path(cfg);
  const JetSystem sys = build_system(cfg, path.drives());
  const json& p = need(cfg, "params", "config");
  const int k_max = int_or(p, "k_max", 4);
  const int n_trunc = std::min(int_or(p, "N", k_max), k_max);
  if (k_max < 1) fail("params.k_max must be >= 1");
  const CoefficientTable table = build_table(sys, k_max);
  const auto levels = expansion_levels(path, table, k_max);
  CsvWriter lv(dir, "levels.csv", "k,t,component,value", result);
  for (int k = 1; k <= k_max; ++k)
    for (std::size_t j = 0; j < path.size(); ++j)
      for (int c = 0; c < sys.n; ++c)
        lv.row(join({std::to_string(k), csv_num(path.times[j]),
                     std::to_string(c), csv_num(levels[k - 1].g[j](c))}));
  lv.close();
  const auto trunc = truncated_solution(levels, sys.x0, n_trunc);
  CsvWriter tr(dir, "truncated.csv", "t,component,value", result);
  for (std::size_t j = 0; j < path.size(); ++j)
    for (int c = 0; c < sys.n; ++c)
      tr.row(join({csv_num(path.times[j]), std::to_string(c),
                   csv_num(trunc[j](c))}));
  tr.close();
  extra["expansion"] = {{"k_max", k_max}, {"N", n_trunc},
                        {"words", static_cast<int>(table.entries.size())}};
}

json fit_to_json(const GrowthFit& fit) {
  return {{"gamma", fit.gamma},
          {"M", fit.m_const},
          {"admissible", fit.admissible}};
}

void run_bound(const json& cfg, const fs::path& dir, RunResult& result,
               json& extra) {
  const PathGrid path = build_path(cfg);
  JetSystem sys;
  bool have_sys = cfg.contains("system");
  if (have_sys) sys = build_system(cfg, path.drives());
  const ParamSet ps =
      parse_params(cfg, path.drives(), have_sys ? &sys : nullptr);
  const PathNorms norms =
      compute_path_norms(path, {ps.bp.alpha, path.horizon()});
  CsvWriter csv(dir, "bounds.csv", "N,bound,closed_form", result);
  for (int n = 1; n <= ps.n_trunc; ++n) {
    const TailBound tb = remainder_bound(ps.bp, norms, n);
    csv.row(join({std::to_string(n), csv_num(tb.value),
                  csv_num(tb.closed_form)}));
  }
  csv.close();
  extra["norms"] = {{"lambda", norms.lambda},
                    {"c_alpha", norms.c_alpha},
                    {"holder_sup", norms.holder_sup}};
  if (ps.m_fitted) extra["fit"] = fit_to_json(ps.fit);
}

void run_magnus(const json& cfg, const fs::path& dir, RunResult& result,
                json& extra) {
  const PathGrid path = build_path(cfg);
  const json& mg = need(cfg, "magnus", "config");
  const int m = int_or(mg, "m", 0);
  if (m < 1) fail("magnus.m: matrix size must be >= 1");
  const json& gens = need(mg, "generators", "magnus");
  if (!gens.is_array() || gens.empty())
    fail("magnus.generators: expected at least one matrix");
  MatrixLieSetup setup;
  setup.n = m;
  for (const json& gj : gens)
    setup.generators.push_back(parse_mat(gj, m, "magnus.generators"));
  const int k_max = int_or(mg, "k_max", 2);
  const double t = num_or(mg, "t", path.horizon());
  const double trust = num_or(mg, "trust_radius", 5.0);
  const int budget = int_or(mg, "perm_budget", 6);
  const GroupSolution gs = group_solution(setup, path, k_max, t, trust, budget);
  CsvWriter csv(dir, "magnus.csv", "kind,row,col,value", result);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      csv.row(join({"series", std::to_string(r), std::to_string(c),
                    csv_num(gs.series(r, c))}));
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      csv.row(join({"exp", std::to_string(r), std::to_string(c),
                    csv_num(gs.x(r, c))}));
  csv.close();
  extra["magnus"] = {{"series_norm", gs.series_norm},
                     {"within_trust", gs.within_trust},
                     {"k_max", k_max},
                     {"t", t}};
}

void run_mc(const json& cfg, const fs::path& dir, int threads,
            RunResult& result, json& extra) {
  const json& p = need(cfg, "path", "config");
  if (need(p, "kind", "path").get<std::string>() != "fbm")
    fail("mc-l2 requires path.kind = fbm");
  const json& mc = need(cfg, "mc", "config");
  McConfig mcfg;
  mcfg.fbm = parse_fbm_spec(cfg);
  mcfg.replicates = int_or(mc, "replicates", 10000);
  mcfg.confidence = num_or(mc, "confidence", 0.99);
  mcfg.words = parse_words(need(mc, "words", "mc"), mcfg.fbm.d);
  mcfg.threads = std::max(1, threads);
  const L2Report rep = mc_l2(mcfg);
  CsvWriter csv(dir, "l2.csv", "word,m,empirical,ci_halfwidth,bound,pass",
                result);
  for (const WordStat& st : rep.stats)
    csv.row(join({word_dotted(st.word), std::to_string(st.length),
                  csv_num(st.empirical), csv_num(st.ci_halfwidth),
                  csv_num(st.bound), st.pass ? "1" : "0"}));
  csv.close();
  extra["mc"] = {{"seed_base", rep.seed_base},
                 {"replicates", rep.replicates},
                 {"confidence", rep.confidence},
                 {"enough_replicates", rep.enough_replicates}};
}

void run_compare(const json& cfg, const fs::path& dir, RunResult& result,
                 json& extra) {
  const PathGrid path = build_path(cfg);
  const JetSystem sys = build_system(cfg, path.drives());
  const ParamSet ps = parse_params(cfg, path.drives(), &sys);
  const int k_max = std::max(ps.k_max, ps.n_trunc);
  const CoefficientTable table = build_table(sys, k_max);
  const auto levels = expansion_levels(path, table, k_max);
  const SolverOutput sol = picard_solve(sys, path, parse_picard(cfg));
  const PathNorms norms =
      compute_path_norms(path, {ps.bp.alpha, path.horizon()});
  CsvWriter csv(dir, "compare.csv", "t,N,error,bound,closed_form", result);
  for (int n = 1; n <= ps.n_trunc; ++n) {
    const auto trunc = truncated_solution(levels, sys.x0, n);
    const TailBound tb = remainder_bound(ps.bp, norms, n);
    for (std::size_t j = 0; j < path.size(); ++j) {
      const double err = (sol.trajectory[j] - trunc[j]).norm();
      csv.row(join({csv_num(path.times[j]), std::to_string(n), csv_num(err),
                    csv_num(tb.value), csv_num(tb.closed_form)}));
    }
  }
  csv.close();
  extra["solver"] = {{"iterations", sol.iterations},
                     {"converged", sol.converged}};
  extra["norms"] = {{"lambda", norms.lambda},
                    {"c_alpha", norms.c_alpha},
                    {"holder_sup", norms.holder_sup}};
  if (ps.m_fitted) extra["fit"] = fit_to_json(ps.fit);
  if (!std::isinf(ps.bp.budget)) {
    const TcResult tc = detect_tc(levels, path, ps.bp, norms);
    extra["tc"] = {{"time", tc.time}, {"crossed", tc.crossed},
                   {"node", tc.node}};
  }
}

}  // namespace

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is a 1-based offset into the raw text.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail("config parse error at line " + std::to_string(line) + ", column " +
         std::to_string(col) + ": " + e.what());
  }
}

std::vector<std::string> validate_config(const json& cfg) {
  std::vector<std::string> warnings;
  const std::string kind = need(cfg, "experiment", "config").get<std::string>();
  const bool known = kind == "solve" || kind == "expand" || kind == "bound" ||
                     kind == "magnus" || kind == "mc-l2" || kind == "compare";
  if (!known)
    fail("experiment must be one of solve|expand|bound|magnus|mc-l2|compare");

  const json& p = need(cfg, "path", "config");
  const std::string pkind = need(p, "kind", "path").get<std::string>();
  double beta = 1.0;
  if (pkind == "fbm") {
    const double h = num_or(p, "hurst", 0.75);
    if (!(h > 0.5 && h < 1.0)) fail("path.hurst must lie in (1/2, 1)");
    double hint = num_or(p, "beta_hint", 0.0);
    beta = hint > 0.5 ? hint : std::max(0.5001, h - 0.05);
    if (int_or(cfg, "grid_size", 1024) < 2) fail("grid_size must be >= 2");
  } else if (pkind == "file") {
    const std::string file = need(p, "file", "path").get<std::string>();
    if (!fs::exists(file)) fail("path.file does not exist: " + file);
    beta = num_or(p, "beta_hint", 0.0);
    if (!(beta > 0.5 && beta <= 1.0))
      fail("path.beta_hint must lie in (1/2, 1] for file paths");
  } else if (pkind == "smooth") {
    const json& comps = need(p, "components", "path");
    if (!comps.is_array() || comps.empty())
      fail("path.components must be a nonempty array");
    for (const json& cj : comps)
      parse_expr(cj.get<std::string>(), 1);  // surfaces syntax errors early
    beta = num_or(p, "beta_hint", 1.0);
    if (!(beta > 0.5 && beta <= 1.0))
      fail("path.beta_hint must lie in (1/2, 1]");
  } else {
    fail("path.kind must be one of fbm|file|smooth");
  }
  if (!(num_or(cfg, "horizon", 1.0) > 0.0)) fail("horizon must be positive");

  if (cfg.contains("params")) {
    const json& pr = cfg.at("params");
    const double alpha = num_or(pr, "alpha", 0.25);
    if (!(alpha > 0.0 && alpha < 0.5))
      fail("params.alpha violates the invariant alpha in (0, 1/2)");
    if (alpha <= 1.0 - beta)
      warnings.push_back(
          "params.alpha = " + std::to_string(alpha) +
          " is outside (1 - beta, 1/2) for beta = " + std::to_string(beta) +
          "; the fractional-derivative bounds are not guaranteed there");
    const double gamma = num_or(pr, "gamma", 0.0);
    if (!(gamma >= 0.0 && 1.0 - 2.0 * alpha - gamma > 0.0))
      fail("params.gamma violates the invariant gamma in [0, 1 - 2 alpha)");
    if (pr.contains("r") && !(num_or(pr, "r", 2.0) > 1.0))
      fail("params.r violates the invariant r > 1");
    if (pr.contains("M") && !(num_or(pr, "M", 1.0) > 0.0))
      fail("params.M must be positive");
  } else if (kind == "bound" || kind == "compare") {
    fail(kind + " requires a params block with alpha");
  }

  if (kind == "solve" || kind == "expand" || kind == "compare") {
    if (!cfg.contains("system")) fail(kind + " requires a system block");
  }
  if (kind == "magnus") {
    const json& mg = need(cfg, "magnus", "config");
    const int m = int_or(mg, "m", 0);
    if (m < 1) fail("magnus.m must be >= 1");
    const json& gens = need(mg, "generators", "magnus");
    if (!gens.is_array() || gens.empty())
      fail("magnus.generators must be a nonempty array");
    const int k_max = int_or(mg, "k_max", 2);
    const int budget = int_or(mg, "perm_budget", 6);
    if (k_max < 1 || k_max > budget)
      fail("magnus.k_max must lie in 1..perm_budget");
  }
  if (kind == "mc-l2") {
    if (pkind != "fbm") fail("mc-l2 requires path.kind = fbm");
    const json& mc = need(cfg, "mc", "config");
    const int reps = int_or(mc, "replicates", 10000);
    if (reps < 1) fail("mc.replicates must be >= 1");
    if (reps < 100)
      warnings.push_back(
          "mc.replicates < 100: confidence intervals are advisory only");
    parse_words(need(mc, "words", "mc"), int_or(p, "d", 1));
    const double conf = num_or(mc, "confidence", 0.99);
    if (!(conf > 0.0 && conf < 1.0)) fail("mc.confidence must lie in (0, 1)");
  }
  return warnings;
}

RunResult run_experiment(const json& cfg, const std::string& out_override,
                         int threads) {
  RunResult result;
  result.warnings = validate_config(cfg);
  const std::string kind = cfg.at("experiment").get<std::string>();
  // Precedence: explicit override, then HTX_OUT, then the config, then the
  // fixed default.
  std::string dir_name = out_override;
  if (dir_name.empty())
    if (const char* env = std::getenv("HTX_OUT")) dir_name = env;
  if (dir_name.empty()) dir_name = str_or(cfg, "out_dir", "htx_out");
  const fs::path dir(dir_name);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail("cannot create output directory " + dir.string());

  json extra = json::object();
  if (kind == "solve") run_solve(cfg, dir, result, extra);
  else if (kind == "expand") run_expand(cfg, dir, result, extra);
  else if (kind == "bound") run_bound(cfg, dir, result, extra);
  else if (kind == "magnus") run_magnus(cfg, dir, result, extra);
  else if (kind == "mc-l2") run_mc(cfg, dir, threads, result, extra);
  else if (kind == "compare") run_compare(cfg, dir, result, extra);

  json manifest;
  manifest["tool"] = {{"name", "htx"}, {"version", "0.1.0"}};
  manifest["experiment"] = kind;
  manifest["config"] = cfg;
  json outs = json::array();
  for (const std::string& o : result.outputs)
    outs.push_back(fs::path(o).filename().string());
  manifest["outputs"] = outs;
  manifest["results"] = extra;
  if (!result.warnings.empty()) manifest["warnings"] = result.warnings;

  const fs::path mpath = dir / "manifest.json";
  std::ofstream mout(mpath, std::ios::binary);
  if (!mout) fail("cannot write manifest " + mpath.string());
  mout << manifest.dump(2) << "\n";
  mout.close();
  result.outputs.push_back(mpath.string());
  return result;
}

}  // namespace htx
