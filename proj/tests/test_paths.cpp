#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "htx/paths.hpp"
#include "htx/rng.hpp"

using namespace htx;

namespace {

// Independent closed form for the norm of a linear drive y(u) = c u:
//   sup_s (|c| s + |c| s^{1-a}/(1-a)) at s = t.
double linear_path_norm_oracle(double c, double t, double alpha) {
  return std::fabs(c) * (t + std::pow(t, 1.0 - alpha) / (1.0 - alpha));
}

PathGrid linear_drive_path(double c, double horizon, int m) {
  GridFn times = uniform_times(horizon, m);
  GridFn y(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) y[j] = c * times[j];
  return make_path(horizon, m, {y}, 1.0);
}

}  // namespace

TEST_CASE("uniform grid endpoints and spacing") {
  GridFn t = uniform_times(2.0, 5);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 2.0);
  for (int j = 0; j + 1 < 5; ++j)
    CHECK(t[j + 1] - t[j] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(node_index(t, 1.0) == 2);
  CHECK_THROWS(node_index(t, 0.7));
}

TEST_CASE("fbm covariance closed forms") {
  // 0.5 (1^1.5 + 4^1.5 - 3^1.5) = (9 - 3 sqrt 3)/2 at H = 3/4.
  const double expect = 0.5 * (9.0 - 3.0 * std::sqrt(3.0));
  CHECK(fbm_covariance(1.0, 4.0, 0.75) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(fbm_covariance(2.0, 2.0, 0.6) ==
        doctest::Approx(std::pow(2.0, 1.2)).epsilon(1e-13));
  CHECK(fbm_covariance(0.0, 1.0, 0.75) == doctest::Approx(0.0));
  // H = 1/2 degenerates to the Brownian covariance min(t, s)
  CHECK(fbm_covariance(2.0, 3.0, 0.5) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK_THROWS(fbm_covariance(1.0, 1.0, 0.0));
  CHECK_THROWS(fbm_covariance(1.0, 1.0, 1.0));
  CHECK_THROWS(fbm_covariance(-1.0, 1.0, 0.75));
}

TEST_CASE("sampler reproducibility and structure") {
  FbmSpec spec;
  spec.d = 2;
  spec.hurst = 0.75;
  spec.horizon = 1.0;
  spec.grid_size = 65;
  spec.seed = 42;
  FbmSampler sampler(spec);
  PathGrid a = sampler.sample(42);
  PathGrid b = sampler.sample(42);
  PathGrid c = sampler.sample(43);
  REQUIRE(a.size() == 65);
  REQUIRE(a.drives() == 2);
  CHECK(a.comps[0] == a.times);
  CHECK(a.comps[1][0] == 0.0);
  CHECK(a.comps[2][0] == 0.0);
  CHECK(a.comps[1] == b.comps[1]);
  CHECK(a.comps[2] == b.comps[2]);
  CHECK(a.comps[1] != c.comps[1]);
  // derived Holder exponent: max(0.5001, H - 0.05)
  CHECK(a.beta_hint == doctest::Approx(0.70).epsilon(1e-12));
  // the two components come from distinct streams
  CHECK(a.comps[1] != a.comps[2]);
}

TEST_CASE("sampled variance and covariance match the process law") {
  FbmSpec spec;
  spec.d = 1;
  spec.hurst = 0.7;
  spec.horizon = 1.0;
  spec.grid_size = 33;
  spec.seed = 7;
  FbmSampler sampler(spec);
  const int reps = 4000;
  double s2_end = 0.0, s_cross = 0.0;
  for (int r = 0; r < reps; ++r) {
    PathGrid p = sampler.sample(1000 + r);
    const double bt = p.comps[1].back();
    const double bh = p.comps[1][16];  // t = 0.5
    s2_end += bt * bt;
    s_cross += bt * bh;
  }
  s2_end /= reps;
  s_cross /= reps;
  // Var B_1 = 1; Var of the squared-sample mean ~ 2/reps.
  const double se_var = std::sqrt(2.0 / reps);
  CHECK(std::fabs(s2_end - 1.0) <= 3.5 * se_var);
  const double cov_expect = fbm_covariance(1.0, 0.5, 0.7);
  CHECK(std::fabs(s_cross - cov_expect) <= 4.0 * se_var);
}

TEST_CASE("holder sup norm: linear drive closed form") {
  PathGrid y = linear_drive_path(1.0, 1.0, 257);
  // alpha = 1/4: 1 + 1/(3/4) = 7/3 for the drive alone.
  const double v = holder_sup_norm(y, 0.25, 1.0, false);
  CHECK(v == doctest::Approx(7.0 / 3.0).epsilon(1e-10));
  CHECK(v == doctest::Approx(linear_path_norm_oracle(1.0, 1.0, 0.25))
                 .epsilon(1e-10));
  // with the time component the vector (u, u) scales everything by sqrt 2.
  const double vt = holder_sup_norm(y, 0.25, 1.0, true);
  CHECK(vt == doctest::Approx(std::sqrt(2.0) * 7.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("holder sup norm: quadratic drive against derived quadrature") {
  const int m = 1025;
  GridFn times = uniform_times(1.0, m);
  GridFn y(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) y[j] = times[j] * times[j];
  PathGrid p = make_path(1.0, m, {y}, 1.0);
  // For y = u^2: |y_s| + int_0^s (y_s - y_r)(s - r)^{-1-a} dr
  //   = s^2 + s^{2-a} (2/(1-a) - 1/(2-a)); sup at s = 1, a = 0.3.
  const double expect = 1.0 + 2.0 / 0.7 - 1.0 / 1.7;
  const double v = holder_sup_norm(p, 0.3, 1.0, false);
  CHECK(v == doctest::Approx(expect).epsilon(2e-4));
}

TEST_CASE("holder sup norm grows with the time cutoff") {
  FbmSpec spec;
  spec.hurst = 0.75;
  spec.grid_size = 129;
  spec.seed = 5;
  PathGrid p = sample_fbm(spec);
  const double a = holder_sup_norm(p, 0.3, 0.25);
  const double b = holder_sup_norm(p, 0.3, 0.5);
  const double c = holder_sup_norm(p, 0.3, 1.0);
  CHECK(a <= b);
  CHECK(b <= c);
  CHECK(a > 0.0);
}

TEST_CASE("path validation rejects malformed grids") {
  PathGrid p = linear_drive_path(1.0, 1.0, 17);
  CHECK_NOTHROW(p.validate());
  PathGrid bad = p;
  bad.comps[0][3] += 1e-3;  // clock must equal the grid times
  CHECK_THROWS(bad.validate());
  bad = p;
  bad.times[5] += 1e-3;
  CHECK_THROWS(bad.validate());
  bad = p;
  bad.beta_hint = 0.4;
  CHECK_THROWS(bad.validate());
  bad = p;
  bad.comps[1].pop_back();
  CHECK_THROWS(bad.validate());
}

TEST_CASE("csv round trip preserves every bit") {
  FbmSpec spec;
  spec.d = 2;
  spec.hurst = 0.6;
  spec.grid_size = 33;
  spec.seed = 11;
  PathGrid p = sample_fbm(spec);
  const std::string f1 = "paths_roundtrip_1.csv";
  const std::string f2 = "paths_roundtrip_2.csv";
  write_path_csv(p, f1);
  PathGrid q = read_path_csv(f1, p.beta_hint);
  REQUIRE(q.size() == p.size());
  for (std::size_t c = 0; c < p.comps.size(); ++c)
    for (std::size_t j = 0; j < p.size(); ++j)
      CHECK(q.comps[c][j] == p.comps[c][j]);
  write_path_csv(q, f2);
  std::ifstream a(f1, std::ios::binary), b(f2, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)),
                 std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)),
                 std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(sa.find('\r') == std::string::npos);
  std::filesystem::remove(f1);
  std::filesystem::remove(f2);
}

TEST_CASE("gaussian stream basics") {
  GaussianStream g(123, 0);
  GaussianStream h(123, 0);
  GaussianStream k(123, 1);
  double sd = 0.0;
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double a = g.next();
    CHECK(a == h.next());
    if (a != k.next()) differs = true;
    sd += a * a;
  }
  CHECK(differs);
  CHECK(std::fabs(sd / 1000.0 - 1.0) < 0.15);
  // quantile sanity against the symmetric point and a table value
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(normal_quantile(0.995) == doctest::Approx(2.575829303548901).epsilon(1e-9));
}
