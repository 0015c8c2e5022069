#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "doctest.h"
#include "wander/scaffold.hpp"
#include "wander/textio.hpp"

using namespace wander;

namespace {

AnalyticMap shifted_phi(cplx shift) {
  return {[shift](cplx z) { return 5.0 * z + shift; }, [](cplx) { return cplx(5.0); }};
}

std::pair<double, double> im_range(const PolyLoop& loop) {
  double lo = INFINITY, hi = -INFINITY;
  for (cplx v : loop) {
    lo = std::min(lo, v.imag());
    hi = std::max(hi, v.imag());
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("build_scaffold: strips, N table and interval proof") {
  const auto start = std::chrono::steady_clock::now();
  const ScaffoldConfig c = build_scaffold(4, 10.0);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 1.0);
  CHECK(c.s[0].lo() == 1.0);
  CHECK(c.s[0].hi() == 2.0);
  CHECK(c.t[0].lo() == 3.0);
  CHECK(c.t[0].hi() == 4.0);
  for (double x : {0.0, 1.0, 7.5}) CHECK(c.t_index(cplx(x, 3.5)) == 0);
  CHECK(c.n_table == std::vector<long long>{0, 2, 5, 9, 14});
  CHECK(stage_count(1) == 2);
  CHECK(stage_count(2) == 5);
  CHECK(stage_count(3) == 9);
  for (int j = 0; j < 30; ++j) CHECK(stage_count(j + 1) == stage_count(j) + j + 2);
  // 3 inclusions per j < J_max, window and N checks, and the D separation.
  CHECK(c.proof.size() == 3 * 4 + 5 + 2 * 4 + 1);
  CHECK(c.im_max() == (3125.0 + 15.0) / 4.0);
  CHECK(c.in_shrunk(0, cplx(0.0, 1.1)));
  CHECK_FALSE(c.in_shrunk(0, cplx(0.0, 1.09)));
}

TEST_CASE("scaffold inclusions hold on random points (float oracle)") {
  const ScaffoldConfig c = build_scaffold(4, 10.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 500; ++k) {
      // A point of S_{j+1} or T_{j+1} has its Phi-preimage in S_j.
      const StripBounds& b = (k % 2) ? c.s[j + 1] : c.t[j + 1];
      const cplx w(20.0 * u(rng) - 10.0, b.lo() + b.height() * (0.001 + 0.998 * u(rng)));
      CHECK(c.s[j].contains(w / 5.0));
    }
  for (int k = 0; k < 500; ++k) {
    const cplx z = std::polar(0.5 * std::sqrt(u(rng)), 2.0 * kPi * u(rng));
    CHECK(c.s_index(z) < 0);
  }
}

TEST_CASE("build_scaffold errors and config dump") {
  CHECK_THROWS_AS(build_scaffold(0, 10.0), Error);
  CHECK_THROWS_WITH_AS(build_scaffold(3, 5.0), doctest::Contains("window too small"), Error);
  CHECK_THROWS_AS(build_scaffold(25, 10.0), Error);
  const ScaffoldConfig c = build_scaffold(2, 12.5);
  c.write("scaffold_dump.txt");
  const KeyValues kv = read_key_values("scaffold_dump.txt");
  CHECK(kv.get_int("j_max") == 2);
  CHECK(kv.get_double("r_max") == 12.5);
  CHECK(kv.get("s.2") == "124 128");
  CHECK(kv.get("t.1") == "32 36");
  CHECK(kv.get_int("n.2") == 5);
  std::remove("scaffold_dump.txt");
}

TEST_CASE("locate_V with exact Phi") {
  const ScaffoldConfig c = build_scaffold(3, 10.0);
  const VDomain v1 = locate_V(phi_map(), 1, c);
  auto [lo1, hi1] = im_range(v1.boundary());
  CHECK(lo1 == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(hi1 == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(std::abs(v1.s0 - cplx(0.0, 1.7)) < 1e-9);
  CHECK(v1.samples_checked > 0);
  CHECK(v1.derivative_min == 5.0);
  CHECK(v1.derivative_max == 5.0);
  const VDomain v2 = locate_V(phi_map(), 2, c);
  auto [lo2, hi2] = im_range(v2.boundary());
  CHECK(lo2 == doctest::Approx(1.32).epsilon(1e-12));
  CHECK(hi2 == doctest::Approx(1.36).epsilon(1e-12));
  REQUIRE(v2.images.size() == 3);
  auto [lo21, hi21] = im_range(v2.images[1]);
  CHECK(lo21 == doctest::Approx(6.6).epsilon(1e-12));
  CHECK(hi21 == doctest::Approx(6.8).epsilon(1e-12));
  CHECK_THROWS_AS(locate_V(phi_map(), 4, c), Error);
}

TEST_CASE("locate_V for perturbed maps") {
  const ScaffoldConfig c = build_scaffold(3, 10.0);
  const AnalyticMap f = shifted_phi(std::polar(0.3, 0.7));
  for (int j = 1; j <= 3; ++j) {
    const VDomain v = locate_V(f, j, c);
    for (cplx z : v.boundary()) CHECK(c.s[0].contains(z));
    for (cplx z : v.samples(8)) {
      cplx x = z;
      for (int k = 0; k < j; ++k) x = f.value(x);
      CHECK(c.t[j].contains(x));
    }
    CHECK(v.contains(v.s0));
  }
  // A map that pushes S_0 above S_1 cannot carry T_1 back into S~_0.
  CHECK_THROWS_WITH_AS(locate_V(shifted_phi(cplx(0.0, 3.0)), 1, c), doctest::Contains("scaffold breach"), Error);
}

TEST_CASE("verify_expansion") {
  const ScaffoldConfig c = build_scaffold(2, 10.0);
  const auto samples = expansion_samples(c, 120);
  REQUIRE(samples.size() > 100);
  const auto exact = verify_expansion(phi_map(), c, samples, 0.0);
  CHECK(exact.passed());
  CHECK(exact.min_ratio == 5.0);
  const auto shifted = verify_expansion(shifted_phi(0.4), c, samples);
  CHECK(shifted.passed());
  CHECK(shifted.min_ratio >= 4.6 - 1e-12);
  CHECK(shifted.min_ratio == doctest::Approx(4.6));
  const auto lying = verify_expansion(shifted_phi(0.6), c, samples, 0.49);
  CHECK_FALSE(lying.certificate_consistent);
  CHECK_FALSE(lying.passed());
  const auto broken = verify_expansion(shifted_phi(1.5), c, samples);
  CHECK_FALSE(broken.failing.empty());
  CHECK(broken.failing.front().real() < 0.0);
  CHECK_THROWS_AS(verify_expansion(phi_map(), c, {cplx(0.5, 1.5)}), Error);
}

TEST_CASE("empirical epsilon and the oracle f0") {
  const ScaffoldConfig c = build_scaffold(2, 10.0);
  const double eps = empirical_epsilon(c);
  // Phi + c pulls T_1 = {8 < Im < 9} to Im (y - Im c)/5, inside S~_0 = [1.1, 1.9]
  // only while Im c > -1/2; the grid point 0.5 sits exactly on the edge.
  CHECK(eps == doctest::Approx(0.45));
  // Oracle mode: g0 itself passes every scaffold contract.
  const AnalyticMap g0 = g0_oracle();
  CHECK(verify_expansion(g0, c, expansion_samples(c, 60), 0.0).passed());
  for (int j = 1; j <= 2; ++j) CHECK_NOTHROW(locate_V(g0, j, c));
  for (cplx z : disc_set(0.0, 0.5, 0.01).boundary_samples(0.01)) CHECK(c.in_d(g0(z)));
}

TEST_CASE("g0 plan is a valid Runge plan; f0 fit failure propagates") {
  const ScaffoldConfig c = build_scaffold(1, 10.0);
  const PiecewisePlan plan = g0_plan(c);
  CHECK(plan.pieces.size() == 3);
  CHECK_NOTHROW(plan.validate());
  CHECK(plan.min_separation() == doctest::Approx(0.5).epsilon(0.02));
  FitOptions small;
  small.degree_cap = 16;
  CHECK_THROWS_WITH_AS(build_f0(c, 0.2, 0.95, small), doctest::Contains("fit failed"), Error);
  CHECK_THROWS_AS(build_f0(c, 0.0, 0.95, small), Error);
}
