#include <cmath>
#include <random>

#include "doctest.h"
#include "wander/dynamics.hpp"

using namespace wander;

namespace {

AnalyticMap halve() {
  return {[](cplx z) { return 0.5 * z; }, [](cplx) { return cplx(0.5); }};
}

AnalyticMap square_map() {
  return {[](cplx z) { return z * z; }, [](cplx z) { return 2.0 * z; }};
}

// |z| alternates between 5^k and 1.
std::vector<cplx> alternating(cplx, int horizon) {
  std::vector<cplx> out;
  for (int n = 0; n < horizon; ++n) out.push_back(n % 2 ? cplx(0.0, std::pow(5.0, n)) : cplx(1.0));
  return out;
}

}  // namespace

TEST_CASE("orbit itinerary examples") {
  const ScaffoldConfig c = build_scaffold(4, 10.0);
  const OrbitRecord phi = orbit_itinerary(phi_map(), cplx(0.0, 1.25), 20, c);
  CHECK(itinerary_string(phi) == "S0 S1 S2 S3 S4 X");
  CHECK(labels_consistent(phi, c));
  // The real axis (outside D) misses every strip until the orbit leaves the window.
  const OrbitRecord real = orbit_itinerary(phi_map(), cplx(0.6, 0.0), 8, c);
  CHECK(itinerary_string(real) == "E E X");
  const OrbitRecord wide = orbit_itinerary(phi_map(), cplx(0.6, 0.0), 8, build_scaffold(4, 1e6));
  for (const auto& l : wide.labels) CHECK(l.kind == LabelKind::Elsewhere);
  CHECK(wide.points.size() == 8);
  const OrbitRecord in_d = orbit_itinerary(g0_oracle(), cplx(0.2, -0.1), 12, c);
  for (const auto& l : in_d.labels) CHECK(l.kind == LabelKind::InD);
  CHECK(label_point(cplx(0.0, 3.5), c).str() == "T0");
  // Tampered labels are detected.
  OrbitRecord bad = phi;
  bad.labels[1] = {LabelKind::InS, 3};
  CHECK_FALSE(labels_consistent(bad, c));
}

TEST_CASE("classify_point examples") {
  const ScaffoldConfig c = build_scaffold(4, 10.0);
  const Classification esc = classify_point(phi_map(), cplx(0.0, 1.25), 20, c);
  CHECK(esc.verdict == Verdict::EscapingCandidate);
  CHECK(esc.overflow);
  CHECK(classify_point(halve(), 1.0, 20, c).verdict == Verdict::Bounded);
  const Classification bu = classify_point(phi_map(), 0.0, 20, c, alternating);
  CHECK(bu.verdict == Verdict::BungeeCandidate);
  CHECK(bu.returns >= 2);
  CHECK_THROWS_AS(classify_point(phi_map(), 0.0, 5, c), Error);
}

TEST_CASE("classify_point verdicts only leave Undetermined as the horizon grows") {
  const ScaffoldConfig c = build_scaffold(2, 10.0);
  struct Case {
    AnalyticMap f;
    cplx z;
    OrbitOracle oracle;
  };
  const std::vector<Case> cases{{phi_map(), cplx(0.0, 1.25), {}},
                                {phi_map(), 0.0, alternating},
                                {halve(), 1.0, {}},
                                {phi_map(), cplx(0.5, 1.5), {}}};
  for (const auto& cs : cases) {
    Verdict prev = classify_point(cs.f, cs.z, 10, c, cs.oracle).verdict;
    for (int h = 11; h <= 40; ++h) {
      const Verdict v = classify_point(cs.f, cs.z, h, c, cs.oracle).verdict;
      if (prev != Verdict::Undetermined) CHECK(v == prev);
      prev = v;
    }
  }
}

TEST_CASE("maverick_detect") {
  CHECK(maverick_detect(square_map(), cplx(0.3, 0.2), cplx(0.3, 0.2), 40).score == 0.0);
  // Both orbits escape: spherical distance shrinks to zero.
  const double s1 = maverick_detect(phi_map(), cplx(0.0, 1.25), cplx(0.0, 1.3), 10).score;
  const double s2 = maverick_detect(phi_map(), cplx(0.0, 1.25), cplx(0.0, 1.3), 40).score;
  CHECK(s2 < s1);
  CHECK(s2 < 1e-10);
  // One escapes, the other falls to 0: distance between the pole and 0.
  const MaverickScore m = maverick_detect(square_map(), 2.0, 0.5, 40);
  CHECK(m.maverick);
  CHECK(m.score == doctest::Approx(2.0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 200; ++k) {
    const cplx a(u(rng), u(rng)), b(u(rng), u(rng));
    CHECK(maverick_detect(square_map(), a, b, 30).score == maverick_detect(square_map(), b, a, 30).score);
  }
  CHECK(chordal_distance(0.0, cplx(INFINITY, 0.0)) == 2.0);
}

TEST_CASE("harmonic measure: disc arcs against the closed form") {
  const CompactSet disc = disc_set(0.0, 1.0, 0.002);
  const double theta = 1.3;
  auto arc = [theta](cplx x) {
    double a = std::arg(x);
    if (a < 0.0) a += 2.0 * kPi;
    return a < theta;
  };
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const HarmonicEstimate e = harmonic_measure_estimate(disc, arc, 10000, seed);
    CHECK(e.discarded == 0);
    if (std::abs(e.fraction - theta / (2.0 * kPi)) <= 3.0 * e.sigma) ++covered;
  }
  CHECK(covered >= 18);
  CHECK(harmonic_measure_estimate(disc, [](cplx) { return true; }, 500, 3).fraction == 1.0);
  CHECK(harmonic_measure_estimate(disc, [](cplx) { return false; }, 500, 3).fraction == 0.0);
}

TEST_CASE("harmonic measure on a raster square; serial equals parallel") {
  const Window w = Window::around({-1.2, -1.2}, {1.2, 1.2}, 0.01);
  const CompactSet sq = polygon_set({cplx(-1, -1), cplx(1, -1), cplx(1, 1), cplx(-1, 1)}, 0.01);
  (void)w;
  auto right = [](cplx x) { return x.real() > std::abs(x.imag()); };
  WalkOptions par, ser;
  ser.parallel = false;
  const HarmonicEstimate a = harmonic_measure_estimate(sq, right, 8000, 77, par);
  const HarmonicEstimate b = harmonic_measure_estimate(sq, right, 8000, 77, ser);
  CHECK(a.hits == b.hits);
  CHECK(a.discarded == b.discarded);
  CHECK(std::abs(a.fraction - 0.25) <= 4.0 * a.sigma);
  WalkOptions capped;
  capped.step_cap = 1;
  const HarmonicEstimate c = harmonic_measure_estimate(sq, right, 100, 1, capped);
  CHECK(c.discarded == 100);
  CHECK_THROWS_AS(harmonic_measure_estimate(sq, right, 0, 1), Error);
}
