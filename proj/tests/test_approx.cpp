#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "wander/approx.hpp"
#include "wander/kernels.hpp"

using namespace wander;

namespace {

AnalyticMap affine_map(cplx a, cplx b) {
  return {[a, b](cplx z) { return a * z + b; }, [a](cplx) { return a; }};
}

AnalyticMap square_map() {
  return {[](cplx z) { return z * z; }, [](cplx z) { return 2.0 * z; }};
}

PiecewisePlan two_disc_plan() {
  PiecewisePlan plan;
  plan.pieces.push_back({"disc0", disc_set(0.0, 1.0, 0.05), Rule::affine(1.0, 0.0)});
  plan.pieces.push_back({"disc6", disc_set(6.0, 1.0, 0.05), Rule::affine(1.0, 3.0)});
  return plan;
}

}  // namespace

TEST_CASE("Newton-basis Horner matches the explicit product form") {
  const std::vector<cplx> nodes{cplx(0.1, 0.2), cplx(-0.5, 0.0), cplx(0.3, -0.7)};
  const std::vector<cplx> coefs{cplx(1.0, 0.5), cplx(-2.0, 0.1), cplx(0.25, 0.0), cplx(0.0, 1.5)};
  const CertifiedPolynomial p(nodes, 0.8, coefs);
  for (cplx z : {cplx(0.0), cplx(1.2, -0.4), cplx(-3.0, 2.0)}) {
    cplx expect = 0.0, basis = 1.0;
    for (int k = 0; k <= 3; ++k) {
      expect += coefs[k] * basis;
      if (k < 3) basis *= (z - nodes[k]) / 0.8;
    }
    CHECK(std::abs(p(z) - expect) < 1e-13 * std::max(1.0, std::abs(expect)));
    const double h = 1e-6;
    const cplx fd = (p(z + h) - p(z - h)) / (2.0 * h);
    CHECK(std::abs(fd - p.derivative(z)) < 1e-6 * std::abs(p.derivative(z)));
  }
  const CertifiedPolynomial mono = CertifiedPolynomial::monomial(cplx(1.0, 1.0), 2.0, {0.0, 0.0, 4.0});
  CHECK(std::abs(mono(cplx(3.0, 1.0)) - 4.0) < 1e-15);  // ((3+i-(1+i))/2)^2 * 4
}

TEST_CASE("polynomial text round-trip is exact") {
  const CertifiedPolynomial p({cplx(0.1, 0.2), cplx(1.0 / 3.0, 0.0)}, 0.7, {cplx(1.0 / 7.0, 2.0), 0.3, cplx(0.0, -1e-300)});
  p.write("poly_roundtrip.txt");
  const CertifiedPolynomial back = CertifiedPolynomial::read("poly_roundtrip.txt");
  CHECK(back.coefficients() == p.coefficients());
  CHECK(back.nodes() == p.nodes());
  CHECK(back.scale() == p.scale());
  std::remove("poly_roundtrip.txt");
}

TEST_CASE("batch evaluation: parallel equals serial") {
  const CertifiedPolynomial p({cplx(0.1, 0.2), cplx(-0.5, 0.0)}, 1.3, {1.0, cplx(0.0, 2.0), 0.5});
  std::vector<cplx> z(1000), a(1000), b(1000);
  for (int k = 0; k < 1000; ++k) z[k] = std::polar(1.0 + k * 1e-3, 0.01 * k);
  kernels::evaluate_batch(p, z, a);
  kernels::serial::evaluate_batch(p, z, b);
  CHECK(a == b);
}

TEST_CASE("runge_fit: polynomial target is exact") {
  PiecewisePlan plan;
  plan.pieces.push_back({"unit", disc_set(0.0, 1.0, 0.05), Rule::composite(square_map(), "z^2")});
  const CertifiedPolynomial p = runge_fit(plan, 1e-12);
  CHECK(p.degree() == 2);
  CHECK(p.certificate.inflated_bound <= 1e-12);
  CHECK(p.certificate.inflated_bound >= p.certificate.measured_error);
}

TEST_CASE("runge_fit: two discs with rules z and z + 3") {
  const PiecewisePlan plan = two_disc_plan();
  const CertifiedPolynomial p = runge_fit(plan, 1e-6);
  const Certificate& c = p.certificate;
  CHECK(c.inflated_bound <= 1e-6);
  CHECK(c.validation_net_size >= 4 * c.fit_net_size - 64);
  CHECK(c.interior_samples > 0);
  // Soundness on 10^4 fresh samples.
  CHECK(audit_fit(p, plan, 10000, 99) <= c.inflated_bound);
}

TEST_CASE("runge_fit: identity target reproduces its basis representation") {
  PiecewisePlan single;
  single.pieces.push_back({"d", disc_set(cplx(0.5, -0.25), 0.75, 0.05), Rule::affine(1.0, 0.0)});
  const CertifiedPolynomial p = runge_fit(single, 1e-12);
  // z = z0 + rho * ((z - z0)/rho)
  CHECK(std::abs(p.coefficients()[0] - cplx(0.5, -0.25)) < 1e-10);
  CHECK(std::abs(p.coefficients()[1] - 0.75) < 1e-10);
  for (std::size_t k = 2; k < p.coefficients().size(); ++k) CHECK(std::abs(p.coefficients()[k]) < 1e-10);

  PiecewisePlan two;
  two.pieces.push_back({"a", disc_set(0.0, 1.0, 0.05), Rule::affine(1.0, 0.0)});
  two.pieces.push_back({"b", disc_set(4.0, 1.0, 0.05), Rule::affine(1.0, 0.0)});
  const CertifiedPolynomial q = runge_fit(two, 1e-12);
  CHECK(std::abs(q.coefficients()[0] - q.nodes()[0]) < 1e-10);
  CHECK(std::abs(q.coefficients()[1] - q.scale()) < 1e-10);
  for (std::size_t k = 2; k < q.coefficients().size(); ++k) CHECK(std::abs(q.coefficients()[k]) < 1e-10);
}

TEST_CASE("runge_fit: errors") {
  PiecewisePlan overlap;
  overlap.pieces.push_back({"a", disc_set(0.0, 1.0, 0.05), Rule::constant(0.0)});
  overlap.pieces.push_back({"b", disc_set(1.5, 1.0, 0.05), Rule::constant(1.0)});
  CHECK_THROWS_WITH_AS(runge_fit(overlap, 1e-3), doctest::Contains("overlap"), Error);
  CHECK_THROWS_AS(runge_fit(two_disc_plan(), 0.0), Error);
  PiecewisePlan hard;
  const AnalyticMap pole{[](cplx z) { return 1.0 / (z - 1.05); }, [](cplx z) { return -1.0 / ((z - 1.05) * (z - 1.05)); }};
  hard.pieces.push_back({"d", disc_set(0.0, 1.0, 0.05), Rule::composite(pole, "pole")});
  FitOptions opt;
  opt.degree_cap = 8;
  CHECK_THROWS_WITH_AS(runge_fit(hard, 1e-10, opt), doctest::Contains("best bound"), Error);
  // Nested annulus-like union (disc inside a ring) separates the plane.
  PiecewisePlan ring;
  const Window w = Window::around({-2.0, -2.0}, {2.0, 2.0}, 0.05);
  Mask m = rasterize_disc(w, 0.0, 1.5);
  const Mask hole = rasterize_disc(w, 0.0, 1.0);
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = m[k] && !hole[k];
  CompactSet annulus;
  annulus.window = w;
  annulus.mask = m;
  annulus.loops = extract_loops(w, m);
  ring.pieces.push_back({"ring", annulus, Rule::constant(0.0)});
  CHECK_THROWS_WITH_AS(ring.validate(), doctest::Contains("separates"), Error);
}

TEST_CASE("epsilon budget") {
  EpsilonBudget b;
  b.history = {0.2};
  CHECK(epsilon_next(b, 0.1) == 0.1);
  EpsilonBudget c;
  c.history = {0.2};
  CHECK(epsilon_next(c, 0.15) == 0.1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EpsilonBudget d;
  for (int k = 0; k < 40; ++k) epsilon_next(d, u(rng));
  CHECK(d.tail_invariant_holds());
  for (std::size_t k = 1; k < d.history.size(); ++k) CHECK(d.history[k] <= d.history[k - 1] / 2.0);
  CHECK_THROWS_AS(epsilon_next(d, -1.0), Error);
}

TEST_CASE("verify_injective examples") {
  const auto right = verify_injective(square_map(), disc_set(3.0, 0.5, 0.02), 0.05);
  CHECK(right.injective);
  CHECK(right.min_margin >= 1.0);
  const auto centered = verify_injective(square_map(), disc_set(0.0, 0.5, 0.02), 0.05);
  CHECK_FALSE(centered.injective);
  CHECK(centered.witness.has_value());
  const auto lin = verify_injective(affine_map(cplx(2.0, -1.0), 5.0), disc_set(cplx(1.0, 1.0), 0.7, 0.02), 0.05);
  CHECK(lin.injective);
}

TEST_CASE("verify_injective agrees with exhaustive pairwise comparison on small rasters") {
  // Raster centers are symmetric about 0, so z^2 collisions are exact.
  const Window w{-1.25, -1.25, 1.0 / 16, 40, 40};
  for (double c : {0.0, 0.1, 0.2, 0.55, 0.6, 0.7}) {
    const CompactSet k = fill_compact(w, rasterize_disc(w, cplx(c, 0.05), 0.35));
    std::vector<cplx> centers;
    for (int j = 0; j < w.ny; ++j)
      for (int i = 0; i < w.nx; ++i)
        if (k.mask[w.index(i, j)]) centers.push_back(w.center(i, j));
    bool brute = true;
    for (std::size_t a = 0; a < centers.size(); ++a)
      for (std::size_t b = a + 1; b < centers.size(); ++b)
        if (std::abs(centers[a] * centers[a] - centers[b] * centers[b]) < 1e-12) brute = false;
    CHECK(verify_injective(square_map(), centers, w.cell).injective == brute);
  }
}

TEST_CASE("invert_on_univalent") {
  const CompactSet big = disc_set(0.0, 4.0, 0.1);
  CHECK(std::abs(invert_on_univalent(affine_map(5.0, 0.0), big, 10.0) - 2.0) < 1e-12);
  CHECK(std::abs(invert_on_univalent(iterate_map(affine_map(5.0, 0.0), 2), big, 25.0) - 1.0) < 1e-12);

  const AnalyticMap f{[](cplx z) { return z + 0.2 * z * z; }, [](cplx z) { return 1.0 + 0.4 * z; }};
  const CompactSet dom = disc_set(0.0, 0.8, 0.02);
  const UnivalentInverse inv(f, dom, 0.05);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const cplx z = std::polar(0.8 * std::sqrt(u(rng)), 2.0 * kPi * u(rng));
    worst = std::max(worst, std::abs(inv(f(z)) - z));
  }
  CHECK(worst <= 1e-10);

  CHECK_THROWS_WITH_AS(invert_on_univalent(square_map(), disc_set(1.0, 0.5, 0.02), 4.0),
                       doctest::Contains("branch escape"), Error);
  const AnalyticMap flat{[](cplx) { return cplx(1.0); }, [](cplx) { return cplx(0.0); }};
  CHECK_THROWS_WITH_AS(invert_on_univalent(flat, disc_set(0.0, 1.0, 0.05), 0.0), doctest::Contains("inversion failure"),
                       Error);
}

TEST_CASE("iterates_close: affine oracle (1, 6, 31) e-9") {
  const AnalyticMap g = affine_map(5.0, 0.0);
  const AnalyticMap f = affine_map(5.0, 1e-9);
  const CompactSet k = disc_set(0.0, 1e-4, 1e-5);
  const auto dev = iterates_close(f, g, k, 3, 10.0);
  REQUIRE(dev.size() == 3);
  CHECK(std::abs(dev[0] - 1e-9) <= 1e-15);
  CHECK(std::abs(dev[1] - 6e-9) <= 1e-15);
  CHECK(std::abs(dev[2] - 31e-9) <= 1e-15);
  for (double d : iterates_close(g, g, k, 5, 10.0)) CHECK(d == 0.0);
  const auto grow = iterates_close(f, g, disc_set(cplx(0.0, 1.5), 0.1, 0.01), 4, 1e4);
  for (std::size_t n = 1; n < grow.size(); ++n) CHECK(grow[n] >= grow[n - 1]);
  CHECK_THROWS_WITH_AS(iterates_close(f, g, k, 3, 1e-5), doctest::Contains("truncation overflow"), Error);
}
