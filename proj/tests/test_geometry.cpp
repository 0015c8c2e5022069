#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "wander/geometry.hpp"
#include "wander/kernels.hpp"
#include "wander/wada.hpp"

using namespace wander;

namespace {

Window unit_window(int n) { return Window::around({-2.0, -2.0}, {2.0, 2.0}, 4.0 / n); }

Mask square_outline(const Window& w, double half, double thickness) {
  Mask m(w.size(), 0);
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) {
      const cplx z = w.center(i, j);
      const double r = std::max(std::abs(z.real()), std::abs(z.imag()));
      m[w.index(i, j)] = (r <= half && r >= half - thickness) ? 1 : 0;
    }
  return m;
}

Mask rasterize_loops(const Window& w, const std::vector<PolyLoop>& loops) {
  Mask out(w.size(), 0);
  for (const auto& loop : loops) {
    const Mask one = rasterize_polygon(w, loop);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] |= one[k];
  }
  return out;
}

// Brute-force Euclidean distance from a point to the nearest masked cell center.
double brute_distance(const Window& w, const Mask& m, cplx z) {
  double best = INFINITY;
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i)
      if (m[w.index(i, j)]) best = std::min(best, std::abs(w.center(i, j) - z));
  return best;
}

}  // namespace

TEST_CASE("fill closes the hole of a hollow square") {
  const Window w = unit_window(80);
  const Mask outline = square_outline(w, 1.0, 0.2);
  const CompactSet set = fill_compact(w, outline);
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) {
      const cplx z = w.center(i, j);
      const bool in_square = std::max(std::abs(z.real()), std::abs(z.imag())) <= 1.0;
      CHECK(static_cast<bool>(set.mask[w.index(i, j)]) == in_square);
    }
  CHECK(set.loops.size() == 1);
}

TEST_CASE("fill of an annulus is the full disc") {
  const Window w = unit_window(100);
  const Mask outer = rasterize_disc(w, 0.0, 1.5);
  const Mask inner = rasterize_disc(w, 0.0, 0.7);
  Mask annulus(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) annulus[k] = outer[k] && !inner[k];
  const CompactSet set = fill_compact(w, annulus);
  CHECK(set.mask == outer);
}

TEST_CASE("fill keeps two disjoint discs") {
  const Window w = unit_window(100);
  Mask two = rasterize_disc(w, cplx(-1.0, 0.0), 0.5);
  const Mask b = rasterize_disc(w, cplx(1.0, 0.0), 0.5);
  for (std::size_t k = 0; k < w.size(); ++k) two[k] |= b[k];
  const CompactSet set = fill_compact(w, two);
  CHECK(set.mask == two);
  CHECK(set.loops.size() == 2);
  CHECK(label_components(w.nx, w.ny, set.mask, Connectivity::Four).count == 2);
}

TEST_CASE("fill is idempotent and rejects frame contact") {
  const Window w = unit_window(64);
  const CompactSet once = fill_compact(w, square_outline(w, 1.2, 0.1));
  const CompactSet twice = fill_compact(w, once.mask);
  CHECK(once.mask == twice.mask);
  CHECK(is_full(w, once.mask));

  Mask edge(w.size(), 0);
  edge[w.index(0, 10)] = 1;
  CHECK_THROWS_WITH_AS(fill_compact(w, edge), doctest::Contains("truncation overflow"), Error);
  CHECK_THROWS_AS(fill_compact(w, Mask(w.size(), 0)), Error);
}

TEST_CASE("loops are simple and rasterize back to the mask") {
  const Window w = unit_window(96);
  Mask blob = rasterize_disc(w, cplx(-0.5, 0.2), 0.8);
  const Mask other = rasterize_disc(w, cplx(0.9, -0.6), 0.5);
  for (std::size_t k = 0; k < w.size(); ++k) blob[k] |= other[k];
  const CompactSet set = fill_compact(w, blob);
  for (const auto& loop : set.loops) CHECK(is_simple(loop));
  CHECK(rasterize_loops(w, set.loops) == set.mask);
}

TEST_CASE("distance transform matches brute force, serial equals parallel") {
  const Window w = Window::around({0.0, 0.0}, {1.0, 0.75}, 1.0 / 40);
  std::mt19937_64 rng(7);
  Mask m(w.size(), 0);
  for (auto& v : m) v = (rng() % 37) == 0;
  const auto par = kernels::squared_distance_transform(w.nx, w.ny, m);
  const auto ser = kernels::serial::squared_distance_transform(w.nx, w.ny, m);
  CHECK(par == ser);
  const auto d2 = distance_to_mask(w, m);
  for (int j = 0; j < w.ny; j += 3)
    for (int i = 0; i < w.nx; i += 3)
      CHECK(std::sqrt(d2[w.index(i, j)]) == doctest::Approx(brute_distance(w, m, w.center(i, j))).epsilon(1e-12));
}

TEST_CASE("shell of the unit disc at j = 2 is the disc of radius 1.5") {
  const CompactSet k = disc_set(0.0, 1.0, 0.02, 80);
  const ShellSequence seq = shell_sequence(k, 2);
  const CompactSet& s2 = seq.shells[1];
  const double cell = k.window.cell;
  for (int j = 0; j < k.window.ny; ++j)
    for (int i = 0; i < k.window.nx; ++i) {
      const double r = std::abs(k.window.center(i, j));
      if (r <= 1.5 - cell) CHECK(s2.mask[k.window.index(i, j)] == 1);
      if (r >= 1.5 + cell) CHECK(s2.mask[k.window.index(i, j)] == 0);
    }
}

TEST_CASE("shells nest strictly and stay within 1/j of K") {
  const Window w = unit_window(200);
  Mask region = rasterize_disc(w, cplx(-0.2, 0.1), 0.3);
  const Mask arm = rasterize_disc(w, cplx(0.25, -0.1), 0.2);
  for (std::size_t k = 0; k < w.size(); ++k) region[k] |= arm[k];
  const CompactSet k = fill_compact(w, region);
  const ShellSequence seq = shell_sequence(k, 4, {0.8, 0.5, 0.3, 0.15});
  for (std::size_t m = 0; m < seq.shells.size(); ++m) {
    CHECK(seq.shells[m].max_distance_to(k) <= seq.radii[m] + w.cell);
    for (const auto& loop : seq.shells[m].loops) CHECK(is_simple(loop));
    CHECK(is_full(w, seq.shells[m].mask));
  }
  for (std::size_t m = 0; m + 1 < seq.shells.size(); ++m) {
    // next shell plus a one-cell margin inside the current shell
    const Mask grown = dilate(w, seq.shells[m + 1].mask, w.cell * 1.01);
    for (std::size_t c = 0; c < w.size(); ++c)
      if (grown[c]) CHECK(seq.shells[m].mask[c] == 1);
  }
  // Default radii 1/j on a roomy window.
  const CompactSet small = disc_set(0.0, 0.25, 0.02, 70);
  const ShellSequence def = shell_sequence(small, 3);
  for (int m = 0; m < 3; ++m) {
    CHECK(def.radii[m] == doctest::Approx(1.0 / (m + 1)));
    CHECK(def.shells[m].max_distance_to(small) <= 1.0 / (m + 1) + small.window.cell);
  }
}

TEST_CASE("single shell strictly contains K; overflow when the window is tight") {
  const CompactSet k = disc_set(0.0, 0.5, 0.02, 40);
  const ShellSequence seq = shell_sequence(k, 1, {0.3});
  CHECK(seq.shells.size() == 1);
  CHECK(seq.shells[0].cell_count() > k.cell_count());
  for (std::size_t c = 0; c < k.mask.size(); ++c)
    if (k.mask[c]) CHECK(seq.shells[0].mask[c] == 1);
  CHECK_THROWS_WITH_AS(shell_sequence(k, 1), doctest::Contains("truncation overflow"), Error);
}

TEST_CASE("boundary net on the unit square at j = 3") {
  const Window w = Window::around({-0.5, -0.5}, {1.5, 1.5}, 1.0 / 64);
  Mask sq(w.size(), 0);
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) {
      const cplx z = w.center(i, j);
      sq[w.index(i, j)] = z.real() > 0 && z.real() < 1 && z.imag() > 0 && z.imag() < 1;
    }
  const CompactSet square = fill_compact(w, sq);
  const BoundaryNet net = boundary_net(square, 3, NetMode::Full);
  // Oracle: perimeter / spacing.
  CHECK(net.points.size() >= static_cast<std::size_t>(std::floor(square.perimeter() / 0.125)));
  CHECK(net.points.size() >= 32);
  for (const auto& loop : square.loops)
    for (cplx v : loop) {
      double best = INFINITY;
      for (cplx p : net.points) best = std::min(best, std::abs(p - v));
      CHECK(best <= 0.125);
    }
  const BoundaryNet coarse = boundary_net(square, 0, NetMode::Full);
  for (cplx v : square.loops[0]) {
    double best = INFINITY;
    for (cplx p : coarse.points) best = std::min(best, std::abs(p - v));
    CHECK(best <= 1.0);
  }
  CHECK_THROWS_WITH_AS(boundary_net(square, 8, NetMode::Full), doctest::Contains("resolution exceeded"), Error);
}

TEST_CASE("minus-arc net excludes an arc of diameter at most 2^-j") {
  const CompactSet k = disc_set(0.0, 0.4, 1.0 / 256, 100);
  const ShellSequence seq = shell_sequence(k, 1, {0.3});
  const int level = 4;
  const cplx anchor(0.7, 0.0);
  const BoundaryNet net = boundary_net(seq, 0, level, NetMode::MinusArc, anchor);
  const double s = std::ldexp(1.0, -level);
  CHECK(net.arc_diameter <= s);
  // Loop vertices not covered by the net form the excluded arc.
  std::vector<cplx> uncovered;
  for (const auto& loop : seq.shells[0].loops)
    for (cplx v : loop) {
      double best = INFINITY;
      for (cplx p : net.points) best = std::min(best, std::abs(p - v));
      if (best > s) uncovered.push_back(v);
    }
  double diam = 0.0;
  for (cplx a : uncovered)
    for (cplx b : uncovered) diam = std::max(diam, std::abs(a - b));
  CHECK(diam <= s);
  // The excluded arc sits at the requested center.
  double closest = INFINITY;
  for (cplx p : net.points) closest = std::min(closest, std::abs(p - anchor));
  CHECK(closest > 0.25 * s);
  CHECK(net.sampling_density > 0.0);
  CHECK_THROWS_AS(boundary_net(seq, 3, level, NetMode::Full), Error);
}

TEST_CASE("compact set round-trips through PBM and sidecar") {
  const CompactSet k = disc_set(cplx(0.3, -0.2), 0.5, 0.03);
  const std::string stem = "geometry_roundtrip";
  write_compact_set(stem, k);
  const CompactSet back = read_compact_set(stem);
  CHECK(back.window == k.window);
  CHECK(back.mask == k.mask);
  REQUIRE(back.circle.has_value());
  CHECK(back.circle->radius == k.circle->radius);
  std::remove((stem + ".pbm").c_str());
  std::remove((stem + ".txt").c_str());
}

TEST_CASE("wada island before any canal") {
  const WadaIsland island = wada_build({.lakes = 2, .rounds = 0, .grid = 64});
  CHECK(island.bodies == 3);
  REQUIRE(island.distances.size() == 1);
  for (double d : island.distances[0]) {
    CHECK(std::isfinite(d));
    CHECK(d > 0.0);
  }
  CHECK(label_components(island.window.nx, island.window.ny, island.land.mask, Connectivity::Four).count == 1);
}

TEST_CASE("wada canals: monotone distances, connected land, separate waters") {
  const WadaIsland island = wada_build({.lakes = 2, .rounds = 5, .grid = 64});
  const Window& w = island.window;
  REQUIRE(island.distances.size() == 6);
  for (std::size_t r = 1; r < island.distances.size(); ++r)
    for (int b = 0; b < island.bodies; ++b) CHECK(island.distances[r][b] <= island.distances[r - 1][b]);
  // Independent oracle for the final round: brute-force distances.
  for (int b = 0; b < island.bodies; ++b) {
    const Mask water = island.water_mask(b);
    double worst = 0.0;
    for (int j = 0; j < w.ny; ++j)
      for (int i = 0; i < w.nx; ++i)
        if (island.body[w.index(i, j)] < 0) worst = std::max(worst, brute_distance(w, water, w.center(i, j)));
    CHECK(island.distances.back()[b] == doctest::Approx(worst).epsilon(1e-12));
  }
  CHECK(label_components(w.nx, w.ny, island.land.mask, Connectivity::Four).count == 1);
  Mask wet(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) wet[k] = island.body[k] >= 0;
  const Labels comps = label_components(w.nx, w.ny, wet, Connectivity::Eight);
  CHECK(comps.count == island.bodies);
  std::vector<int> body_of_component(comps.count + 1, -1);
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!wet[k]) continue;
    int& owner = body_of_component[comps.label[k]];
    if (owner < 0) owner = island.body[k];
    CHECK(owner == island.body[k]);
  }
  // Canals did shrink the land.
  CHECK(island.distances.back()[1] < island.distances.front()[1]);
}

TEST_CASE("wada preconditions") {
  CHECK_THROWS_AS(wada_build({.lakes = 1, .rounds = 1, .grid = 64}), Error);
  CHECK_THROWS_AS(wada_build({.lakes = 2, .rounds = 1, .grid = 32}), Error);
}
