// Serial reference kernels against their OpenMP versions. Prints one
// key: value block per kernel with both timings, the speedup and whether the
// outputs matched bit for bit.
//
//   bench_kernels [scale]   scale multiplies every problem size (default 1)

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>

#include "wander/approx.hpp"
#include "wander/dynamics.hpp"
#include "wander/geometry.hpp"
#include "wander/kernels.hpp"

using namespace wander;

namespace {

template <class F>
double best_seconds(F&& f, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, const std::string& size, double serial, double parallel, bool same) {
  std::cout << "[" << name << "]\n";
  std::cout << "size: " << size << "\n";
  std::cout << "serial_s: " << fmt17(serial) << "\n";
  std::cout << "parallel_s: " << fmt17(parallel) << "\n";
  std::cout << "speedup: " << fmt17(serial / parallel) << "\n";
  std::cout << "identical: " << (same ? "true" : "false") << "\n";
}

std::vector<cplx> random_points(std::size_t n, double r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-r, r);
  std::vector<cplx> z(n);
  for (auto& p : z) p = {u(rng), u(rng)};
  return z;
}

}  // namespace

int main(int argc, char** argv) {
  const int scale = argc > 1 ? std::max(1, std::atoi(argv[1])) : 1;
  std::cout << "threads: " << omp_get_max_threads() << "\n";

  {
    const int n = 1024 * scale;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
    std::mt19937_64 rng(1);
    for (auto& m : mask) m = (rng() % 997) == 0;
    std::vector<double> a, b;
    const double ts = best_seconds([&] { a = kernels::serial::squared_distance_transform(n, n, mask); });
    const double tp = best_seconds([&] { b = kernels::squared_distance_transform(n, n, mask); });
    report("distance_transform", std::to_string(n) + "x" + std::to_string(n), ts, tp, a == b);
  }

  {
    std::vector<cplx> coeffs(401);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& c : coeffs) c = {g(rng), g(rng)};
    const CertifiedPolynomial p = CertifiedPolynomial::monomial(0.0, 1.0, coeffs);
    const auto z = random_points(200000 * static_cast<std::size_t>(scale), 1.0, 3);
    std::vector<cplx> a(z.size()), b(z.size());
    const double ts = best_seconds([&] { kernels::serial::evaluate_batch(p, z, a); });
    const double tp = best_seconds([&] { kernels::evaluate_batch(p, z, b); });
    report("evaluate_batch", std::to_string(z.size()) + " points, degree 400", ts, tp, a == b);
  }

  {
    const int degree = 256;
    const auto z = random_points(8000 * static_cast<std::size_t>(scale), 1.0, 4);
    const auto nodes = random_points(degree + 1, 1.0, 5);
    std::vector<cplx> a(z.size() * (degree + 1)), b(a.size());
    const double ts = best_seconds([&] { kernels::serial::newton_design_matrix(z, nodes, 1.0, degree, a); });
    const double tp = best_seconds([&] { kernels::newton_design_matrix(z, nodes, 1.0, degree, b); });
    report("newton_design_matrix", std::to_string(z.size()) + " x " + std::to_string(degree + 1), ts, tp, a == b);
  }

  {
    const auto f = [](cplx z) { return z * z + cplx(-0.12, 0.74); };
    const auto z = random_points(500000 * static_cast<std::size_t>(scale), 1.5, 6);
    std::vector<std::int32_t> a(z.size()), b(z.size());
    const double ts = best_seconds([&] { kernels::serial::escape_counts(f, z, 200, 2.0, a); });
    const double tp = best_seconds([&] { kernels::escape_counts(f, z, 200, 2.0, b); });
    report("escape_counts", std::to_string(z.size()) + " points, 200 steps", ts, tp, a == b);
  }

  {
    const CompactSet u = disc_set(0.0, 1.0, 1.0 / 256.0);
    const auto upper = [](cplx z) { return z.imag() > 0.0; };
    const int walkers = 20000 * scale;
    HarmonicEstimate a, b;
    WalkOptions serial;
    serial.parallel = false;
    const double ts = best_seconds([&] { a = harmonic_measure_estimate(u, upper, walkers, 7, serial); }, 1);
    const double tp = best_seconds([&] { b = harmonic_measure_estimate(u, upper, walkers, 7); }, 1);
    report("walk_on_spheres", std::to_string(walkers) + " walkers", ts, tp, a.hits == b.hits && a.fraction == b.fraction);
  }
  return 0;
}
