#include "wander/kernels.hpp"

#include <cmath>
#include <limits>

#include "wander/approx.hpp"

namespace wander::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-dimensional squared distance transform of a sampled function
// (Felzenszwalb & Huttenlocher, lower envelope of parabolas).
void edt_1d(const double* f, double* d, int n, int* v, double* z) {
  int k = 0;
  int first = -1;
  for (int q = 0; q < n; ++q)
    if (f[q] < kInf) {
      first = q;
      break;
    }
  if (first < 0) {
    for (int q = 0; q < n; ++q) d[q] = kInf;
    return;
  }
  v[0] = first;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = first + 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

template <bool Parallel>
std::vector<double> edt_impl(int nx, int ny, std::span<const std::uint8_t> mask) {
  std::vector<double> grid(static_cast<std::size_t>(nx) * ny);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = mask[k] ? 0.0 : kInf;
  const int longest = nx > ny ? nx : ny;

  // Columns (fixed i, varying j).
#pragma omp parallel if (Parallel)
  {
    std::vector<double> f(longest), d(longest), z(longest + 1);
    std::vector<int> v(longest);
#pragma omp for schedule(static)
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) f[j] = grid[static_cast<std::size_t>(j) * nx + i];
      edt_1d(f.data(), d.data(), ny, v.data(), z.data());
      for (int j = 0; j < ny; ++j) grid[static_cast<std::size_t>(j) * nx + i] = d[j];
    }
  }
  // Rows.
#pragma omp parallel if (Parallel)
  {
    std::vector<double> d(longest), z(longest + 1);
    std::vector<int> v(longest);
#pragma omp for schedule(static)
    for (int j = 0; j < ny; ++j) {
      double* row = grid.data() + static_cast<std::size_t>(j) * nx;
      edt_1d(row, d.data(), nx, v.data(), z.data());
      for (int i = 0; i < nx; ++i) row[i] = d[i];
    }
  }
  return grid;
}

template <bool Parallel>
void evaluate_impl(const CertifiedPolynomial& p, std::span<const cplx> z, std::span<cplx> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = p(z[k]);
}

template <bool Parallel>
void design_impl(std::span<const cplx> z, std::span<const cplx> nodes, double scale, int degree,
                 std::span<cplx> out) {
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(z.size());
  const double inv = 1.0 / scale;
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t r = 0; r < m; ++r) {
    cplx b = 1.0;
    out[r] = b;
    for (int k = 1; k <= degree; ++k) {
      b *= (z[r] - nodes[k - 1]) * inv;
      out[static_cast<std::size_t>(k) * m + r] = b;
    }
  }
}

template <bool Parallel>
void escape_impl(const std::function<cplx(cplx)>& f, std::span<const cplx> z, int max_iter, double gate,
                 std::span<std::int32_t> out, Gate kind) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for schedule(dynamic, 64) if (Parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    cplx w = z[k];
    std::int32_t hit = 0;
    for (int it = 1; it <= max_iter; ++it) {
      w = f(w);
      const double size = kind == Gate::Modulus ? std::abs(w)
                          : kind == Gate::AbsReal ? std::abs(w.real())
                                                  : std::abs(w.imag());
      if (!(size <= gate) || !std::isfinite(std::abs(w))) {
        hit = it;
        break;
      }
    }
    out[k] = hit;
  }
}

}  // namespace

std::vector<double> squared_distance_transform(int nx, int ny, std::span<const std::uint8_t> mask) {
  return edt_impl<true>(nx, ny, mask);
}
void evaluate_batch(const CertifiedPolynomial& p, std::span<const cplx> z, std::span<cplx> out) {
  evaluate_impl<true>(p, z, out);
}
void newton_design_matrix(std::span<const cplx> z, std::span<const cplx> nodes, double scale, int degree,
                          std::span<cplx> out) {
  design_impl<true>(z, nodes, scale, degree, out);
}
void escape_counts(const std::function<cplx(cplx)>& f, std::span<const cplx> z, int max_iter, double gate,
                   std::span<std::int32_t> out, Gate kind) {
  escape_impl<true>(f, z, max_iter, gate, out, kind);
}

namespace serial {

std::vector<double> squared_distance_transform(int nx, int ny, std::span<const std::uint8_t> mask) {
  return edt_impl<false>(nx, ny, mask);
}
void evaluate_batch(const CertifiedPolynomial& p, std::span<const cplx> z, std::span<cplx> out) {
  evaluate_impl<false>(p, z, out);
}
void newton_design_matrix(std::span<const cplx> z, std::span<const cplx> nodes, double scale, int degree,
                          std::span<cplx> out) {
  design_impl<false>(z, nodes, scale, degree, out);
}
void escape_counts(const std::function<cplx(cplx)>& f, std::span<const cplx> z, int max_iter, double gate,
                   std::span<std::int32_t> out, Gate kind) {
  escape_impl<false>(f, z, max_iter, gate, out, kind);
}

}  // namespace serial
}  // namespace wander::kernels
