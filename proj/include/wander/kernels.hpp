#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version in
// `wander::kernels` and a plain sequential version in
// `wander::kernels::serial`. The two must agree bit for bit: every parallel
// loop writes disjoint output slots and reductions run in index order.

#include <cstdint>
#include <span>
#include <vector>

#include "wander/core.hpp"

namespace wander {

class CertifiedPolynomial;

namespace kernels {

/// Exact Euclidean squared distance transform on an nx-by-ny grid with unit
/// spacing (Felzenszwalb-Huttenlocher). Output entry (i, j) is the squared
/// distance from cell center (i, j) to the nearest cell with mask != 0, or
/// +inf when the mask is empty.
std::vector<double> squared_distance_transform(int nx, int ny, std::span<const std::uint8_t> mask);

void evaluate_batch(const CertifiedPolynomial& p, std::span<const cplx> z, std::span<cplx> out);

/// Rows are sample points, columns the Newton basis functions
/// prod_{i<k} (z - nodes[i]) / scale, k = 0..degree. Column-major output.
void newton_design_matrix(std::span<const cplx> z, std::span<const cplx> nodes, double scale, int degree,
                          std::span<cplx> out);

/// Which quantity the escape gate bounds.
enum class Gate { Modulus, AbsReal, AbsImag };

/// Escape-time counts: first n in [1, max_iter] with |f^n(z)| > gate (or
/// |Re|, |Im| per `kind`), or 0 if the orbit never crosses the gate. A
/// non-finite iterate counts as crossing.
void escape_counts(const std::function<cplx(cplx)>& f, std::span<const cplx> z, int max_iter, double gate,
                   std::span<std::int32_t> out, Gate kind = Gate::Modulus);

namespace serial {

std::vector<double> squared_distance_transform(int nx, int ny, std::span<const std::uint8_t> mask);
void evaluate_batch(const CertifiedPolynomial& p, std::span<const cplx> z, std::span<cplx> out);
void newton_design_matrix(std::span<const cplx> z, std::span<const cplx> nodes, double scale, int degree,
                          std::span<cplx> out);
void escape_counts(const std::function<cplx(cplx)>& f, std::span<const cplx> z, int max_iter, double gate,
                   std::span<std::int32_t> out, Gate kind = Gate::Modulus);

}  // namespace serial
}  // namespace kernels
}  // namespace wander
