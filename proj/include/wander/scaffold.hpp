#pragma once

// Strip scaffolding: S_j, T_j = S_j + 2i, the expansion Phi(z) = 5z, the
// disc D = D(0, 1/2), the base function f0 and the pulled-back domains V_j.
// Strip bounds are exact: every bound is an integer over 4.

#include <limits>
#include <string>
#include <vector>

#include "wander/approx.hpp"
#include "wander/geometry.hpp"

namespace wander {

/// Open horizontal strip {lo4 < 4 Im z < hi4}.
struct StripBounds {
  long long lo4 = 0;
  long long hi4 = 0;

  double lo() const { return static_cast<double>(lo4) / 4.0; }
  double hi() const { return static_cast<double>(hi4) / 4.0; }
  double height() const { return static_cast<double>(hi4 - lo4) / 4.0; }
  bool contains(cplx z) const { return 4.0 * z.imag() > lo4 && 4.0 * z.imag() < hi4; }
  bool closure_contains(cplx z) const { return 4.0 * z.imag() >= lo4 && 4.0 * z.imag() <= hi4; }
};

struct ScaffoldConfig {
  int j_max = 0;
  double r_max = 0.0;
  /// Window is |Re z| <= r_max, |Im z| <= im_max4 / 4.
  long long im_max4 = 0;
  std::vector<StripBounds> s;  // S_0..S_{j_max}
  std::vector<StripBounds> t;  // T_0..T_{j_max}
  std::vector<long long> n_table;  // N_0..N_{j_max}
  double d_radius = 0.5;
  double shrink = 0.1;
  /// One line per interval check, "name: lhs <= rhs" with exact integers.
  std::vector<std::string> proof;

  double im_max() const { return static_cast<double>(im_max4) / 4.0; }
  bool in_window(cplx z) const { return std::abs(z.real()) <= r_max && std::abs(z.imag()) <= im_max(); }
  /// k with z in S_k, else -1. Strips are disjoint.
  int s_index(cplx z) const;
  int t_index(cplx z) const;
  bool in_d(cplx z) const { return std::abs(z) < d_radius; }
  /// Shrunk strip S~_k: points of S_k at distance >= 1/10 from its boundary.
  bool in_shrunk(int k, cplx z) const;

  void write(const std::string& path) const;
};

/// N_j = j(j+3)/2.
long long stage_count(int j);

/// Pre: 1 <= j_max <= 24 (strip bounds stay exact in 64-bit integers) and
/// r_max >= 10. Every invariant is checked in exact integer arithmetic.
ScaffoldConfig build_scaffold(int j_max, double r_max);

/// The truncated strip S_k or T_k as a rectangle |Re z| <= half_width.
PolyLoop strip_rectangle(const StripBounds& b, double half_width, double inset = 0.0);

/// Phi(z) = 5z.
AnalyticMap phi_map();
/// Exact stand-in for f0: 0 near D, Phi elsewhere (analytic on each piece of A_0).
AnalyticMap g0_oracle();

/// The A_0 plan: D with rule 0, and each S_k truncated to the window with rule Phi.
PiecewisePlan g0_plan(const ScaffoldConfig& config);

struct F0Result {
  CertifiedPolynomial f0;
  double epsilon0 = 0.0;  // the certified target min(cap, 1/5, eps_emp / 2)
  double d_margin = 0.0;  // 1/2 - max |f0| on D-boundary samples
};

/// Fits g0 on A_0 to min(eps_cap, 1/5, eps_emp / 2) and checks f0(D) inside D
/// on samples. Fit errors propagate.
F0Result build_f0(const ScaffoldConfig& config, double eps_cap, double eps_emp, const FitOptions& options = {});

struct ExpansionReport {
  std::size_t samples = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  std::vector<cplx> failing;
  double max_deviation = 0.0;  // max |f - Phi| on the samples
  double claimed_epsilon = std::numeric_limits<double>::infinity();
  bool certificate_consistent = true;

  bool passed() const { return failing.empty() && certificate_consistent; }
};

/// Grid samples of S_k with |Re z| >= 1 inside the window, `per_strip` per strip.
std::vector<cplx> expansion_samples(const ScaffoldConfig& config, int per_strip);

/// Checks |Re f(z)| > 4 |Re z| on every sample, and |f - Phi| <= claimed_epsilon.
ExpansionReport verify_expansion(const AnalyticMap& f, const ScaffoldConfig& config, const std::vector<cplx>& samples,
                                 double claimed_epsilon = std::numeric_limits<double>::infinity());

struct VDomain {
  int level = 0;
  /// images[k] = V_j^k as a closed polygon; images[0] = V_j, images[j] the truncated T_j.
  std::vector<PolyLoop> images;
  /// Point of V_j on Re z = 0 (midway across).
  cplx s0{};
  /// |f'| range over the pulled-back boundary points of V_j^0..V_j^{j-1}.
  double derivative_min = 0.0;
  double derivative_max = 0.0;
  std::size_t samples_checked = 0;

  const PolyLoop& boundary() const { return images.front(); }
  bool contains(cplx z) const { return point_in_polygon(images.front(), z); }
  /// Interior samples of V_j on a lattice `per_height` points across.
  std::vector<cplx> samples(int per_height) const;
};

/// Pulls T_j (truncated at |Re z| <= 4 R_max) back through S~_{j-1}, ..., S~_0 with Newton
/// inversion, then checks the forward contracts on interior samples.
/// Throws ScaffoldBreach when a pullback leaves S~_k or a contract fails.
VDomain locate_V(const AnalyticMap& f, int j, const ScaffoldConfig& config, int boundary_points = 512);

/// Largest eps on a 1/20 grid such that every constant shift Phi + eps e^{i theta}
/// (8 directions) passes verify_expansion and locate_V for j <= min(2, j_max).
double empirical_epsilon(const ScaffoldConfig& config);

}  // namespace wander
