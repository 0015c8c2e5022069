#pragma once

// Explicit conformal maps: Möbius shell maps, half-strip to strip chains,
// spike maps of the disc into a strip, and the metric estimates built on
// them.

#include <string>
#include <vector>

#include "wander/core.hpp"

namespace wander {

/// Horizontal strip {y_lo < Im z < y_hi}.
struct Strip {
  double y_lo = 0.0;
  double y_hi = 1.0;
  double height() const { return y_hi - y_lo; }
  bool contains(cplx z) const { return z.imag() > y_lo && z.imag() < y_hi; }
};

/// Horizontal half-strip {Re z > x_end, y_lo < Im z < y_hi}.
struct HalfStrip {
  double x_end = 0.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
  double height() const { return y_hi - y_lo; }
  bool contains(cplx z) const { return z.real() > x_end && z.imag() > y_lo && z.imag() < y_hi; }
};

enum class StepKind { Affine, Exp, Log, Mobius, Power2, Cayley };

/// One elementary map. Affine uses a z + b; Mobius uses (a z + b)/(c z + d);
/// Cayley is the fixed map (1 + z)/(1 - z).
struct ChainStep {
  StepKind kind = StepKind::Affine;
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};
  std::string domain;  // stated domain of validity, free text

  cplx apply(cplx z) const;
  cplx derivative(cplx z) const;
};

const char* to_string(StepKind kind);

class ConformalChain {
 public:
  std::vector<ChainStep> steps;

  ConformalChain& then(ChainStep step);
  cplx operator()(cplx z) const;
  /// Chain-rule product of the step derivatives.
  cplx derivative(cplx z) const;
  AnalyticMap as_map() const;

  std::string serialize() const;
  static ConformalChain parse(const std::string& text);
};

ChainStep affine_step(cplx a, cplx b, std::string domain = "C");
ChainStep exp_step(std::string domain = "C");
ChainStep log_step(std::string domain = "C minus (-inf, 0]");
ChainStep mobius_step(cplx a, cplx b, cplx c, cplx d, std::string domain);
ChainStep power2_step(std::string domain = "C");
ChainStep cayley_step(std::string domain = "C minus {1}");

/// M(z) = i (1 - z)/(1 + z), the disc onto the upper half-plane.
cplx disc_to_halfplane(cplx z);

/// Chain from a half-strip onto a strip per the seven-step list: +inf goes to
/// +inf, `designated` (a point of the left edge) goes to -inf. The final
/// translation is chosen so Re chain(anchor) = Re image; the imaginary part
/// of the anchor's image is fixed by the geometry.
ConformalChain halfstrip_chain(const HalfStrip& source, const Strip& target, cplx anchor, cplx image);
ConformalChain halfstrip_chain(const HalfStrip& source, const Strip& target, cplx anchor, cplx image,
                               cplx designated);

/// Maps the unit disc into a strip so that the finite set Xi on the unit
/// circle is pushed beyond Re > threshold: phi(z) = pi(psi(M(r z))).
struct SpikeMap {
  std::vector<cplx> xi;
  std::vector<double> spikes;  // M(xi), ascending
  Strip strip;
  double blend_radius = 0.0;
  cplx base_point_image{};
  double threshold = 0.0;
  cplx pi_scale{};  // final affine w -> pi_scale w + pi_shift
  cplx pi_shift{};

  /// psi(z) = pi i - (1/n) sum Log(z - p_j) on the upper half-plane.
  cplx psi(cplx z) const;
  cplx psi_derivative(cplx z) const;
  cplx operator()(cplx z) const;
  cplx derivative(cplx z) const;
  /// min over Xi of Re phi(xi) at the current blend radius.
  double min_spike_real() const;
  AnalyticMap as_map() const;
};

/// Bisection on r in (0, 1 - 1e-6] for the smallest r with Re phi(xi) > R
/// for every xi. Throws RUnreachable when even r = 1 - 1e-6 falls short.
SpikeMap spike_map(const std::vector<cplx>& xi, const Strip& sigma, cplx s, double threshold);

/// 1/2 ln(1 + sep / (2 delta)).
double hyperbolic_lower_bound(double sep, double delta);

/// (point - center) / radius; Domain error unless |point - center| < radius.
cplx mobius_shell_map(cplx center, double radius, cplx point);

/// delta * eta / 4.
double koebe_margin(double delta, double eta);

/// Hyperbolic distance (curvature -1) in the upper half-plane.
double halfplane_distance(cplx a, cplx b);

/// Conformal map of the unit disc slit along [a, 1) onto the upper half-plane.
cplx slit_disc_to_halfplane(double a, cplx z);

}  // namespace wander
