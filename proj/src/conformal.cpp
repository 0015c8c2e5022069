#include "wander/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace wander {

const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::Affine: return "affine";
    case StepKind::Exp: return "exp";
    case StepKind::Log: return "log";
    case StepKind::Mobius: return "mobius";
    case StepKind::Power2: return "power2";
    case StepKind::Cayley: return "cayley";
  }
  return "?";
}

cplx ChainStep::apply(cplx z) const {
  switch (kind) {
    case StepKind::Affine: return a * z + b;
    case StepKind::Exp: return std::exp(z);
    case StepKind::Log: return std::log(z);
    case StepKind::Mobius: return (a * z + b) / (c * z + d);
    case StepKind::Power2: return z * z;
    case StepKind::Cayley: return (1.0 + z) / (1.0 - z);
  }
  return z;
}

cplx ChainStep::derivative(cplx z) const {
  switch (kind) {
    case StepKind::Affine: return a;
    case StepKind::Exp: return std::exp(z);
    case StepKind::Log: return 1.0 / z;
    case StepKind::Mobius: {
      const cplx den = c * z + d;
      return (a * d - b * c) / (den * den);
    }
    case StepKind::Power2: return 2.0 * z;
    case StepKind::Cayley: {
      const cplx den = 1.0 - z;
      return 2.0 / (den * den);
    }
  }
  return 1.0;
}

ConformalChain& ConformalChain::then(ChainStep step) {
  steps.push_back(std::move(step));
  return *this;
}

namespace {

// exp, cayley, power2, mobius in a row: with E = e^z the power step gives
// C^2 = 1 + 4E/(1-E)^2, and forming C^2 - 1 by subtraction loses all digits
// once E is tiny (far out along a half-strip). Feed the Möbius step the
// offset form instead.
bool fused_run(const std::vector<ChainStep>& steps, std::size_t k) {
  return k + 3 < steps.size() && steps[k].kind == StepKind::Exp && steps[k + 1].kind == StepKind::Cayley &&
         steps[k + 2].kind == StepKind::Power2 && steps[k + 3].kind == StepKind::Mobius;
}

cplx fused_value(const ChainStep& mobius, cplx z) {
  const cplx e = std::exp(z);
  const cplx one_minus = 1.0 - e;
  const cplx offset = 4.0 * e / (one_minus * one_minus);  // C^2 - 1
  return (mobius.a * offset + (mobius.a + mobius.b)) / (mobius.c * offset + (mobius.c + mobius.d));
}

}  // namespace

cplx ConformalChain::operator()(cplx z) const {
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (fused_run(steps, k)) {
      z = fused_value(steps[k + 3], z);
      k += 3;
      continue;
    }
    z = steps[k].apply(z);
  }
  return z;
}

cplx ConformalChain::derivative(cplx z) const {
  cplx d = 1.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (fused_run(steps, k)) {
      // Same product of step derivatives, with the Möbius denominator taken
      // in offset form.
      const cplx e = std::exp(z);
      const cplx one_minus = 1.0 - e;
      const cplx c = (1.0 + e) / one_minus;
      const cplx offset = 4.0 * e / (one_minus * one_minus);
      const ChainStep& m = steps[k + 3];
      const cplx den = m.c * offset + (m.c + m.d);
      d *= e * (2.0 / (one_minus * one_minus)) * (2.0 * c) * ((m.a * m.d - m.b * m.c) / (den * den));
      z = fused_value(m, z);
      k += 3;
      continue;
    }
    d *= steps[k].derivative(z);
    z = steps[k].apply(z);
  }
  return d;
}

AnalyticMap ConformalChain::as_map() const {
  auto self = std::make_shared<const ConformalChain>(*this);
  return AnalyticMap{[self](cplx z) { return (*self)(z); }, [self](cplx z) { return self->derivative(z); }};
}

// One step per line: "<kind>: a b c d ; <domain>" with each coefficient as
// "re im" at 17 significant digits.
std::string ConformalChain::serialize() const {
  std::ostringstream out;
  for (const auto& s : steps)
    out << to_string(s.kind) << ": " << fmt17(s.a) << " " << fmt17(s.b) << " " << fmt17(s.c) << " " << fmt17(s.d)
        << " ; " << s.domain << "\n";
  return out.str();
}

ConformalChain ConformalChain::parse(const std::string& text) {
  ConformalChain chain;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto colon = line.find(':');
    const auto semi = line.find(';');
    if (colon == std::string::npos || semi == std::string::npos || semi < colon)
      throw Error(ErrorKind::Config, "malformed chain line: " + line);
    const std::string name = line.substr(0, colon);
    ChainStep step;
    bool known = false;
    for (StepKind k : {StepKind::Affine, StepKind::Exp, StepKind::Log, StepKind::Mobius, StepKind::Power2,
                       StepKind::Cayley})
      if (name == to_string(k)) {
        step.kind = k;
        known = true;
      }
    if (!known) throw Error(ErrorKind::Config, "unknown chain step: " + name);
    std::istringstream nums(line.substr(colon + 1, semi - colon - 1));
    double v[8];
    for (double& x : v)
      if (!(nums >> x)) throw Error(ErrorKind::Config, "chain step needs 8 numbers: " + line);
    step.a = {v[0], v[1]};
    step.b = {v[2], v[3]};
    step.c = {v[4], v[5]};
    step.d = {v[6], v[7]};
    step.domain = line.substr(semi + 1);
    if (!step.domain.empty() && step.domain.front() == ' ') step.domain.erase(0, 1);
    chain.steps.push_back(step);
  }
  return chain;
}

ChainStep affine_step(cplx a, cplx b, std::string domain) {
  return {StepKind::Affine, a, b, 0.0, 1.0, std::move(domain)};
}
ChainStep exp_step(std::string domain) { return {StepKind::Exp, 1.0, 0.0, 0.0, 1.0, std::move(domain)}; }
ChainStep log_step(std::string domain) { return {StepKind::Log, 1.0, 0.0, 0.0, 1.0, std::move(domain)}; }
ChainStep mobius_step(cplx a, cplx b, cplx c, cplx d, std::string domain) {
  return {StepKind::Mobius, a, b, c, d, std::move(domain)};
}
ChainStep power2_step(std::string domain) { return {StepKind::Power2, 1.0, 0.0, 0.0, 1.0, std::move(domain)}; }
ChainStep cayley_step(std::string domain) { return {StepKind::Cayley, 1.0, 0.0, 0.0, 1.0, std::move(domain)}; }

cplx disc_to_halfplane(cplx z) { return cplx(0.0, 1.0) * (1.0 - z) / (1.0 + z); }

// ---------------------------------------------------------------------------

ConformalChain halfstrip_chain(const HalfStrip& source, const Strip& target, cplx anchor, cplx image) {
  const cplx left_mid(source.x_end, 0.5 * (source.y_lo + source.y_hi));
  return halfstrip_chain(source, target, anchor, image, left_mid);
}

ConformalChain halfstrip_chain(const HalfStrip& source, const Strip& target, cplx anchor, cplx image,
                               cplx designated) {
  if (!(source.height() > 0.0) || !(target.height() > 0.0))
    throw Error(ErrorKind::Precondition, "half-strip and strip need positive height");
  if (!source.contains(anchor)) throw Error(ErrorKind::Precondition, "anchor outside the source half-strip");
  if (designated.real() != source.x_end || !(designated.imag() > source.y_lo && designated.imag() < source.y_hi))
    throw Error(ErrorKind::Precondition, "designated point must lie inside the left edge");
  const double h = source.height();
  ConformalChain chain;
  chain.then(affine_step(-kPi / h, (kPi / h) * cplx(source.x_end, source.y_hi), "source half-strip"))
      .then(exp_step("{Re < 0, 0 < Im < pi}"))
      .then(cayley_step("upper half-disc"))
      .then(power2_step("first quadrant"));
  // Image of the designated point on the negative real axis.
  const cplx q = chain(designated);
  const double qr = q.real();
  chain.then(mobius_step(1.0, -1.0, 1.0, -qr, "upper half-plane"));
  chain.then(log_step("upper half-plane"));
  const double scale = target.height() / kPi;
  const cplx w_anchor = chain(anchor);
  const double shift_re = image.real() + scale * w_anchor.real();
  chain.then(affine_step(-scale, cplx(shift_re, target.y_hi), "{0 < Im < pi}"));
  return chain;
}

// ---------------------------------------------------------------------------

cplx SpikeMap::psi(cplx z) const {
  cplx sum = 0.0;
  for (double p : spikes) sum += std::log(z - p);
  return cplx(0.0, kPi) - sum / static_cast<double>(spikes.size());
}

cplx SpikeMap::psi_derivative(cplx z) const {
  cplx sum = 0.0;
  for (double p : spikes) sum += 1.0 / (z - p);
  return -sum / static_cast<double>(spikes.size());
}

// phi(z) = s + A (Log(a e^{psi(M(rz))} + b) - Log(a e^{psi(i)} + b)), written as a
// difference so that phi(0) = s holds exactly. pi_scale = (A, a) and
// pi_shift = (b, unused) hold the strip automorphism parameters.
cplx SpikeMap::operator()(cplx z) const {
  const double A = pi_scale.real(), a = pi_scale.imag(), b = pi_shift.real();
  const cplx w = psi(disc_to_halfplane(blend_radius * z));
  const cplx w0 = psi(cplx(0.0, 1.0));
  return base_point_image + A * (std::log(a * std::exp(w) + b) - std::log(a * std::exp(w0) + b));
}

cplx SpikeMap::derivative(cplx z) const {
  const double A = pi_scale.real(), a = pi_scale.imag(), b = pi_shift.real();
  const cplx rz = blend_radius * z;
  const cplx m = disc_to_halfplane(rz);
  const cplx dm = cplx(0.0, -2.0) / ((1.0 + rz) * (1.0 + rz));
  const cplx w = psi(m);
  const cplx e = a * std::exp(w);
  return A * e / (e + b) * psi_derivative(m) * dm * blend_radius;
}

double SpikeMap::min_spike_real() const {
  double worst = INFINITY;
  for (cplx x : xi) worst = std::min(worst, (*this)(x).real());
  return worst;
}

AnalyticMap SpikeMap::as_map() const {
  auto self = std::make_shared<const SpikeMap>(*this);
  return AnalyticMap{[self](cplx z) { return (*self)(z); }, [self](cplx z) { return self->derivative(z); }};
}

SpikeMap spike_map(const std::vector<cplx>& xi, const Strip& sigma, cplx s, double threshold) {
  if (xi.empty()) throw Error(ErrorKind::Precondition, "spike map needs at least one boundary point");
  if (!sigma.contains(s)) throw Error(ErrorKind::Precondition, "base point outside the strip");
  SpikeMap map;
  map.strip = sigma;
  map.base_point_image = s;
  map.threshold = threshold;
  for (cplx x : xi) {
    if (std::abs(std::abs(x) - 1.0) > 1e-12) throw Error(ErrorKind::Precondition, "Xi must lie on the unit circle");
    const double theta = std::arg(x);
    if (std::abs(std::abs(theta) - kPi) < 1e-12) throw Error(ErrorKind::Precondition, "-1 must not be in Xi");
    map.xi.push_back(x);
    map.spikes.push_back(std::tan(0.5 * theta));  // M(e^{i theta}) = tan(theta / 2)
  }
  std::sort(map.spikes.begin(), map.spikes.end());

  // Strip automorphism: exp takes {0 < Im < pi} to H, where u -> a u + b
  // moves exp(psi(i)) onto the preimage of s; Log and the affine A w + c
  // return to Sigma.
  const double A = sigma.height() / kPi;
  const cplx target_u = std::exp((s - cplx(0.0, sigma.y_lo)) / A);
  const cplx t = std::exp(map.psi(cplx(0.0, 1.0)));
  const double a = target_u.imag() / t.imag();
  const double b = target_u.real() - a * t.real();
  map.pi_scale = cplx(A, a);
  map.pi_shift = cplx(b, 0.0);

  constexpr double r_max = 1.0 - 1e-6;
  map.blend_radius = r_max;
  if (!(map.min_spike_real() > threshold)) {
    std::ostringstream msg;
    msg << "max spike real part " << fmt17(map.min_spike_real()) << " at r = 1 - 1e-6 does not exceed R = "
        << fmt17(threshold);
    throw Error(ErrorKind::RUnreachable, msg.str());
  }
  double lo = 0.0, hi = r_max;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    map.blend_radius = mid;
    if (map.min_spike_real() > threshold)
      hi = mid;
    else
      lo = mid;
  }
  map.blend_radius = hi;
  return map;
}

// ---------------------------------------------------------------------------

double hyperbolic_lower_bound(double sep, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::Domain, "delta must be positive");
  if (!(sep >= 0.0)) throw Error(ErrorKind::Domain, "separation must be non-negative");
  return 0.5 * std::log1p(sep / (2.0 * delta));
}

cplx mobius_shell_map(cplx center, double radius, cplx point) {
  if (!(radius > 0.0)) throw Error(ErrorKind::Domain, "shell radius must be positive");
  if (!(std::abs(point - center) < radius)) throw Error(ErrorKind::Domain, "point outside the shell disc");
  return (point - center) / radius;
}

double koebe_margin(double delta, double eta) {
  if (!(delta > 0.0) || !(eta > 0.0)) throw Error(ErrorKind::Domain, "koebe margin needs positive inputs");
  return delta * eta / 4.0;
}

double halfplane_distance(cplx a, cplx b) {
  const double t = std::abs(a - b) / std::abs(a - std::conj(b));
  return std::log((1.0 + t) / (1.0 - t));
}

cplx slit_disc_to_halfplane(double a, cplx z) {
  const cplx w = cplx(0.0, 1.0) * (1.0 + z) / (1.0 - z);
  const double b = (1.0 + a) / (1.0 - a);
  const cplx s = w * w;
  const cplx u = (s + b * b) / s;
  return cplx(0.0, 1.0) * std::sqrt(-u);
}

}  // namespace wander
