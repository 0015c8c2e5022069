#include "wander/scaffold.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wander {

namespace {

long long pow5(int e) {
  long long p = 1;
  for (int k = 0; k < e; ++k) p *= 5;
  return p;
}

std::string strip_text(const StripBounds& b) { return std::to_string(b.lo4) + " " + std::to_string(b.hi4); }

/// Adds "name: lhs <= rhs" to the proof and fails loudly if it does not hold.
void prove(std::vector<std::string>& proof, const std::string& name, long long lhs, long long rhs) {
  proof.push_back(name + ": " + std::to_string(lhs) + " <= " + std::to_string(rhs));
  if (lhs > rhs) throw Error(ErrorKind::ScaffoldBreach, "interval check failed: " + proof.back());
}

}  // namespace

long long stage_count(int j) {
  if (j < 0) throw Error(ErrorKind::Domain, "stage index must be non-negative");
  return static_cast<long long>(j) * (j + 3) / 2;
}

int ScaffoldConfig::s_index(cplx z) const {
  for (std::size_t k = 0; k < s.size(); ++k)
    if (s[k].contains(z)) return static_cast<int>(k);
  return -1;
}

int ScaffoldConfig::t_index(cplx z) const {
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k].contains(z)) return static_cast<int>(k);
  return -1;
}

bool ScaffoldConfig::in_shrunk(int k, cplx z) const {
  const StripBounds& b = s.at(static_cast<std::size_t>(k));
  const double y4 = 4.0 * z.imag();
  return y4 >= b.lo4 + 4.0 * shrink && y4 <= b.hi4 - 4.0 * shrink;
}

void ScaffoldConfig::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "# strip bounds are numerators over 4: S_j = {lo < 4 Im z < hi}\n";
  out << "j_max: " << j_max << "\n";
  out << "r_max: " << fmt17(r_max) << "\n";
  out << "im_max4: " << im_max4 << "\n";
  out << "d_radius: " << fmt17(d_radius) << "\n";
  out << "shrink: " << fmt17(shrink) << "\n";
  for (int j = 0; j <= j_max; ++j) {
    out << "s." << j << ": " << strip_text(s[j]) << "\n";
    out << "t." << j << ": " << strip_text(t[j]) << "\n";
    out << "n." << j << ": " << n_table[j] << "\n";
  }
  for (std::size_t k = 0; k < proof.size(); ++k) out << "proof." << k << ": " << proof[k] << "\n";
}

ScaffoldConfig build_scaffold(int j_max, double r_max) {
  if (j_max < 1) throw Error(ErrorKind::Precondition, "J_max must be at least 1");
  if (j_max > 24) throw Error(ErrorKind::Domain, "J_max above 24 leaves exact 64-bit strip arithmetic");
  if (!(r_max >= 10.0)) throw Error(ErrorKind::Precondition, "window too small: R_max must be at least 10");
  ScaffoldConfig c;
  c.j_max = j_max;
  c.r_max = r_max;
  c.im_max4 = pow5(j_max + 1) + 15;
  for (int j = 0; j <= j_max; ++j) {
    const long long p = pow5(j + 1);
    c.s.push_back({p - 1, p + 3});
    c.t.push_back({p + 7, p + 11});
    c.n_table.push_back(stage_count(j));
  }
  // Phi(S_j) = {5 lo < 4 Im z < 5 hi} must contain S_{j+1} and T_{j+1}, which
  // sit in that order with S_{j+1} below T_{j+1}.
  for (int j = 0; j < j_max; ++j) {
    const std::string tag = std::to_string(j);
    prove(c.proof, "phi(S_" + tag + ").lo <= S_" + std::to_string(j + 1) + ".lo", 5 * c.s[j].lo4, c.s[j + 1].lo4);
    prove(c.proof, "S_" + std::to_string(j + 1) + ".hi <= T_" + std::to_string(j + 1) + ".lo", c.s[j + 1].hi4,
          c.t[j + 1].lo4);
    prove(c.proof, "T_" + std::to_string(j + 1) + ".hi <= phi(S_" + tag + ").hi", c.t[j + 1].hi4, 5 * c.s[j].hi4);
  }
  for (int j = 0; j <= j_max; ++j) {
    const std::string tag = std::to_string(j);
    prove(c.proof, "T_" + tag + ".hi <= window", c.t[j].hi4, c.im_max4);
    if (j >= 1) {
      prove(c.proof, "N_" + tag + " = N_" + std::to_string(j - 1) + " + " + std::to_string(j + 1),
            c.n_table[j - 1] + j + 1, c.n_table[j]);
      prove(c.proof, "N_" + tag + " >= N_" + std::to_string(j - 1) + " + " + std::to_string(j + 1), c.n_table[j],
            c.n_table[j - 1] + j + 1);
    }
  }
  // D closure has 4 |Im z| <= 2 and S closure has 4 Im z >= 4: strictly apart.
  prove(c.proof, "4 * sup Im D + 1 <= S_0.lo", 2 + 1, c.s[0].lo4);
  return c;
}

PolyLoop strip_rectangle(const StripBounds& b, double half_width, double inset) {
  const double lo = b.lo() + inset, hi = b.hi() - inset;
  return {cplx(-half_width, lo), cplx(half_width, lo), cplx(half_width, hi), cplx(-half_width, hi)};
}

AnalyticMap phi_map() {
  return {[](cplx z) { return 5.0 * z; }, [](cplx) { return cplx(5.0); }};
}

AnalyticMap g0_oracle() {
  // D and S are separated by the line |z| = 3/4 on all of A_0.
  return {[](cplx z) { return std::abs(z) < 0.75 ? cplx(0.0) : 5.0 * z; },
          [](cplx z) { return std::abs(z) < 0.75 ? cplx(0.0) : cplx(5.0); }};
}

PiecewisePlan g0_plan(const ScaffoldConfig& config) {
  PiecewisePlan plan;
  plan.pieces.push_back({"D", disc_set(0.0, config.d_radius, config.d_radius / 64.0), Rule::constant(0.0)});
  for (int k = 0; k <= config.j_max; ++k) {
    const StripBounds& b = config.s[k];
    const double cell = std::max(b.height() / 16.0, 2.0 * config.r_max / 4096.0);
    plan.pieces.push_back(
        {"S_" + std::to_string(k), polygon_set(strip_rectangle(b, config.r_max), cell), Rule::affine(5.0, 0.0)});
  }
  return plan;
}

F0Result build_f0(const ScaffoldConfig& config, double eps_cap, double eps_emp, const FitOptions& options) {
  const double eps = std::min({eps_cap, 0.2, 0.5 * eps_emp});
  if (!(eps > 0.0)) throw Error(ErrorKind::Domain, "epsilon_0 must be positive");
  F0Result out{runge_fit(g0_plan(config), eps, options), eps, 0.0};
  double worst = 0.0;
  for (cplx z : disc_set(0.0, config.d_radius, config.d_radius / 64.0).boundary_samples(config.d_radius / 64.0))
    worst = std::max(worst, std::abs(out.f0(z)));
  out.d_margin = config.d_radius - worst;
  if (!(out.d_margin > 0.0))
    throw Error(ErrorKind::ScaffoldBreach, "f0 maps a point of the D boundary to |w| = " + fmt17(worst));
  return out;
}

std::vector<cplx> expansion_samples(const ScaffoldConfig& config, int per_strip) {
  std::vector<cplx> out;
  const int cols = std::max(1, per_strip / 6);
  for (const StripBounds& b : config.s)
    for (int row = 1; row <= 3; ++row) {
      const double y = b.lo() + 0.25 * row * b.height();
      for (int c = 0; c < cols; ++c) {
        const double x = cols == 1 ? 1.0 : 1.0 + (config.r_max - 1.0) * c / (cols - 1);
        out.emplace_back(x, y);
        out.emplace_back(-x, y);
      }
    }
  return out;
}

ExpansionReport verify_expansion(const AnalyticMap& f, const ScaffoldConfig& config, const std::vector<cplx>& samples,
                                 double claimed_epsilon) {
  ExpansionReport rep;
  rep.claimed_epsilon = claimed_epsilon;
  for (cplx z : samples) {
    if (config.s_index(z) < 0 || std::abs(z.real()) < 1.0 || !config.in_window(z))
      throw Error(ErrorKind::Precondition, "expansion sample " + fmt17(z) + " is not in S with |Re z| >= 1");
    const cplx w = f.value(z);
    const double ratio = std::abs(w.real()) / std::abs(z.real());
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    if (!(ratio > 4.0)) rep.failing.push_back(z);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(w - 5.0 * z));
    ++rep.samples;
  }
  rep.certificate_consistent = rep.max_deviation <= claimed_epsilon;
  return rep;
}

std::vector<cplx> VDomain::samples(int per_height) const {
  const PolyLoop& poly = images.front();
  double lo = INFINITY, hi = -INFINITY;
  for (cplx v : poly) {
    lo = std::min(lo, v.imag());
    hi = std::max(hi, v.imag());
  }
  const double cell = (hi - lo) / std::max(2, per_height);
  return polygon_set(poly, cell).interior_samples(cell);
}

VDomain locate_V(const AnalyticMap& f, int j, const ScaffoldConfig& config, int boundary_points) {
  if (j < 1 || j > config.j_max) throw Error(ErrorKind::Precondition, "V_j level out of range");
  if (boundary_points < 16) throw Error(ErrorKind::Precondition, "need at least 16 boundary points");
  const double w = config.r_max;
  VDomain v;
  v.level = j;
  v.images.resize(j + 1);
  // T_j is only a target: truncating it at 4 R_max keeps V_j^{j-1} inside
  // the window where f is close to Phi.
  const double perimeter = 16.0 * w + 2.0 * config.t[j].height();
  v.images[j] = resample_loop(strip_rectangle(config.t[j], 4.0 * w), perimeter / boundary_points);
  v.derivative_min = INFINITY;
  v.derivative_max = 0.0;
  for (int k = j - 1; k >= 0; --k) {
    const StripBounds& b = config.s[k];
    const double cell = (b.height() - 2.0 * config.shrink) / 24.0;
    const CompactSet domain = polygon_set(strip_rectangle(b, w, config.shrink), cell);
    const UnivalentInverse inverse(f, domain, 2.0 * cell);
    PolyLoop pulled;
    pulled.reserve(v.images[k + 1].size());
    for (cplx target : v.images[k + 1]) {
      cplx z;
      try {
        z = inverse(target);
      } catch (const Error& e) {
        throw Error(ErrorKind::ScaffoldBreach, "pullback of " + fmt17(target) + " into S~_" + std::to_string(k) +
                                                   " failed (" + e.what() + ")");
      }
      if (!config.in_shrunk(k, z) || std::abs(z.real()) > w)
        throw Error(ErrorKind::ScaffoldBreach,
                    "pullback " + fmt17(z) + " of " + fmt17(target) + " leaves S~_" + std::to_string(k));
      const double d = std::abs(f.derivative(z));
      v.derivative_min = std::min(v.derivative_min, d);
      v.derivative_max = std::max(v.derivative_max, d);
      pulled.push_back(z);
    }
    v.images[k] = std::move(pulled);
  }
  // Re z reaches both sides at truncation scale.
  double re_lo = INFINITY, re_hi = -INFINITY;
  std::vector<double> crossings;
  const PolyLoop& poly = v.images[0];
  for (std::size_t a = 0, b = poly.size() - 1; a < poly.size(); b = a++) {
    re_lo = std::min(re_lo, poly[a].real());
    re_hi = std::max(re_hi, poly[a].real());
    const cplx p = poly[a], q = poly[b];
    if ((p.real() > 0.0) != (q.real() > 0.0))
      crossings.push_back(p.imag() + (0.0 - p.real()) * (q.imag() - p.imag()) / (q.real() - p.real()));
  }
  const double reach = 2.0 * w / std::pow(5.0, j);
  if (re_hi < reach || re_lo > -reach)
    throw Error(ErrorKind::ScaffoldBreach, "V_" + std::to_string(j) + " spans Re " + fmt17(re_lo) + " .. " +
                                               fmt17(re_hi) + ", short of +-" + fmt17(reach));
  if (crossings.size() < 2) throw Error(ErrorKind::ScaffoldBreach, "V_" + std::to_string(j) + " misses Re z = 0");
  const auto [cmin, cmax] = std::minmax_element(crossings.begin(), crossings.end());
  v.s0 = cplx(0.0, 0.5 * (*cmin + *cmax));

  // Forward contracts: f^k(V_j) in S_k for k < j, f^j(V_j) in T_j.
  for (cplx z : v.samples(16)) {
    cplx x = z;
    for (int k = 0; k < j; ++k) {
      if (!config.s[k].contains(x))
        throw Error(ErrorKind::ScaffoldBreach, "f^" + std::to_string(k) + " of V_" + std::to_string(j) +
                                                   " sample " + fmt17(z) + " is outside S_" + std::to_string(k));
      x = f.value(x);
    }
    if (!config.t[j].contains(x))
      throw Error(ErrorKind::ScaffoldBreach,
                  "f^" + std::to_string(j) + " of V_" + std::to_string(j) + " sample " + fmt17(z) + " misses T_j");
    ++v.samples_checked;
  }
  return v;
}

double empirical_epsilon(const ScaffoldConfig& config) {
  const auto samples = expansion_samples(config, 60);
  const int depth = std::min(2, config.j_max);
  for (int step = 19; step >= 1; --step) {
    const double eps = 0.05 * step;
    bool ok = true;
    for (int dir = 0; dir < 8 && ok; ++dir) {
      const cplx shift = std::polar(eps, kPi * dir / 4.0);
      const AnalyticMap f{[shift](cplx z) { return 5.0 * z + shift; }, [](cplx) { return cplx(5.0); }};
      ok = verify_expansion(f, config, samples).passed();
      for (int j = 1; j <= depth && ok; ++j) {
        try {
          locate_V(f, j, config, 128);
        } catch (const Error&) {
          ok = false;
        }
      }
    }
    if (ok) return eps;
  }
  return 0.0;
}

}  // namespace wander
