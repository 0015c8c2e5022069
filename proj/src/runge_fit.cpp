#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "wander/approx.hpp"
#include "wander/kernels.hpp"

namespace wander {

// ---------------------------------------------------------------------------
// Rules

Rule Rule::constant(cplx c) {
  Rule r;
  r.kind = RuleKind::Constant;
  r.a = c;
  return r;
}

Rule Rule::affine(cplx a, cplx b) {
  Rule r;
  r.kind = RuleKind::Affine;
  r.a = a;
  r.b = b;
  return r;
}

Rule Rule::prior_polynomial(int stage, std::shared_ptr<const CertifiedPolynomial> p) {
  if (!p) throw Error(ErrorKind::Precondition, "prior-polynomial rule needs a polynomial");
  Rule r;
  r.kind = RuleKind::PriorPolynomial;
  r.stage = stage;
  r.prior = std::move(p);
  return r;
}

Rule Rule::composite(AnalyticMap map, std::string description) {
  if (!map.value) throw Error(ErrorKind::Precondition, "composite rule needs a map");
  Rule r;
  r.kind = RuleKind::Composite;
  r.map = std::move(map);
  r.description = std::move(description);
  return r;
}

cplx Rule::operator()(cplx z) const {
  switch (kind) {
    case RuleKind::Constant: return a;
    case RuleKind::Affine: return a * z + b;
    case RuleKind::PriorPolynomial: return (*prior)(z);
    case RuleKind::Composite: return map.value(z);
  }
  return 0.0;
}

std::string Rule::describe() const {
  std::ostringstream out;
  switch (kind) {
    case RuleKind::Constant: out << "constant " << fmt17(a); break;
    case RuleKind::Affine: out << "affine " << fmt17(a) << " " << fmt17(b); break;
    case RuleKind::PriorPolynomial: out << "prior-polynomial stage " << stage; break;
    case RuleKind::Composite: out << "composite " << description; break;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Sampling helpers

namespace {

struct Box {
  cplx lo, hi;
  bool overlaps(const Box& o) const {
    return lo.real() <= o.hi.real() && o.lo.real() <= hi.real() && lo.imag() <= o.hi.imag() &&
           o.lo.imag() <= hi.imag();
  }
};

Box bounding_box(const CompactSet& s) {
  if (s.circle) {
    const double r = s.circle->radius;
    return {s.circle->center - cplx(r, r), s.circle->center + cplx(r, r)};
  }
  return {s.window.lo(), s.window.hi()};
}

/// Closed boundary curves of a set, each sampled at most `spacing` apart.
std::vector<std::vector<cplx>> boundary_curves(const CompactSet& s, double spacing) {
  std::vector<std::vector<cplx>> out;
  if (s.circle) {
    out.push_back(s.boundary_samples(spacing));
    return out;
  }
  for (const auto& loop : s.loops) out.push_back(resample_loop(loop, spacing));
  return out;
}

double total_perimeter(const PiecewisePlan& plan) {
  double p = 0.0;
  for (const auto& piece : plan.pieces) p += piece.region.perimeter();
  return p;
}

/// A point of the set: the circle center, or the first masked cell center.
cplx inner_point(const CompactSet& s) {
  if (s.circle) return s.circle->center;
  for (int j = 0; j < s.window.ny; ++j)
    for (int i = 0; i < s.window.nx; ++i)
      if (s.mask[s.window.index(i, j)]) return s.window.center(i, j);
  return s.window.lo();
}

double sample_spacing(const CompactSet& s) { return s.circle ? s.circle->radius / 16.0 : s.window.cell; }

struct Net {
  std::vector<cplx> points;
  std::vector<cplx> values;
  std::vector<std::size_t> curve_start;  // ranges of closed curves in points
};

Net boundary_net_for(const PiecewisePlan& plan, std::size_t target_size) {
  Net net;
  const double per = total_perimeter(plan);
  for (const auto& piece : plan.pieces) {
    // At least 16 samples per piece, otherwise proportional to perimeter.
    const double share = piece.region.perimeter() / per;
    const double count = std::max(16.0, share * static_cast<double>(target_size));
    const double spacing = piece.region.perimeter() / count;
    for (const auto& curve : boundary_curves(piece.region, spacing)) {
      net.curve_start.push_back(net.points.size());
      for (cplx z : curve) {
        net.points.push_back(z);
        net.values.push_back(piece.rule(z));
      }
    }
  }
  net.curve_start.push_back(net.points.size());
  return net;
}

std::vector<std::pair<cplx, cplx>> interior_points(const PiecewisePlan& plan, int count, std::mt19937_64& rng) {
  std::vector<std::pair<cplx, cplx>> out;
  if (count <= 0) return out;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int per_piece = std::max(4, count / static_cast<int>(plan.pieces.size()));
  for (const auto& piece : plan.pieces) {
    const Box box = bounding_box(piece.region);
    int got = 0;
    for (int tries = 0; got < per_piece && tries < 200 * per_piece; ++tries) {
      const cplx z(box.lo.real() + u(rng) * (box.hi.real() - box.lo.real()),
                   box.lo.imag() + u(rng) * (box.hi.imag() - box.lo.imag()));
      if (!piece.region.contains(z)) continue;
      out.emplace_back(z, piece.rule(z));
      ++got;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Plan checks

double PiecewisePlan::min_separation() const {
  double best = INFINITY;
  for (std::size_t a = 0; a < pieces.size(); ++a)
    for (std::size_t b = a + 1; b < pieces.size(); ++b) {
      const auto& A = pieces[a].region;
      const auto& B = pieces[b].region;
      const double h = std::min(sample_spacing(A), sample_spacing(B));
      const auto ca = boundary_curves(A, h);
      const auto cb = boundary_curves(B, h);
      for (const auto& x : ca)
        for (cplx p : x)
          for (const auto& y : cb)
            for (cplx q : y) best = std::min(best, std::abs(p - q));
    }
  return best;
}

void PiecewisePlan::validate() const {
  if (pieces.empty()) throw Error(ErrorKind::Precondition, "empty plan");
  for (std::size_t a = 0; a < pieces.size(); ++a)
    for (std::size_t b = a + 1; b < pieces.size(); ++b) {
      const auto& A = pieces[a].region;
      const auto& B = pieces[b].region;
      const Box ba = bounding_box(A), bb = bounding_box(B);
      if (!ba.overlaps(bb)) continue;
      const std::string names = pieces[a].name + " and " + pieces[b].name;
      if (A.contains(inner_point(B)) || B.contains(inner_point(A)))
        throw Error(ErrorKind::Precondition, "plan regions overlap: " + names);
      const double h = std::min(sample_spacing(A), sample_spacing(B));
      for (const auto& c : boundary_curves(A, h))
        for (cplx z : c)
          if (B.contains(z)) throw Error(ErrorKind::Precondition, "plan regions overlap: " + names);
      for (const auto& c : boundary_curves(B, h))
        for (cplx z : c)
          if (A.contains(z)) throw Error(ErrorKind::Precondition, "plan regions overlap: " + names);
    }
  // Fullness of the union, on a common raster.
  Box all = bounding_box(pieces[0].region);
  double cell = sample_spacing(pieces[0].region);
  for (const auto& p : pieces) {
    const Box b = bounding_box(p.region);
    all.lo = {std::min(all.lo.real(), b.lo.real()), std::min(all.lo.imag(), b.lo.imag())};
    all.hi = {std::max(all.hi.real(), b.hi.real()), std::max(all.hi.imag(), b.hi.imag())};
    cell = std::min(cell, sample_spacing(p.region));
  }
  const double extent = std::max(all.hi.real() - all.lo.real(), all.hi.imag() - all.lo.imag());
  cell = std::max(cell, extent / 1024.0);
  const cplx pad(2.0 * cell, 2.0 * cell);
  const Window w = Window::around(all.lo - pad, all.hi + pad, cell);
  Mask m(w.size(), 0);
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i) {
      const cplx z = w.center(i, j);
      for (const auto& p : pieces)
        if (p.region.contains(z)) {
          m[w.index(i, j)] = 1;
          break;
        }
    }
  if (!is_full(w, m)) throw Error(ErrorKind::Precondition, "union of plan regions separates the plane");
}

std::string PiecewisePlan::domain_id() const {
  std::ostringstream out;
  for (std::size_t k = 0; k < pieces.size(); ++k) out << (k ? "+" : "") << pieces[k].name;
  return out.str();
}

// ---------------------------------------------------------------------------
// Fitting

namespace {

struct Attempt {
  CertifiedPolynomial poly;
  double bound = INFINITY;
  double measured = INFINITY;
};

CertifiedPolynomial solve_least_squares(const Net& fit, const std::vector<cplx>& nodes, double scale, int degree) {
  const std::size_t m = fit.points.size();
  std::vector<cplx> storage(m * (degree + 1));
  kernels::newton_design_matrix(fit.points, nodes, scale, degree, storage);
  Eigen::Map<Eigen::MatrixXcd> a(storage.data(), static_cast<Eigen::Index>(m), degree + 1);
  Eigen::Map<const Eigen::VectorXcd> b(fit.values.data(), static_cast<Eigen::Index>(m));
  const Eigen::VectorXcd c = a.colPivHouseholderQr().solve(b);
  return CertifiedPolynomial(nodes, scale, std::vector<cplx>(c.data(), c.data() + c.size()));
}

void certify(CertifiedPolynomial& p, const Net& validation, const std::vector<std::pair<cplx, cplx>>& interior) {
  Certificate& cert = p.certificate;
  std::vector<cplx> values(validation.points.size());
  kernels::evaluate_batch(p, validation.points, values);
  double measured = 0.0, slope = 0.0, spacing = 0.0;
  for (std::size_t c = 0; c + 1 < validation.curve_start.size(); ++c) {
    const std::size_t first = validation.curve_start[c], last = validation.curve_start[c + 1];
    for (std::size_t k = first; k < last; ++k) {
      const std::size_t next = k + 1 < last ? k + 1 : first;
      const cplx e0 = values[k] - validation.values[k];
      const cplx e1 = values[next] - validation.values[next];
      measured = std::max(measured, std::abs(e0));
      const double step = std::abs(validation.points[next] - validation.points[k]);
      if (step > 0.0) {
        slope = std::max(slope, std::abs(e1 - e0) / step);
        spacing = std::max(spacing, step);
      }
    }
  }
  for (const auto& [z, g] : interior) measured = std::max(measured, std::abs(p(z) - g));
  cert.validation_net_size = validation.points.size();
  cert.interior_samples = interior.size();
  cert.measured_error = measured;
  cert.max_error_slope = slope;
  cert.validation_spacing = spacing;
  // Between consecutive net points the error moves by at most slope * h / 2
  // from the nearer sample.
  cert.inflation_margin = 0.5 * spacing * slope;
  cert.inflated_bound = measured + cert.inflation_margin;
}

}  // namespace

CertifiedPolynomial runge_fit(const PiecewisePlan& plan, double epsilon, const FitOptions& options) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Domain, "epsilon must be positive");
  if (plan.pieces.empty()) throw Error(ErrorKind::Precondition, "empty plan");
  if (options.validate_plan) plan.validate();

  std::mt19937_64 rng(options.seed);
  const auto interior = interior_points(plan, options.interior_samples, rng);
  const bool single_disc = plan.pieces.size() == 1 && plan.pieces[0].region.circle.has_value();

  std::vector<int> degrees;
  for (int d = std::max(1, options.min_degree); d < options.degree_cap; d *= 2) degrees.push_back(d);
  degrees.push_back(options.degree_cap);

  Attempt best;
  int stalled = 0;
  double last_measured = INFINITY;
  double first_measured = INFINITY;
  bool converging = false;
  for (int degree : degrees) {
    const std::size_t fit_size = 3 * static_cast<std::size_t>(degree + 1) + 32;
    Net fit = boundary_net_for(plan, fit_size);
    const std::size_t leja_count = 2 * static_cast<std::size_t>(degree + 1);
    const Net validation = boundary_net_for(plan, 4 * (fit.points.size() + leja_count));
    const auto leja = leja_indices(validation.points, static_cast<int>(leja_count));

    std::vector<cplx> nodes;
    double scale;
    if (single_disc) {
      const Circle c = *plan.pieces[0].region.circle;
      nodes.assign(degree, c.center);
      scale = c.radius;
    } else {
      for (int k = 0; k <= degree && k < static_cast<int>(leja.size()); ++k) nodes.push_back(validation.points[leja[k]]);
      scale = leja_capacity(nodes);
      nodes.resize(degree);
      if (static_cast<int>(nodes.size()) < degree)
        throw Error(ErrorKind::FitFailed, "not enough distinct boundary samples for degree " + std::to_string(degree));
    }
    // Leja points crowd toward corners; uniform nets alone undersample them.
    for (std::size_t k : leja) {
      fit.points.push_back(validation.points[k]);
      fit.values.push_back(validation.values[k]);
    }
    CertifiedPolynomial p = solve_least_squares(fit, nodes, scale, degree);
    p.certificate.domain_id = plan.domain_id();
    p.certificate.fit_net_size = fit.points.size();
    p.certificate.seed = options.seed;
    certify(p, validation, interior);

    if (p.certificate.inflated_bound <= epsilon) return p;
    if (p.certificate.inflated_bound < best.bound) {
      best.bound = p.certificate.inflated_bound;
      best.measured = p.certificate.measured_error;
      best.poly = p;
    }
    // Residual not improving over three escalations in a row. Low degrees sit
    // on a plateau at the size of the target's jumps, so counting starts once
    // the error has halved.
    if (!(first_measured < INFINITY)) first_measured = p.certificate.measured_error;
    if (p.certificate.measured_error < 0.5 * first_measured) converging = true;
    if (converging && p.certificate.measured_error >= last_measured)
      ++stalled;
    else
      stalled = 0;
    last_measured = p.certificate.measured_error;
    if (stalled >= 3) {
      std::ostringstream msg;
      msg << "validation error stopped decreasing at degree " << degree << ", best bound " << fmt17(best.bound);
      throw Error(ErrorKind::ConditioningFailure, msg.str());
    }
  }
  std::ostringstream msg;
  msg << "degree cap " << options.degree_cap << " reached, best bound " << fmt17(best.bound) << " > epsilon "
      << fmt17(epsilon);
  throw Error(ErrorKind::FitFailed, msg.str());
}

double audit_fit(const CertifiedPolynomial& p, const PiecewisePlan& plan, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  const auto inner = interior_points(plan, count / 2, rng);
  for (const auto& [z, g] : inner) worst = std::max(worst, std::abs(p(z) - g));
  // Boundary: random positions along random edges of each piece's boundary.
  const int per_piece = std::max(1, (count - static_cast<int>(inner.size())) / static_cast<int>(plan.pieces.size()));
  for (const auto& piece : plan.pieces) {
    const auto curves = boundary_curves(piece.region, sample_spacing(piece.region));
    std::vector<std::pair<cplx, cplx>> edges;
    for (const auto& c : curves)
      for (std::size_t k = 0; k < c.size(); ++k) edges.emplace_back(c[k], c[(k + 1) % c.size()]);
    if (edges.empty()) continue;
    for (int s = 0; s < per_piece; ++s) {
      const auto& [a, b] = edges[static_cast<std::size_t>(u(rng) * edges.size()) % edges.size()];
      cplx z = a + u(rng) * (b - a);
      if (piece.region.circle) {
        const Circle c = *piece.region.circle;
        z = c.center + c.radius * (z - c.center) / std::abs(z - c.center);
      }
      worst = std::max(worst, std::abs(p(z) - piece.rule(z)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

bool EpsilonBudget::tail_invariant_holds() const {
  double tail = 0.0;
  for (std::size_t k = history.size(); k-- > 0;) {
    tail += history[k];
    if (tail > 2.0 * history[k] * (1.0 + 1e-15)) return false;
  }
  return true;
}

double epsilon_next(EpsilonBudget& budget, double proposal) {
  if (!(proposal > 0.0)) throw Error(ErrorKind::Domain, "epsilon proposal must be positive");
  const double accepted = budget.history.empty() ? proposal : std::min(proposal, budget.history.back() / 2.0);
  budget.history.push_back(accepted);
  return accepted;
}

}  // namespace wander
