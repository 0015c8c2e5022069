#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wander/engines.hpp"

namespace wander {

namespace {

struct Piece {
  std::string name;
  CompactSet set;
};

std::vector<cplx> set_samples(const CompactSet& s, double spacing) {
  std::vector<cplx> out = s.boundary_samples(spacing);
  const auto inner = s.interior_samples(2.5 * spacing);
  out.insert(out.end(), inner.begin(), inner.end());
  return out;
}

AnalyticMap identity_map() {
  return {[](cplx z) { return z; }, [](cplx) { return cplx(1.0); }};
}

Normalization normalize(const CompactSet& k, const UniformConfig& config) {
  const Window& w = k.window;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i)
      if (k.mask[w.index(i, j)]) {
        const cplx c = w.center(i, j);
        xmin = std::min(xmin, c.real());
        xmax = std::max(xmax, c.real());
        ymin = std::min(ymin, c.imag());
        ymax = std::max(ymax, c.imag());
      }
  if (!(xmin <= xmax)) throw Error(ErrorKind::Precondition, "K is empty");
  const cplx mid(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
  double rho = 0.0;
  for (int j = 0; j < w.ny; ++j)
    for (int i = 0; i < w.nx; ++i)
      if (k.mask[w.index(i, j)]) rho = std::max(rho, std::abs(w.center(i, j) - mid));
  rho += 0.5 * std::sqrt(2.0) * w.cell;
  Normalization n;
  n.scale = config.k_radius / rho;
  n.shift = -n.scale * mid;
  return n;
}

/// f^j image of a Jordan region, as the polygon through the mapped boundary.
CompactSet image_region(const AnalyticMap& fj, const PolyLoop& loop, double cell) {
  const PolyLoop dense = resample_loop(loop, 1.5 * cell);
  PolyLoop img;
  img.reserve(dense.size());
  for (cplx z : dense) img.push_back(fj.value(z));
  if (!is_simple(img)) throw Error(ErrorKind::RegionSeparation, "image of L_j is not a simple curve");
  return polygon_set(img, cell);
}

double min_vertex_distance(const CompactSet& s, cplx z) {
  double d = INFINITY;
  for (const auto& loop : s.loops)
    for (cplx v : loop) d = std::min(d, std::abs(v - z));
  return d;
}

}  // namespace

EngineRun uniform_escape_run(const CompactSet& k_in, const UniformConfig& config, Normalization* normalization) {
  if (config.stages < 1) throw Error(ErrorKind::Precondition, "uniform engine needs at least one stage");
  if (!(config.epsilon_start > 0.0 && config.epsilon_start < 0.25))
    throw Error(ErrorKind::Domain, "epsilon_1 must lie in (0, 1/4)");
  const int J = config.stages;
  EngineRun run;
  run.engine = "uniform";

  // K_0 must sit in the unit disc; K is always rescaled first.
  const Normalization norm = normalize(k_in, config);
  if (normalization) *normalization = norm;
  CompactSet k = transform(k_in, norm.scale, norm.shift);
  const double step = (config.k0_radius - config.k_radius - config.r_min) / J;
  if (!(step > 0.0) || !(config.k0_radius < 1.0))
    throw Error(ErrorKind::Precondition, "shell schedule does not fit in the unit disc");
  const double r0 = config.r_min + J * step;
  k = pad_set(k, static_cast<int>(std::ceil((r0 + 0.2) / k.window.cell)) + 4);
  const double cell = k.window.cell;
  {
    std::ostringstream msg;
    msg << "normalization: scale " << fmt17(norm.scale) << " shift " << fmt17(norm.shift);
    run.diagnostics.push_back(msg.str());
  }

  std::vector<CompactSet> shells, interp;
  // The L_j gap is wide: across it the fit jumps from -3 on R_j to z + 3.
  for (int m = 0; m <= J; ++m) shells.push_back(shell_at(k, config.r_min + (J - m) * step));
  for (int m = 0; m < J; ++m) interp.push_back(shell_at(k, config.r_min + (J - m - config.l_share) * step));
  for (int j = 0; j < shells[0].window.ny; ++j)
    for (int i = 0; i < shells[0].window.nx; ++i)
      if (shells[0].mask[shells[0].window.index(i, j)] &&
          std::abs(shells[0].window.center(i, j)) + cell >= 1.0)
        throw Error(ErrorKind::Precondition, "K_0 does not fit in the unit disc");

  const CompactSet delta = disc_set(-3.0, 1.0, 1.0 / 64.0);
  const std::vector<cplx> delta_samples = set_samples(delta, config.sample_spacing);

  // Stage 0.
  {
    StageState s;
    s.j = 0;
    auto f0 = std::make_shared<CertifiedPolynomial>(CertifiedPolynomial::monomial(0.0, 1.0, {-1.5, 0.5}));
    f0->certificate.domain_id = "uniform.f0";
    s.f = f0;
    s.regions = {{"K.0", shells[0]}, {"Delta", delta}};
    const AnalyticMap F = f0->as_map();
    s.report = stage_verify(
        s, {disc_contract("a.disc_invariant", "Prop 3.2 (a)", delta_samples, F, -3.0, 1.0),
            disc_contract("c.image_in_D", "Prop 3.2 (c) j=0", set_samples(shells[0], config.sample_spacing),
                          identity_map(), 0.0, 1.0)});
    if (!s.report.passed()) {
      run.failure = "stage 0 contracts failed";
      run.failed_report = s.report;
      return run;
    }
    run.stages.push_back(std::move(s));
  }

  std::vector<Piece> carried{{"Delta", delta}};
  for (int j = 0; j < J; ++j) {
    const StageState& prev = run.stages.back();
    const AnalyticMap F = prev.f->as_map();
    const AnalyticMap Fj = iterate_map(F, j);
    std::vector<std::string> log;

    PiecewisePlan plan;
    std::vector<NamedRegion> regions{{"K." + std::to_string(j + 1), shells[j + 1]},
                                     {"L." + std::to_string(j), interp[j]}};
    std::vector<cplx> p_net, q_net;
    try {
      p_net = boundary_net(shells[j], j, NetMode::Full).points;
      for (cplx p : p_net) q_net.push_back(Fj.value(p));

      std::vector<Piece> images;
      for (std::size_t c = 0; c < interp[j].loops.size(); ++c)
        images.push_back({"FL." + std::to_string(j) + "." + std::to_string(c),
                          image_region(Fj, interp[j].loops[c], cell)});

      // R_j: discs about Q_j, kept clear of f_j^j(L_j) and of the circle bounding D_j.
      double room = INFINITY;
      for (cplx q : q_net) {
        for (const auto& im : images) {
          if (im.set.contains(q)) throw Error(ErrorKind::RegionSeparation, "Q_j lies inside f_j^j(L_j)");
          room = std::min(room, min_vertex_distance(im.set, q));
        }
        room = std::min(room, 1.0 - std::abs(q - cplx(3.0 * j, 0.0)));
      }
      const double radius = std::min(config.r_disc_cap, 0.45 * room);
      if (!(radius > 4.0 * cell / 8.0) || !std::isfinite(radius)) {
        std::ostringstream msg;
        msg << "no room for R_" << j << " (clearance " << fmt17(room) << ")";
        throw Error(ErrorKind::RegionSeparation, msg.str());
      }
      const double rcell = radius / 8.0;
      double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
      for (cplx q : q_net) {
        x0 = std::min(x0, q.real());
        x1 = std::max(x1, q.real());
        y0 = std::min(y0, q.imag());
        y1 = std::max(y1, q.imag());
      }
      const double padw = radius + 6.0 * rcell;
      const Window rw = Window::around({x0 - padw, y0 - padw}, {x1 + padw, y1 + padw}, rcell);
      Mask rmask(rw.size(), 0);
      for (cplx q : q_net) {
        const Mask d = rasterize_disc(rw, q, radius);
        for (std::size_t t = 0; t < d.size(); ++t) rmask[t] |= d[t];
      }
      const CompactSet r_set = fill_compact(rw, rmask);
      {
        std::ostringstream msg;
        msg << "R_" << j << " radius " << fmt17(radius) << " about " << q_net.size() << " points";
        log.push_back(msg.str());
      }

      for (const auto& piece : carried)
        plan.pieces.push_back({piece.name, piece.set, Rule::prior_polynomial(j, prev.f)});
      plan.pieces.push_back({"R." + std::to_string(j), r_set, Rule::constant(-3.0)});
      for (const auto& im : images) plan.pieces.push_back({im.name, im.set, Rule::affine(1.0, 3.0)});
      plan.validate();
      regions.push_back({"R." + std::to_string(j), r_set});
      for (const auto& im : images) regions.push_back({im.name, im.set});
    } catch (const Error& e) {
      run.failure = "stage " + std::to_string(j + 1) + " plan assembly: " + e.what();
      return run;
    }

    const double limit = j == 0 ? 0.25 : prev.epsilon / 2.0;
    const double base = j == 0 ? config.epsilon_start : prev.epsilon / 2.0;
    const std::vector<cplx> k_samples = set_samples(shells[j + 1], config.sample_spacing);
    bool emitted = false;
    for (int h = 0; h <= config.max_halvings && !emitted; ++h) {
      const double eps = std::ldexp(base, -h);
      std::shared_ptr<CertifiedPolynomial> f;
      try {
        f = std::make_shared<CertifiedPolynomial>(runge_fit(plan, eps, config.fit));
      } catch (const Error& e) {
        // A smaller epsilon is only harder to fit, so there is nothing to retry.
        run.failure = "stage " + std::to_string(j + 1) + ": " + e.what();
        return run;
      }
      const bool faulty = config.fault_stage == j + 1;
      if (faulty) f->coefficients()[0] += 1.0;

      StageState s;
      s.j = j + 1;
      s.f = f;
      s.epsilon = eps;
      s.m = j + 1;
      s.plan = plan;
      s.regions = regions;
      s.nets = {{"P." + std::to_string(j), p_net}, {"Q." + std::to_string(j), q_net}};
      s.log = log;

      const AnalyticMap G = f->as_map();
      const AnalyticMap Gn = iterate_map(G, j + 1);
      std::vector<Contract> contracts;
      contracts.push_back(disc_contract("a.disc_invariant", "Prop 3.2 (a)", delta_samples, G, -3.0, 1.0));
      contracts.push_back(disc_contract("b.P_absorbed", "Prop 3.2 (b) / proof (1)", p_net, Gn, -3.0, 1.0));
      {
        Contract c;
        c.name = "b.P_retained";
        c.paper_item = "Prop 3.2 (a)+(b), " + std::to_string(config.retain_steps) + " further steps";
        c.samples = p_net;
        const int steps = config.retain_steps;
        c.margin = [G, Gn, steps](cplx z) {
          cplx w = Gn.value(z);
          double m = INFINITY;
          for (int n = 0; n < steps; ++n) {
            w = G.value(w);
            if (!std::isfinite(std::abs(w))) return std::numeric_limits<double>::quiet_NaN();
            m = std::min(m, 1.0 - std::abs(w + 3.0));
          }
          return m;
        };
        contracts.push_back(std::move(c));
      }
      contracts.push_back(disc_contract("c.image_in_D", "Prop 3.2 (c) / proof (3)", k_samples, Gn,
                                        cplx(3.0 * (j + 1), 0.0), 1.0));
      {
        Contract c;
        c.name = "c.injective";
        c.paper_item = "Prop 3.2 proof (2)";
        const CompactSet kk = shells[j + 1];
        const double spacing = config.injectivity_spacing;
        c.global = [Gn, kk, spacing]() {
          ContractCheck out;
          try {
            const InjectivityResult r = verify_injective(Gn, kk, spacing);
            out.samples = r.samples;
            out.passed = r.injective;
            if (r.injective) {
              out.worst_margin = std::min(0.5 - r.worst_winding_error,
                                          std::isfinite(r.min_margin) ? r.min_margin - 1.0 : 1.0);
            } else {
              out.worst_margin = -1.0;
              if (r.witness) out.witness = r.witness->first;
            }
          } catch (const Error& e) {
            out.passed = false;
            out.indeterminate = true;
            out.worst_margin = -1.0;
            out.note = e.what();
          }
          return out;
        };
        contracts.push_back(std::move(c));
      }
      {
        Contract c;
        c.name = "eps.halving";
        c.paper_item = j == 0 ? "Prop 3.2 proof, eps_1 < 1/4" : "eps_{j+1} <= eps_j / 2";
        const bool strict = j == 0;
        c.global = [eps, limit, strict]() {
          ContractCheck out;
          out.samples = 1;
          out.worst_margin = limit - eps;
          out.passed = strict ? out.worst_margin > 0.0 : out.worst_margin >= 0.0;
          if (!strict) out.note = "non-strict: passes at margin >= 0";
          return out;
        };
        contracts.push_back(std::move(c));
      }
      // |f_{j+1} - g_k| <= 2 eps_k on the stage-k plans.
      for (int kk = 1; kk <= j + 1; ++kk) {
        const PiecewisePlan& pk = kk == j + 1 ? plan : run.stages[kk].plan;
        const double ek = kk == j + 1 ? eps : run.stages[kk].epsilon;
        Contract c;
        c.name = "eps.telescoped." + std::to_string(kk);
        c.paper_item = "|f_J - g_k| <= 2 eps_k";
        std::vector<const Rule*> rules;
        for (const auto& piece : pk.pieces) {
          const auto pts = piece.region.boundary_samples(2.0 * config.sample_spacing);
          c.samples.insert(c.samples.end(), pts.begin(), pts.end());
          rules.insert(rules.end(), pts.size(), &piece.rule);
        }
        // Each sample has its own rule, so this is evaluated as one global check.
        const std::vector<cplx> pts = std::move(c.samples);
        c.samples.clear();
        c.global = [G, pts, rules, ek]() {
          ContractCheck out;
          out.samples = pts.size();
          std::vector<double> m(pts.size());
          const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel for schedule(static)
          for (std::ptrdiff_t t = 0; t < n; ++t) m[t] = 2.0 * ek - std::abs(G.value(pts[t]) - (*rules[t])(pts[t]));
          out.worst_margin = INFINITY;
          for (std::size_t t = 0; t < m.size(); ++t)
            if (!(m[t] >= out.worst_margin)) {
              out.worst_margin = m[t];
              out.witness = pts[t];
            }
          out.passed = out.worst_margin > 0.0;
          if (!std::isfinite(out.worst_margin)) {
            out.passed = false;
            out.indeterminate = true;
          }
          if (out.passed) out.witness.reset();
          return out;
        };
        contracts.push_back(std::move(c));
      }

      s.report = stage_verify(s, contracts);
      std::ostringstream msg;
      msg << "eps " << fmt17(eps) << " degree " << f->degree() << " bound " << fmt17(f->certificate.inflated_bound);
      if (s.report.passed()) {
        msg << " passed";
        s.log.push_back(msg.str());
        epsilon_next(run.budget, eps);
        carried = {};
        for (const auto& piece : plan.pieces) carried.push_back({piece.name, piece.region});
        run.stages.push_back(std::move(s));
        emitted = true;
      } else {
        msg << " failed " << s.report.first_failure()->name;
        log.push_back(msg.str());
        run.diagnostics.push_back("stage " + std::to_string(j + 1) + ": " + msg.str());
        if (faulty || h == config.max_halvings) {
          run.failed_report = s.report;
          run.failure = "stage " + std::to_string(j + 1) + ": " +
                        (faulty ? std::string("fault injected, contract ") + s.report.first_failure()->name +
                                      " failed"
                                : std::string("stage unreachable: eps exhausted after ") +
                                      std::to_string(config.max_halvings) + " halvings");
          return run;
        }
      }
    }
  }
  run.complete = true;
  return run;
}

}  // namespace wander
