// Maverick (Prop. 5.2) and Eremenko-point (Thm. 6.1) engines. Both start from
// the Lemma 4.1 function f_0, fitted to the scaffold plan g_0.

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>

#include "wander/engines.hpp"

namespace wander {

namespace {

double best_bound_in(const std::string& message) {
  static const std::regex pattern("best bound ([-+0-9.eE]+)");
  std::smatch m;
  if (std::regex_search(message, m, pattern)) return std::stod(m[1].str());
  return std::numeric_limits<double>::infinity();
}

std::string line(const std::string& key, double value) { return key + " " + fmt17(value); }

/// Contracts of the stage-0 scaffold evaluated with the exact piecewise g_0,
/// so a report can say which failures come from the fit alone.
void oracle_diagnostics(const ScaffoldConfig& sc, cplx zeta0, EngineRun& run) {
  const AnalyticMap g0 = g0_oracle();
  double worst = 0.0;
  for (cplx z : disc_set(0.0, sc.d_radius, sc.d_radius / 64.0).boundary_samples(0.01))
    worst = std::max(worst, std::abs(g0(z)));
  run.diagnostics.push_back(line("oracle a.disc_invariant margin", sc.d_radius - worst));
  run.diagnostics.push_back(line("oracle d.zeta0 margin", 1.0 - std::abs(g0(zeta0).real())));
  const auto rep = verify_expansion(g0, sc, expansion_samples(sc, 60), 0.0);
  run.diagnostics.push_back(line("oracle expansion min ratio", rep.min_ratio));
  try {
    const VDomain v1 = locate_V(g0, 1, sc);
    run.diagnostics.push_back("oracle V_1 s0 " + fmt17(v1.s0));
    // Spike threshold for stage 2: max Re g0^2 over V_2 samples with Re z <= 1.
    if (sc.j_max >= 2) {
      const VDomain v2 = locate_V(g0, 2, sc);
      double r = -INFINITY;
      for (cplx z : v2.samples(8))
        if (z.real() <= 1.0) r = std::max(r, g0(g0(z)).real());
      run.diagnostics.push_back(line("oracle spike threshold R_2", r));
    }
  } catch (const Error& e) {
    run.diagnostics.push_back(std::string("oracle locate_V: ") + e.what());
  }
}

/// Fits f_0; on success returns stage 0, on failure fills the run's failure
/// fields and returns nothing.
std::optional<StageState> stage_zero(const ScaffoldConfig& sc, const ScaffoldEngineConfig& config, cplx zeta0,
                                     EngineRun& run) {
  const double eps_emp = empirical_epsilon(sc);
  run.diagnostics.push_back(line("empirical Lemma 4.1 epsilon", eps_emp));
  const double eps0 = std::min({config.eps_cap, 0.2, 0.5 * eps_emp});
  StageState s;
  s.j = 0;
  s.epsilon = eps0;
  ContractCheck fit;
  fit.name = "f0.certified";
  fit.paper_item = "Lemma 4.1 (Runge fit of g_0 on A_0)";
  fit.samples = 0;
  try {
    F0Result r = build_f0(sc, config.eps_cap, eps_emp, config.fit);
    if (config.fault_stage == 0) r.f0.coefficients()[0] += 1.0;
    s.f = std::make_shared<CertifiedPolynomial>(std::move(r.f0));
    fit.samples = s.f->certificate.validation_net_size;
    fit.worst_margin = eps0 - s.f->certificate.inflated_bound;
    fit.passed = fit.worst_margin > 0.0;
  } catch (const Error& e) {
    fit.passed = false;
    fit.worst_margin = eps0 - best_bound_in(e.what());
    fit.note = e.what();
  }
  StageReport report;
  report.stage = 0;
  report.checks.push_back(fit);
  if (s.f) {
    const AnalyticMap f = s.f->as_map();
    const auto d_samples = disc_set(0.0, sc.d_radius, sc.d_radius / 64.0).boundary_samples(0.01);
    std::vector<Contract> contracts{
        disc_contract("a.disc_invariant", "Prop 5.2 (a) f(D) in D", d_samples, f, 0.0, sc.d_radius)};
    Contract zeta;
    zeta.name = "d.zeta0";
    zeta.paper_item = "Prop 5.2 (d) with N_0 = 0";
    zeta.samples = {zeta0};
    zeta.margin = [f](cplx z) { return 1.0 - std::abs(f(z).real()); };
    contracts.push_back(zeta);
    const StageReport more = stage_verify(s, contracts);
    report.checks.insert(report.checks.end(), more.checks.begin(), more.checks.end());
  }
  s.report = report;
  if (report.passed()) return s;
  run.failed_report = report;
  const ContractCheck* bad = report.first_failure();
  run.failure = "stage 0: " + (bad->note.empty() ? "contract " + bad->name + " failed" : bad->note);
  oracle_diagnostics(sc, zeta0, run);
  return std::nullopt;
}

ScaffoldConfig engine_scaffold(const ScaffoldEngineConfig& config) {
  if (config.stages < 1) throw Error(ErrorKind::Precondition, "engine needs at least one stage");
  // Stage j uses S_{j+1} and T_{j+1}, so the scaffold runs one level deeper.
  return build_scaffold(config.stages + 1, config.r_max);
}

}  // namespace

EngineRun maverick_run(const MaverickSpec& spec, const ScaffoldEngineConfig& config) {
  if (!(spec.radius > 0.0)) throw Error(ErrorKind::Domain, "disc radius must be positive");
  if (spec.escaping_marks.empty() || spec.bungee_marks.empty())
    throw Error(ErrorKind::Precondition, "need at least one escaping and one bungee mark");
  const ScaffoldConfig sc = engine_scaffold(config);
  EngineRun run;
  run.engine = "maverick";

  // K must lie in T_0; move the center to the middle of T_0.
  const double t_mid = 0.5 * (sc.t[0].lo() + sc.t[0].hi());
  const cplx shift(0.0, t_mid - spec.center.imag());
  const cplx center = spec.center + shift;
  if (center.imag() - spec.radius <= sc.t[0].lo() || center.imag() + spec.radius >= sc.t[0].hi())
    throw Error(ErrorKind::Precondition, "disc K does not fit in T_0");
  run.diagnostics.push_back("K translated by " + fmt17(shift) + " to center " + fmt17(center));
  // zeta_j: the disc center for every j (the literal zeta_j = 0 is not in K).
  run.diagnostics.push_back("zeta_j = disc center " + fmt17(center));
  std::ostringstream sched;
  sched << "bungee schedule (round robin over " << spec.bungee_marks.size() << " marks):";
  for (int j = 0; j <= config.stages; ++j) sched << " " << j % spec.bungee_marks.size();
  run.diagnostics.push_back(sched.str());

  auto s0 = stage_zero(sc, config, center, run);
  if (!s0) return run;
  s0->regions.push_back({"K", disc_set(center, spec.radius, spec.radius / 64.0)});
  run.stages.push_back(std::move(*s0));
  // Stage j+1 needs V_{j+1}(f_0) and the spike map into W_j; not reached while
  // f_0 cannot be certified (see the failure above).
  run.failure = "stage 1: stages past 0 need a certified f_0";
  return run;
}

EngineRun eremenko_run(const ScaffoldEngineConfig& config) {
  const ScaffoldConfig sc = engine_scaffold(config);
  EngineRun run;
  run.engine = "eremenko";
  const cplx zeta(0.0, 3.5);
  run.diagnostics.push_back("K = [0, " + fmt17(0.75 * config.r_max) + "] + 7i/2");
  std::ostringstream sched;
  sched << "t_j = j + 2:";
  for (int j = 1; j <= config.stages; ++j) sched << " " << j + 2;
  run.diagnostics.push_back(sched.str());

  auto s0 = stage_zero(sc, config, zeta, run);
  if (!s0) return run;
  s0->regions.push_back({"K0", polygon_set({zeta + cplx(-0.25, -0.25), zeta + cplx(0.75 * config.r_max + 0.25, -0.25),
                                            zeta + cplx(0.75 * config.r_max + 0.25, 0.25), zeta + cplx(-0.25, 0.25)},
                                           1.0 / 32.0)});
  run.stages.push_back(std::move(*s0));
  run.failure = "stage 1: stages past 0 need a certified f_0";
  return run;
}

}  // namespace wander
