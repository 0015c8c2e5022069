// Acceptance run: one line per criterion, "criterion N: PASS|FAIL <detail>".
// Exit status is the number of failed criteria.
//
//   acceptance [work_dir]

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "wander/approx.hpp"
#include "wander/conformal.hpp"
#include "wander/dynamics.hpp"
#include "wander/pipeline.hpp"
#include "wander/scaffold.hpp"

using namespace wander;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

AnalyticMap affine_map(cplx a, cplx b) {
  return {[a, b](cplx z) { return a * z + b; }, [a](cplx) { return a; }};
}

void verdict(int n, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << " " << detail << std::endl;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Concatenation of every report.txt under dir, in path order.
std::string all_reports(const fs::path& dir) {
  std::vector<fs::path> paths;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.path().filename() == "report.txt") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::string out;
  for (const auto& p : paths) out += p.lexically_relative(dir).string() + "\n" + slurp(p);
  return out;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

RunConfig uniform_config(const fs::path& out) {
  RunConfig c;
  c.engine = EngineKind::Uniform;
  c.geometry = GeometrySource::Wada;
  c.wada.lakes = 2;
  c.wada.grid = 256;
  c.stages = 3;
  c.width = 256;
  c.walkers = 10000;
  c.output = out.string();
  return c;
}

RunConfig maverick_config(const fs::path& out) {
  RunConfig c;
  c.engine = EngineKind::Maverick;
  c.geometry = GeometrySource::Disc;
  c.stages = 3;
  c.width = 256;
  c.output = out.string();
  return c;
}

RunConfig eremenko_config(const fs::path& out) {
  RunConfig c = maverick_config(out);
  c.engine = EngineKind::Eremenko;
  c.geometry = GeometrySource::Ray;
  return c;
}

std::string first_line_with(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key, 0) == 0) return line;
  return {};
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  const ScaffoldConfig c = build_scaffold(4, 10.0);
  const double t = seconds_since(t0);
  // Each proof line is "name: lhs <= rhs" in exact integers; re-check it here.
  bool inclusions = true;
  int proved = 0;
  for (const auto& line : c.proof) {
    const bool phi = line.find("phi(S_") != std::string::npos;
    const bool gap = line.rfind("S_", 0) == 0 && line.find("<= T_") != std::string::npos;
    if (!phi && !gap) continue;
    long long lhs = 0, rhs = 0;
    std::istringstream in(line.substr(line.rfind(": ") + 2));
    std::string le;
    in >> lhs >> le >> rhs;
    inclusions = inclusions && le == "<=" && lhs <= rhs;
    ++proved;
  }
  const bool table = c.n_table == std::vector<long long>{0, 2, 5, 9, 14};
  verdict(1, inclusions && proved == 12 && table && t < 1.0,
          "inclusion steps " + std::to_string(proved) + " all hold " + (inclusions ? "yes" : "no") +
              ", N table (0,2,5,9,14) " + (table ? "yes" : "no") + ", " + fmt(t) + " s");
}

void criterion2() {
  const auto t0 = Clock::now();
  PiecewisePlan plan;
  plan.pieces.push_back({"disc0", disc_set(0.0, 1.0, 0.05), Rule::affine(1.0, 0.0)});
  plan.pieces.push_back({"disc6", disc_set(6.0, 1.0, 0.05), Rule::affine(1.0, 3.0)});
  const CertifiedPolynomial p = runge_fit(plan, 1e-6);
  const double audit = audit_fit(p, plan, 10000, 20240601);
  const AnalyticMap sq{[](cplx z) { return z * z; }, [](cplx z) { return 2.0 * z; }};
  PiecewisePlan trivial;
  trivial.pieces.push_back({"unit", disc_set(0.0, 1.0, 0.05), Rule::composite(sq, "z^2")});
  const CertifiedPolynomial q = runge_fit(trivial, 1e-12);
  const double t = seconds_since(t0);
  const bool ok = p.certificate.inflated_bound <= 1e-6 && audit <= p.certificate.inflated_bound &&
                  q.certificate.inflated_bound <= 1e-12 && t < 30.0;
  verdict(2, ok,
          "two-disc bound " + fmt(p.certificate.inflated_bound) + " degree " + std::to_string(p.degree()) +
              ", audit max " + fmt(audit) + " on 10000 samples, z^2 bound " + fmt(q.certificate.inflated_bound) +
              ", " + fmt(t) + " s");
}

void criterion3() {
  const auto t0 = Clock::now();
  const auto dev = iterates_close(affine_map(5.0, 1e-9), affine_map(5.0, 0.0), disc_set(0.0, 1e-4, 1e-5), 3, 10.0);
  const double t = seconds_since(t0);
  const double want[3] = {1e-9, 6e-9, 31e-9};
  bool ok = dev.size() == 3 && t < 1.0;
  double worst = 0.0;
  for (std::size_t n = 0; n < dev.size() && n < 3; ++n) worst = std::max(worst, std::abs(dev[n] - want[n]));
  ok = ok && worst <= 1e-15;
  verdict(3, ok, "worst deviation from (1,6,31)e-9 is " + fmt(worst) + ", " + fmt(t) + " s");
}

struct EngineOutcome {
  PipelineResult result;
  double seconds = 0.0;
};

EngineOutcome run_timed(const RunConfig& c) {
  fs::remove_all(c.output);
  const auto t0 = Clock::now();
  EngineOutcome o;
  o.result = run_pipeline(c);
  o.seconds = seconds_since(t0);
  return o;
}

void criterion4(const EngineOutcome& o, const fs::path& dir) {
  const VerifyResult v = verify_output(dir.string());
  // Every uniform stage must carry the Prop. 3.2 (a)-(c) checks; verify_output
  // has already required that all of them passed.
  bool present = true;
  for (int j = 1; j <= 3; ++j) {
    const std::string r = slurp(dir / ("stage_" + std::to_string(j)) / "report.txt");
    for (const char* name : {"a.disc_invariant", "b.P_absorbed", "b.P_retained", "c.injective", "c.image_in_D"})
      if (r.find(std::string("name: ") + name) == std::string::npos) present = false;
  }
  const bool marks = o.result.summary.find("marks_ok: true") != std::string::npos;
  const bool ok = o.result.exit_code == 0 && v.ok && v.stages == 4 && present && marks &&
                  o.seconds < 600.0;
  verdict(4, ok,
          "exit " + std::to_string(o.result.exit_code) + ", stages verified " + std::to_string(v.stages) +
              ", (a)-(c) checks present " + (present ? "yes" : "no") +
              ", marked orbits " + (marks ? "ok" : "not ok") + ", " + fmt(o.seconds) + " s");
}

void criterion_scaffold(int n, const EngineOutcome& o, double budget) {
  const std::string failure = first_line_with(o.result.summary, "failure:");
  const std::string emitted = first_line_with(o.result.summary, "stages_emitted:");
  const bool ok = o.result.exit_code == 0 && o.seconds < budget;
  verdict(n, ok,
          "exit " + std::to_string(o.result.exit_code) + ", " + emitted +
              (failure.empty() ? "" : ", " + failure) + ", " + fmt(o.seconds) + " s");
}

void criterion7(const fs::path& uniform_dir) {
  const CompactSet disc = disc_set(0.0, 1.0, 0.002);
  const double theta = 1.3;
  auto arc = [theta](cplx x) {
    double a = std::arg(x);
    if (a < 0.0) a += 2.0 * kPi;
    return a < theta;
  };
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const HarmonicEstimate e = harmonic_measure_estimate(disc, arc, 10000, seed);
    if (std::abs(e.fraction - theta / (2.0 * kPi)) <= 3.0 * e.sigma) ++covered;
  }
  double fraction = NAN, sigma = NAN;
  if (fs::exists(uniform_dir / "harmonic.txt")) {
    const KeyValues h = read_key_values((uniform_dir / "harmonic.txt").string());
    fraction = h.get_double("fraction");
    sigma = h.get_double("sigma");
  }
  const bool ok = covered >= 18 && std::isfinite(fraction) && fraction <= 0.2;
  verdict(7, ok,
          "disc arc coverage " + std::to_string(covered) + "/20, stage-3 maverick fraction " + fmt(fraction) +
              " sigma " + fmt(sigma));
}

void criterion8() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto fd = [](const std::function<cplx(cplx)>& f, cplx z, double h) { return (f(z + h) - f(z - h)) / (2.0 * h); };
  const HalfStrip src{0.0, 3.0, 4.0};
  const ConformalChain chain = halfstrip_chain(src, {1.0, 1.25}, cplx(1.0, 3.5), 0.0);
  const SpikeMap phi = spike_map({std::polar(1.0, 0.3), std::polar(1.0, 2.0), std::polar(1.0, -1.5)}, {1.0, 2.0},
                                 cplx(0.0, 1.5), 1.0);
  const auto chain_map = chain.as_map();
  const auto phi_map_ = phi.as_map();
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const cplx z(0.2 + 3.0 * u(rng), 3.05 + 0.9 * u(rng));
    const double s = std::min({z.real(), z.imag() - 3.0, 4.0 - z.imag()});
    worst = std::max(worst, std::abs(fd(chain_map.value, z, 1e-6 * s) - chain.derivative(z)) /
                                std::abs(chain.derivative(z)));
    const cplx w = std::polar(0.9 * std::sqrt(u(rng)), 2.0 * kPi * u(rng));
    const double ws = 1.0 / phi.blend_radius - std::abs(w);
    worst = std::max(worst, std::abs(fd(phi_map_.value, w, 1e-6 * ws) - phi.derivative(w)) /
                                std::abs(phi.derivative(w)));
  }
  const double a = 0.3;
  auto boundary_distance = [&](cplx z) {
    const double x = std::clamp(z.real(), a, 1.0);
    return std::min(1.0 - std::abs(z), std::abs(z - cplx(x, 0.0)));
  };
  auto sample = [&] {
    while (true) {
      const cplx z = std::polar(0.97 * std::sqrt(u(rng)), 2.0 * kPi * u(rng));
      if (boundary_distance(z) > 1e-3) return z;
    }
  };
  int violations = 0;
  for (int k = 0; k < 100; ++k) {
    const cplx z1 = sample(), z2 = sample();
    const double delta = std::min(boundary_distance(z1), boundary_distance(z2));
    const double exact = halfplane_distance(slit_disc_to_halfplane(a, z1), slit_disc_to_halfplane(a, z2));
    if (hyperbolic_lower_bound(std::abs(z1 - z2), delta) > exact + 1e-12) ++violations;
  }
  verdict(8, worst <= 1e-6 && violations == 0,
          "worst relative derivative error " + fmt(worst) + " on 2000 evaluations, hyperbolic bound violations " +
              std::to_string(violations) + "/100");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "wander_acceptance";
  fs::create_directories(work);
  std::cout << "work_dir: " << work.string() << std::endl;

  criterion1();
  criterion2();
  criterion3();

  const EngineOutcome u1 = run_timed(uniform_config(work / "uniform_a"));
  criterion4(u1, work / "uniform_a");
  const EngineOutcome m1 = run_timed(maverick_config(work / "maverick_a"));
  criterion_scaffold(5, m1, 900.0);
  const EngineOutcome e1 = run_timed(eremenko_config(work / "eremenko_a"));
  criterion_scaffold(6, e1, 900.0);
  criterion7(work / "uniform_a");
  criterion8();

  run_timed(uniform_config(work / "uniform_b"));
  run_timed(maverick_config(work / "maverick_b"));
  const std::string ua = all_reports(work / "uniform_a"), ub = all_reports(work / "uniform_b");
  const std::string ma = all_reports(work / "maverick_a"), mb = all_reports(work / "maverick_b");
  const bool same_u = !ua.empty() && ua == ub;
  const bool same_m = !ma.empty() && ma == mb;
  const bool same_img = slurp(work / "uniform_a" / "escape.ppm") == slurp(work / "uniform_b" / "escape.ppm");
  verdict(9, same_u && same_m && same_img,
          std::string("uniform reports identical ") + (same_u ? "yes" : "no") + ", maverick reports identical " +
              (same_m ? "yes" : "no") + ", uniform image identical " + (same_img ? "yes" : "no"));
  return failures;
}
