#include "wander/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "wander/dynamics.hpp"

namespace fs = std::filesystem;

namespace wander {

const char* to_string(EngineKind e) {
  switch (e) {
    case EngineKind::Uniform: return "uniform";
    case EngineKind::Maverick: return "maverick";
    case EngineKind::Eremenko: return "eremenko";
  }
  return "?";
}

const char* to_string(GeometrySource g) {
  switch (g) {
    case GeometrySource::Wada: return "wada";
    case GeometrySource::Disc: return "disc";
    case GeometrySource::Ray: return "ray";
  }
  return "?";
}

namespace {

const char* gate_name(kernels::Gate g) {
  switch (g) {
    case kernels::Gate::Modulus: return "modulus";
    case kernels::Gate::AbsReal: return "real";
    case kernels::Gate::AbsImag: return "imag";
  }
  return "?";
}

Error config_error(const std::string& field, const std::string& what) {
  return Error(ErrorKind::Config, field + ": " + what);
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw config_error(field, "expected true or false, got " + text);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "run.engine",        "run.stages",          "run.j_max",         "run.seed",         "run.output",
      "run.horizon",       "geometry.source",     "geometry.lakes",    "geometry.rounds",  "geometry.grid",
      "geometry.island_radius", "geometry.lake_radius", "geometry.lake_ring", "geometry.center",
      "geometry.radius",   "geometry.r_max",      "window.lo",         "window.hi",        "render.width",
      "render.height",     "render.max_iter",     "render.gate",       "render.gate_kind", "render.palette",
      "render.overlay",    "engine.epsilon_start", "engine.degree_cap", "engine.fault_stage", "engine.eps_cap",
      "harmonic.walkers",  "harmonic.threshold"};
  return keys;
}

bool covers(std::pair<cplx, cplx> w, cplx lo, cplx hi) {
  return w.first.real() <= lo.real() && w.first.imag() <= lo.imag() && w.second.real() >= hi.real() &&
         w.second.imag() >= hi.imag();
}

}  // namespace

// ---------------------------------------------------------------------------

RunConfig parse_run_config(const KeyValues& kv) {
  for (const auto& [key, value] : kv.values)
    if (!known_keys().count(key)) throw config_error(key, "unknown key");
  RunConfig c;
  const std::string engine = kv.get("run.engine", "uniform");
  if (engine == "uniform")
    c.engine = EngineKind::Uniform;
  else if (engine == "maverick")
    c.engine = EngineKind::Maverick;
  else if (engine == "eremenko")
    c.engine = EngineKind::Eremenko;
  else
    throw config_error("run.engine", "unknown engine " + engine);
  c.stages = static_cast<int>(kv.get_int("run.stages", c.stages));
  c.j_max = static_cast<int>(kv.get_int("run.j_max", c.j_max));
  const long long seed = kv.get_int("run.seed", static_cast<long long>(c.seed));
  if (seed < 0) throw config_error("run.seed", "must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.output = kv.get("run.output", c.output);
  c.horizon = static_cast<int>(kv.get_int("run.horizon", c.horizon));

  const std::string default_source = c.engine == EngineKind::Uniform   ? "wada"
                                     : c.engine == EngineKind::Maverick ? "disc"
                                                                         : "ray";
  const std::string source = kv.get("geometry.source", default_source);
  if (source == "wada")
    c.geometry = GeometrySource::Wada;
  else if (source == "disc")
    c.geometry = GeometrySource::Disc;
  else if (source == "ray")
    c.geometry = GeometrySource::Ray;
  else
    throw config_error("geometry.source", "unknown source " + source);
  c.wada.lakes = static_cast<int>(kv.get_int("geometry.lakes", c.wada.lakes));
  c.wada.rounds = static_cast<int>(kv.get_int("geometry.rounds", c.wada.rounds));
  c.wada.grid = static_cast<int>(kv.get_int("geometry.grid", c.wada.grid));
  c.wada.island_radius = kv.get_double("geometry.island_radius", c.wada.island_radius);
  c.wada.lake_radius = kv.get_double("geometry.lake_radius", c.wada.lake_radius);
  c.wada.lake_ring = kv.get_double("geometry.lake_ring", c.wada.lake_ring);
  c.disc_center = kv.get_complex("geometry.center", c.disc_center);
  c.disc_radius = kv.get_double("geometry.radius", c.disc_radius);
  c.r_max = kv.get_double("geometry.r_max", c.r_max);

  if (kv.has("window.lo") != kv.has("window.hi")) throw config_error("window", "give both lo and hi");
  if (kv.has("window.lo")) {
    c.window_lo = kv.get_complex("window.lo");
    c.window_hi = kv.get_complex("window.hi");
  }

  c.width = static_cast<int>(kv.get_int("render.width", c.width));
  c.height = static_cast<int>(kv.get_int("render.height", c.height));
  c.max_iter = static_cast<int>(kv.get_int("render.max_iter", c.max_iter));
  c.gate = kv.get_double("render.gate", c.gate);
  const std::string gk = kv.get("render.gate_kind", "modulus");
  if (gk == "modulus")
    c.gate_kind = kernels::Gate::Modulus;
  else if (gk == "real")
    c.gate_kind = kernels::Gate::AbsReal;
  else if (gk == "imag")
    c.gate_kind = kernels::Gate::AbsImag;
  else
    throw config_error("render.gate_kind", "expected modulus, real or imag, got " + gk);
  c.palette = static_cast<int>(kv.get_int("render.palette", c.palette));
  c.overlay = parse_bool("render.overlay", kv.get("render.overlay", "true"));

  c.epsilon_start = kv.get_double("engine.epsilon_start", c.epsilon_start);
  c.degree_cap = static_cast<int>(kv.get_int("engine.degree_cap", c.degree_cap));
  c.fault_stage = static_cast<int>(kv.get_int("engine.fault_stage", c.fault_stage));
  c.eps_cap = kv.get_double("engine.eps_cap", c.eps_cap);
  c.walkers = static_cast<int>(kv.get_int("harmonic.walkers", c.walkers));
  c.maverick_threshold = kv.get_double("harmonic.threshold", c.maverick_threshold);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  try {
    return parse_run_config(read_key_values(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw Error(ErrorKind::Config, std::string("cannot read config: ") + e.what());
    throw;
  }
}

std::pair<cplx, cplx> RunConfig::window() const {
  if (window_lo && window_hi) return {*window_lo, *window_hi};
  if (engine == EngineKind::Uniform) return {cplx(-4.5, -1.5), cplx(3.0 * stages + 1.5, 1.5)};
  return {cplx(-r_max, -1.0), cplx(r_max, 5.0)};
}

void RunConfig::validate() const {
  if (j_max < 1 || j_max > 24) throw config_error("run.j_max", "must be between 1 and 24");
  if (stages < 1) throw config_error("run.stages", "must be at least 1");
  if (stages > j_max)
    throw config_error("run.stages", std::to_string(stages) + " exceeds run.j_max = " + std::to_string(j_max));
  if (horizon < 10) throw config_error("run.horizon", "must be at least 10");
  if (output.empty()) throw config_error("run.output", "must not be empty");
  if (engine == EngineKind::Uniform && geometry == GeometrySource::Ray)
    throw config_error("geometry.source", "the uniform engine needs a wada or disc set");
  if (engine == EngineKind::Maverick && geometry != GeometrySource::Disc)
    throw config_error("geometry.source", "the maverick engine needs a disc");
  if (engine == EngineKind::Eremenko && geometry != GeometrySource::Ray)
    throw config_error("geometry.source", "the eremenko engine needs the ray");
  if (geometry == GeometrySource::Wada) {
    if (wada.lakes < 2) throw config_error("geometry.lakes", "need at least two lakes");
    if (wada.grid < 64 || wada.grid > 4096) throw config_error("geometry.grid", "must be between 64 and 4096");
    if (wada.rounds < 0) throw config_error("geometry.rounds", "must be non-negative");
  }
  if (geometry == GeometrySource::Disc && !(disc_radius > 0.0))
    throw config_error("geometry.radius", "must be positive");
  if (engine != EngineKind::Uniform && !(r_max >= 10.0)) throw config_error("geometry.r_max", "must be at least 10");
  if (width < 1 || width > 8192) throw config_error("render.width", "must be between 1 and 8192");
  if (height < 0 || height > 8192) throw config_error("render.height", "must be between 0 and 8192");
  if (max_iter < 1) throw config_error("render.max_iter", "must be positive");
  if (!(gate > 0.0)) throw config_error("render.gate", "must be positive");
  if (palette < 0 || palette > 1) throw config_error("render.palette", "must be 0 or 1");
  if (!(epsilon_start > 0.0 && epsilon_start < 0.25))
    throw config_error("engine.epsilon_start", "must lie in (0, 1/4)");
  if (degree_cap < 0) throw config_error("engine.degree_cap", "must be non-negative");
  if (walkers < 0) throw config_error("harmonic.walkers", "must be non-negative");

  const auto w = window();
  if (!(w.first.real() < w.second.real() && w.first.imag() < w.second.imag()))
    throw config_error("window", "lo must be below and left of hi");
  if (engine == EngineKind::Uniform) {
    if (!covers(w, cplx(-4.0, -1.0), cplx(3.0 * stages + 1.0, 1.0)))
      throw config_error("window", "does not cover D(-3, 1) through D(3J, 1)");
  } else if (engine == EngineKind::Maverick) {
    // K is moved into T_0 = {3 < Im z < 4} before use.
    const double x = disc_center.real();
    if (!covers(w, cplx(std::min(x - disc_radius, -0.5), -0.5), cplx(std::max(x + disc_radius, 0.5), 4.0)))
      throw config_error("window", "does not cover K in T_0 and D");
  } else {
    if (!covers(w, cplx(-0.5, -0.5), cplx(0.75 * r_max, 3.5)))
      throw config_error("window", "does not cover the ray K and D");
  }
}

std::string RunConfig::text() const {
  std::ostringstream out;
  const auto w = window();
  out << "[run]\n";
  out << "engine: " << to_string(engine) << "\n";
  out << "stages: " << stages << "\n";
  out << "j_max: " << j_max << "\n";
  out << "seed: " << seed << "\n";
  out << "output: " << output << "\n";
  out << "horizon: " << horizon << "\n";
  out << "[geometry]\n";
  out << "source: " << to_string(geometry) << "\n";
  out << "lakes: " << wada.lakes << "\n";
  out << "rounds: " << wada.rounds << "\n";
  out << "grid: " << wada.grid << "\n";
  out << "island_radius: " << fmt17(wada.island_radius) << "\n";
  out << "lake_radius: " << fmt17(wada.lake_radius) << "\n";
  out << "lake_ring: " << fmt17(wada.lake_ring) << "\n";
  out << "center: " << fmt17(disc_center) << "\n";
  out << "radius: " << fmt17(disc_radius) << "\n";
  out << "r_max: " << fmt17(r_max) << "\n";
  out << "[window]\n";
  out << "lo: " << fmt17(w.first) << "\n";
  out << "hi: " << fmt17(w.second) << "\n";
  out << "[render]\n";
  out << "width: " << width << "\n";
  out << "height: " << height << "\n";
  out << "max_iter: " << max_iter << "\n";
  out << "gate: " << fmt17(gate) << "\n";
  out << "gate_kind: " << gate_name(gate_kind) << "\n";
  out << "palette: " << palette << "\n";
  out << "overlay: " << (overlay ? "true" : "false") << "\n";
  out << "[engine]\n";
  out << "epsilon_start: " << fmt17(epsilon_start) << "\n";
  out << "degree_cap: " << degree_cap << "\n";
  out << "fault_stage: " << fault_stage << "\n";
  out << "eps_cap: " << fmt17(eps_cap) << "\n";
  out << "[harmonic]\n";
  out << "walkers: " << walkers << "\n";
  out << "threshold: " << fmt17(maverick_threshold) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------

namespace {

View make_view(const RunConfig& c) {
  const auto [lo, hi] = c.window();
  View v;
  v.lo = lo;
  v.hi = hi;
  v.width = c.width;
  v.height = c.height > 0 ? c.height
                          : std::clamp(static_cast<int>(std::lround(c.width * (hi.imag() - lo.imag()) /
                                                                     (hi.real() - lo.real()))),
                                       1, 8192);
  return v;
}

RenderOptions make_render_options(const RunConfig& c) {
  RenderOptions o;
  o.max_iter = c.max_iter;
  o.gate = c.gate;
  o.gate_kind = c.gate_kind;
  o.palette = c.palette;
  return o;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

cplx deepest_point(const CompactSet& u) {
  Mask outside(u.window.size());
  for (std::size_t k = 0; k < outside.size(); ++k) outside[k] = u.mask[k] ? 0 : 1;
  const auto d2 = distance_to_mask(u.window, outside);
  double best = -1.0;
  cplx at{};
  for (int j = 0; j < u.window.ny; ++j)
    for (int i = 0; i < u.window.nx; ++i)
      if (u.mask[u.window.index(i, j)] && d2[u.window.index(i, j)] > best) {
        best = d2[u.window.index(i, j)];
        at = u.window.center(i, j);
      }
  return at;
}

const CompactSet* find_region(const StageState& s, const std::string& name) {
  for (const auto& r : s.regions)
    if (r.name == name) return &r.set;
  return nullptr;
}

/// Orbits of the P_j nets under the final stage function: each point should
/// reach D(-3, 1) after j + 1 steps and stay there until the horizon.
std::string uniform_marks(const EngineRun& run, int horizon, bool& ok) {
  std::ostringstream out;
  ok = true;
  const StageState& last = run.stages.back();
  const AnalyticMap f = last.f->as_map();
  int total = 0;
  for (std::size_t s = 1; s < run.stages.size(); ++s) {
    const auto& net = run.stages[s].nets.front();
    int absorbed = 0, retained = 0;
    for (cplx z : net.points) {
      cplx w = z;
      int first = -1;
      bool stays = true;
      for (int n = 1; n <= horizon; ++n) {
        w = f(w);
        const bool inside = std::abs(w + 3.0) < 1.0;
        if (inside && first < 0) first = n;
        if (first >= 0 && !inside) stays = false;
      }
      if (first == static_cast<int>(s)) ++absorbed;
      if (first >= 0 && stays) ++retained;
      ++total;
    }
    const bool net_ok = absorbed == static_cast<int>(net.points.size()) && retained == absorbed;
    ok = ok && net_ok;
    out << "net." << net.name << ": points " << net.points.size() << " absorbed_at_" << s << " " << absorbed
        << " retained " << retained << "\n";
  }
  out << "marks: " << total << "\n";
  out << "horizon: " << horizon << "\n";
  out << "ok: " << (ok ? "true" : "false") << "\n";
  return out.str();
}

void draw_overlay(Image& img, const View& view, const RunConfig& c, const EngineRun& run) {
  if (c.engine == EngineKind::Uniform) {
    for (int j = -1; j <= c.stages; ++j) draw_circle(img, view, cplx(3.0 * j, 0.0), 1.0, kOverlayDisc);
    for (const auto& s : run.stages)
      for (const auto& r : s.regions)
        if (r.name.rfind("K.", 0) == 0)
          for (const auto& loop : r.set.loops) draw_polyline(img, view, loop, kOverlaySet);
    return;
  }
  const ScaffoldConfig sc = build_scaffold(c.stages + 1, c.r_max);
  for (std::size_t j = 0; j < sc.s.size(); ++j)
    for (const StripBounds* b : {&sc.s[j], &sc.t[j]}) {
      draw_hline(img, view, b->lo(), kOverlayStrip);
      draw_hline(img, view, b->hi(), kOverlayStrip);
    }
  draw_circle(img, view, 0.0, sc.d_radius, kOverlayDisc);
  if (c.engine == EngineKind::Maverick) {
    const double t_mid = 0.5 * (sc.t[0].lo() + sc.t[0].hi());
    draw_circle(img, view, cplx(c.disc_center.real(), t_mid), c.disc_radius, kOverlaySet);
  } else {
    draw_polyline(img, view, {cplx(0.0, 3.5), cplx(0.75 * c.r_max, 3.5)}, kOverlaySet, false);
  }
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
  PipelineResult result;
  result.output_dir = config.output;
  try {
    config.validate();
  } catch (const Error& e) {
    result.exit_code = 2;
    result.summary = e.what();
    return result;
  }
  const fs::path out(config.output);
  fs::create_directories(out);
  write_text(out / "config.txt", config.text());

  EngineRun run;
  std::string engine_error;
  try {
    if (config.engine == EngineKind::Uniform) {
      UniformConfig u;
      u.stages = config.stages;
      u.epsilon_start = config.epsilon_start;
      u.fit.seed = config.seed;
      if (config.degree_cap > 0) u.fit.degree_cap = config.degree_cap;
      u.fault_stage = config.fault_stage;
      CompactSet k = config.geometry == GeometrySource::Wada
                         ? wada_build(config.wada).filled()
                         : disc_set(config.disc_center, config.disc_radius, config.disc_radius / 64.0);
      run = uniform_escape_run(k, u);
    } else {
      ScaffoldEngineConfig s;
      s.stages = config.stages;
      s.r_max = config.r_max;
      s.eps_cap = config.eps_cap;
      s.fit.seed = config.seed;
      if (config.degree_cap > 0) s.fit.degree_cap = config.degree_cap;
      s.fault_stage = config.fault_stage;
      if (config.engine == EngineKind::Maverick) {
        MaverickSpec spec;
        spec.center = config.disc_center;
        spec.radius = config.disc_radius;
        run = maverick_run(spec, s);
      } else {
        run = eremenko_run(s);
      }
    }
  } catch (const Error& e) {
    engine_error = e.what();
    run.engine = to_string(config.engine);
  }

  for (const auto& s : run.stages) write_stage(s, (out / ("stage_" + std::to_string(s.j))).string());
  if (run.failed_report) {
    const fs::path dir = out / ("stage_" + std::to_string(run.failed_report->stage) + "_failed");
    fs::create_directories(dir);
    run.failed_report->write((dir / "report.txt").string());
  }
  {
    std::ostringstream d;
    for (std::size_t k = 0; k < run.diagnostics.size(); ++k) d << "diagnostic." << k << ": " << run.diagnostics[k] << "\n";
    write_text(out / "diagnostics.txt", d.str());
  }

  const bool all_passed = engine_error.empty() && run.complete &&
                          std::all_of(run.stages.begin(), run.stages.end(),
                                      [](const StageState& s) { return s.report.passed(); });

  std::ostringstream summary;
  summary << "engine: " << to_string(config.engine) << "\n";
  summary << "stages_requested: " << config.stages << "\n";
  summary << "stages_emitted: " << run.stages.size() << "\n";
  summary << "complete: " << (run.complete ? "true" : "false") << "\n";
  for (const auto& s : run.stages) {
    summary << "stage." << s.j << ".passed: " << (s.report.passed() ? "true" : "false") << "\n";
    summary << "stage." << s.j << ".epsilon: " << fmt17(s.epsilon) << "\n";
    summary << "stage." << s.j << ".degree: " << (s.f ? s.f->degree() : -1) << "\n";
  }
  if (!engine_error.empty()) summary << "failure: " << engine_error << "\n";
  if (!run.failure.empty()) summary << "failure: " << run.failure << "\n";
  if (run.failed_report)
    if (const ContractCheck* bad = run.failed_report->first_failure())
      summary << "failing_contract: stage " << run.failed_report->stage << " " << bad->name << "\n";

  const bool have_f = !run.stages.empty() && run.stages.back().f;
  if (config.engine == EngineKind::Uniform && run.stages.size() > 1) {
    bool marks_ok = false;
    write_text(out / "marks.txt", uniform_marks(run, config.horizon, marks_ok));
    summary << "marks_ok: " << (marks_ok ? "true" : "false") << "\n";

    if (config.walkers > 0) {
      const StageState& last = run.stages.back();
      if (const CompactSet* u = find_region(last, "K." + std::to_string(last.j))) {
        const AnalyticMap f = last.f->as_map();
        const cplx anchor = deepest_point(*u);
        const int h = last.j;
        const double thr = config.maverick_threshold;
        WalkOptions wo;
        wo.start = anchor;
        const HarmonicEstimate est = harmonic_measure_estimate(
            *u, [&](cplx z) { return maverick_detect(f, anchor, z, h, thr).maverick; }, config.walkers, config.seed,
            wo);
        std::ostringstream hm;
        hm << "domain: K." << last.j << "\n";
        hm << "anchor: " << fmt17(anchor) << "\n";
        hm << "maverick_horizon: " << h << "\n";
        hm << "threshold: " << fmt17(thr) << "\n";
        hm << "walkers: " << est.walkers << "\n";
        hm << "hits: " << est.hits << "\n";
        hm << "discarded: " << est.discarded << "\n";
        hm << "fraction: " << fmt17(est.fraction) << "\n";
        hm << "sigma: " << fmt17(est.sigma) << "\n";
        hm << "seed: " << est.seed << "\n";
        write_text(out / "harmonic.txt", hm.str());
        summary << "maverick_fraction: " << fmt17(est.fraction) << "\n";
        summary << "maverick_sigma: " << fmt17(est.sigma) << "\n";
      }
    }
  }

  if (have_f) {
    const View view = make_view(config);
    Image img = render_escape(run.stages.back().f->as_map(), view, make_render_options(config));
    if (config.overlay) draw_overlay(img, view, config, run);
    img.write_ppm((out / "escape.ppm").string());
    summary << "image: escape.ppm\n";
  }

  result.exit_code = all_passed ? 0 : 1;
  summary << "exit_code: " << result.exit_code << "\n";
  result.summary = summary.str();
  write_text(out / "summary.txt", result.summary);
  return result;
}

// ---------------------------------------------------------------------------

VerifyResult verify_output(const std::string& dir) {
  VerifyResult r;
  std::ostringstream text;
  std::vector<std::pair<int, fs::path>> stages;
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_directory() || name.rfind("stage_", 0) != 0) continue;
    if (name.size() > 7 && name.substr(name.size() - 7) == "_failed") {
      r.ok = false;
      text << name << ": failed stage present\n";
      continue;
    }
    stages.emplace_back(std::stoi(name.substr(6)), entry.path());
  }
  std::sort(stages.begin(), stages.end());
  for (const auto& [j, path] : stages) {
    const KeyValues report = read_key_values((path / "report.txt").string());
    const KeyValues stage = read_key_values((path / "stage.txt").string());
    const CertifiedPolynomial p = CertifiedPolynomial::read((path / "polynomial.txt").string());
    const KeyValues cert = read_key_values((path / "certificate.txt").string());
    const bool passed = report.get("passed") == "true";
    const double eps = stage.get_double("epsilon");
    const double bound = cert.get_double("inflated_bound");
    const bool within = j == 0 || bound <= eps;
    text << "stage." << j << ": passed " << (passed ? "true" : "false") << " degree " << p.degree() << " bound "
         << fmt17(bound) << " epsilon " << fmt17(eps) << (within ? "" : " EXCEEDS") << "\n";
    r.ok = r.ok && passed && within;
    ++r.stages;
  }
  if (stages.empty()) {
    r.ok = false;
    text << "no stages found\n";
  }
  text << "ok: " << (r.ok ? "true" : "false") << "\n";
  r.text = text.str();
  return r;
}

Image render_from_config(const RunConfig& config, const std::string& function) {
  const AnalyticMap f = function == "phi" ? phi_map() : CertifiedPolynomial::read(function).as_map();
  return render_escape(f, make_view(config), make_render_options(config));
}

}  // namespace wander
