#pragma once

// Config-driven runs: engine, dynamics checks on marked points, rendering and
// the summary report. Config files are sectioned key: value text, documented
// in the README.

#include <cstdint>
#include <optional>
#include <string>

#include "wander/engines.hpp"
#include "wander/render.hpp"
#include "wander/textio.hpp"
#include "wander/wada.hpp"

namespace wander {

enum class EngineKind { Uniform, Maverick, Eremenko };
enum class GeometrySource { Wada, Disc, Ray };

const char* to_string(EngineKind e);
const char* to_string(GeometrySource g);

struct RunConfig {
  EngineKind engine = EngineKind::Uniform;
  int stages = 3;
  int j_max = 4;
  std::uint64_t seed = 20240601;
  std::string output = "out";
  int horizon = 40;

  GeometrySource geometry = GeometrySource::Wada;
  WadaOptions wada;
  cplx disc_center{0.0, 1.5};
  double disc_radius = 0.25;
  double r_max = 10.0;

  /// Plane window for rendering and orbit checks; defaults depend on the engine.
  std::optional<cplx> window_lo, window_hi;

  int width = 640;
  int height = 0;  // 0: follow the window aspect ratio
  int max_iter = 48;
  double gate = 1e6;
  kernels::Gate gate_kind = kernels::Gate::Modulus;
  int palette = 0;
  bool overlay = true;

  double epsilon_start = 0.1;
  int degree_cap = 0;  // 0: engine default
  int fault_stage = -1;
  double eps_cap = 0.2;

  int walkers = 10000;
  double maverick_threshold = 0.1;

  /// Throws Config naming the offending field.
  void validate() const;
  /// Resolved window (explicit or the engine default).
  std::pair<cplx, cplx> window() const;
  std::string text() const;
};

/// Throws Config on unknown values or malformed fields.
RunConfig parse_run_config(const KeyValues& kv);
RunConfig load_run_config(const std::string& path);

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputEnv = "WANDER_OUTPUT_DIR";

struct PipelineResult {
  int exit_code = 0;  // 0 all stages passed, 1 a stage failed, 2 config error
  std::string summary;
  std::string output_dir;
};

/// Runs the configured engine, checks marked orbits, estimates the maverick
/// boundary fraction (uniform engine), renders, and writes everything under
/// config.output. Config errors give exit code 2 before anything is written.
PipelineResult run_pipeline(const RunConfig& config);

/// Re-reads a run directory: every stage report passed, every polynomial
/// loads, and every certificate bound is within its stage epsilon.
struct VerifyResult {
  bool ok = true;
  int stages = 0;
  std::string text;
};
VerifyResult verify_output(const std::string& dir);

/// Renders f over the configured window (f from a polynomial file, or "phi").
Image render_from_config(const RunConfig& config, const std::string& function);

}  // namespace wander
