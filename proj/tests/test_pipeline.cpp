#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "wander/pipeline.hpp"

using namespace wander;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wander_test_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Small disc run: quick enough for the unit suite.
RunConfig small_disc(const fs::path& out) {
  RunConfig c;
  c.engine = EngineKind::Uniform;
  c.geometry = GeometrySource::Disc;
  c.disc_center = cplx(0.2, -0.1);
  c.disc_radius = 0.5;
  c.stages = 2;
  c.width = 96;
  c.max_iter = 24;
  c.walkers = 200;
  c.output = out.string();
  return c;
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const KeyValues kv = parse_key_values(
      "[run]\nengine: maverick\nstages: 2\n[geometry]\ncenter: 0.5 1.5\nradius: 0.2\n[render]\ngate_kind: imag\n");
  const RunConfig c = parse_run_config(kv);
  CHECK(c.engine == EngineKind::Maverick);
  CHECK(c.geometry == GeometrySource::Disc);
  CHECK(c.disc_center == cplx(0.5, 1.5));
  CHECK(c.gate_kind == kernels::Gate::AbsImag);
  CHECK_NOTHROW(c.validate());

  // The text form parses back to the same config.
  CHECK(parse_run_config(parse_key_values(c.text())).text() == c.text());

  CHECK_THROWS_AS(parse_run_config(parse_key_values("[run]\nbogus: 1\n")), Error);
  CHECK_THROWS_AS(parse_run_config(parse_key_values("[run]\nengine: other\n")), Error);
  CHECK_THROWS_AS(parse_run_config(parse_key_values("[render]\ngate_kind: diagonal\n")), Error);

  RunConfig bad;
  bad.engine = EngineKind::Eremenko;
  bad.geometry = GeometrySource::Disc;
  CHECK_THROWS_AS(bad.validate(), Error);
  RunConfig small_window;
  small_window.window_lo = cplx(-1, -1);
  small_window.window_hi = cplx(1, 1);
  CHECK_THROWS_AS(small_window.validate(), Error);
}

TEST_CASE("stages beyond j_max is a config error naming the field") {
  const fs::path out = scratch("jmax");
  RunConfig c = small_disc(out);
  c.stages = 5;
  c.j_max = 4;
  const PipelineResult r = run_pipeline(c);
  CHECK(r.exit_code == 2);
  CHECK(r.summary.find("run.stages") != std::string::npos);
  CHECK(!fs::exists(out));
}

TEST_CASE("uniform disc run writes stages, summary and image, and verifies") {
  const fs::path out = scratch("ok");
  const PipelineResult r = run_pipeline(small_disc(out));
  INFO(r.summary);
  REQUIRE(r.exit_code == 0);
  for (int j = 0; j <= 2; ++j) {
    CHECK(fs::exists(out / ("stage_" + std::to_string(j)) / "report.txt"));
    CHECK(fs::exists(out / ("stage_" + std::to_string(j)) / "polynomial.txt"));
  }
  CHECK(fs::exists(out / "escape.ppm"));
  CHECK(fs::exists(out / "harmonic.txt"));
  CHECK(slurp(out / "summary.txt").find("marks_ok: true") != std::string::npos);
  const Image img = Image::read_ppm((out / "escape.ppm").string());
  CHECK(img.width == 96);

  const VerifyResult v = verify_output(out.string());
  INFO(v.text);
  CHECK(v.ok);
  CHECK(v.stages == 3);

  // Same config, same bytes.
  const fs::path again = scratch("again");
  RunConfig c2 = small_disc(again);
  REQUIRE(run_pipeline(c2).exit_code == 0);
  for (const char* f : {"stage_2/report.txt", "stage_2/polynomial.txt", "harmonic.txt", "escape.ppm"})
    CHECK(slurp(out / f) == slurp(again / f));
  fs::remove_all(out);
  fs::remove_all(again);
}

TEST_CASE("an injected fault stops the run with the contract named") {
  const fs::path out = scratch("fault");
  RunConfig c = small_disc(out);
  c.fault_stage = 1;
  const PipelineResult r = run_pipeline(c);
  CHECK(r.exit_code == 1);
  CHECK(r.summary.find("failing_contract: stage 1") != std::string::npos);
  CHECK(fs::exists(out / "stage_1_failed" / "report.txt"));
  CHECK_FALSE(verify_output(out.string()).ok);
  fs::remove_all(out);
}
