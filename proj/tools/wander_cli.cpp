// Command-line driver: run | render | verify | wada.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "wander/pipeline.hpp"
#include "wander/wada.hpp"

using namespace wander;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> stages;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "config file (sectioned key: value text)");
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output directory (or image file for render)");
  app->add_option("--stages", c.stages, "number of stages J");
}

// Output precedence: --out, then the environment variable, then the config.
RunConfig resolve(const Common& c) {
  RunConfig config = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (c.seed) config.seed = *c.seed;
  if (c.stages) config.stages = *c.stages;
  if (const char* env = std::getenv(kOutputEnv); env && *env) config.output = env;
  if (!c.out.empty()) config.output = c.out;
  return config;
}

int cmd_run(const Common& c) {
  const RunConfig config = resolve(c);
  const PipelineResult r = run_pipeline(config);
  if (r.exit_code == 2)
    std::cerr << r.summary << "\n";
  else
    std::cout << r.summary;
  return r.exit_code;
}

int cmd_render(const Common& c, const std::string& function) {
  RunConfig config = resolve(c);
  // A render window only has to be non-degenerate; region coverage applies to runs.
  RunConfig check = config;
  check.window_lo.reset();
  check.window_hi.reset();
  check.validate();
  const auto [lo, hi] = config.window();
  if (!(lo.real() < hi.real() && lo.imag() < hi.imag()))
    throw Error(ErrorKind::Config, "window: lo must be below and left of hi");
  fs::path target(config.output);
  if (target.extension() != ".ppm") target /= "render.ppm";
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const Image img = render_from_config(config, function);
  img.write_ppm(target.string());
  std::cout << "image: " << target.string() << " " << img.width << "x" << img.height << "\n";
  return 0;
}

int cmd_verify(const std::string& dir) {
  const VerifyResult v = verify_output(dir);
  std::cout << v.text;
  return v.ok ? 0 : 1;
}

int cmd_wada(const Common& c) {
  const RunConfig config = resolve(c);
  const WadaIsland island = wada_build(config.wada);
  const fs::path out(config.output);
  fs::create_directories(out);
  write_compact_set((out / "land").string(), island.land);
  write_compact_set((out / "filled").string(), island.filled());
  for (int b = 0; b < island.bodies; ++b)
    write_pbm((out / ("body_" + std::to_string(b) + ".pbm")).string(), island.window, island.water_mask(b));
  std::ofstream info(out / "wada.txt");
  info << "lakes: " << config.wada.lakes << "\n";
  info << "rounds: " << island.iteration << "\n";
  info << "grid: " << config.wada.grid << "\n";
  info << "bodies: " << island.bodies << "\n";
  for (std::size_t r = 0; r < island.distances.size(); ++r)
    for (std::size_t b = 0; b < island.distances[r].size(); ++b)
      info << "distance." << r << "." << b << ": " << fmt17(island.distances[r][b]) << "\n";
  for (std::size_t k = 0; k < island.log.size(); ++k) info << "log." << k << ": " << island.log[k] << "\n";
  std::cout << "wada: " << island.bodies << " water bodies after " << island.iteration << " rounds in "
            << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-stage wandering domain constructions"};
  app.require_subcommand(1);

  Common run_opts, render_opts, wada_opts;
  std::string function = "phi";
  std::string verify_dir;

  auto* run = app.add_subcommand("run", "run an engine and write stages, reports and images");
  add_common(run, run_opts);
  auto* render = app.add_subcommand("render", "escape-time picture of phi or a saved polynomial");
  add_common(render, render_opts);
  render->add_option("--function", function, "\"phi\" or a polynomial.txt path");
  auto* verify = app.add_subcommand("verify", "re-check a run directory");
  verify->add_option("dir", verify_dir, "run output directory")->required();
  auto* wada = app.add_subcommand("wada", "build a Lakes of Wada island and write its masks");
  add_common(wada, wada_opts);

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (render->parsed()) return cmd_render(render_opts, function);
    if (verify->parsed()) return cmd_verify(verify_dir);
    if (wada->parsed()) return cmd_wada(wada_opts);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::Config ? 2 : 1;
  }
  return 0;
}
