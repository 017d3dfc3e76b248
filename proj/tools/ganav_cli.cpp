// Command-line driver: single episodes, suites, heatmap rendering, scene generation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "ganav/error.hpp"
#include "ganav/harness.hpp"
#include "ganav/heatmap.hpp"
#include "ganav/scene_gen.hpp"
#include "ganav/suite.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ganav;

namespace {

struct RunFlags {
  std::string config_file;
  std::string scene;
  std::uint64_t seed = 0;
  std::string difficulty;
  std::string target;
  int levels = 0;
  int ng = 0;
  int na = 0;
  std::string update_mode;
  int radius = 0;
  int max_steps = 0;
  double success_dist = 0.0;
  std::string provider;
  std::string remote_url;
  std::string policy;
  double noise = 0.0;
  std::string out;
};

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::ParseError, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  out << text;
}

// File values first, then any flag the user actually passed.
harness::EpisodeConfig episode_config(const CLI::App& cmd, const RunFlags& f) {
  harness::EpisodeConfig c;
  if (!f.config_file.empty()) c = harness::config_from_json(read_json(f.config_file));
  json flags = json::object();
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--scene")) flags["scene_file"] = f.scene;
  if (given("--seed")) flags["seed"] = f.seed;
  if (given("--difficulty")) flags["difficulty"] = f.difficulty;
  if (given("--target")) flags["target"] = f.target;
  if (given("--levels")) flags["levels"] = f.levels;
  if (given("--ng")) flags["n_geometric"] = f.ng;
  if (given("--na")) flags["n_affordance"] = f.na;
  if (given("--update-mode")) flags["update_mode"] = f.update_mode;
  if (given("--radius")) flags["candidate_radius"] = f.radius;
  if (given("--max-steps")) flags["max_steps"] = f.max_steps;
  if (given("--success-dist")) flags["success_distance"] = f.success_dist;
  if (given("--provider")) flags["provider"] = f.provider;
  if (given("--remote-url")) flags["remote_url"] = f.remote_url;
  if (given("--policy")) flags["policy"] = f.policy;
  if (given("--noise")) flags["salience_noise"] = f.noise;
  c = harness::config_from_json(flags, c);
  c.validate();
  return c;
}

int run_command(const CLI::App& cmd, const RunFlags& f) {
  const auto config = episode_config(cmd, f);
  const auto scene = harness::obtain_scene(config);
  std::optional<mapping::GaMap> last_map;
  int last_step = 0;
  harness::EpisodeHooks hooks;
  if (!f.out.empty()) {
    hooks.on_map = [&](int step, const mapping::GaMap& map) {
      last_map = map;
      last_step = step;
    };
  }
  const auto result = harness::run_episode(config, scene, hooks);

  json report = harness::to_json(result);
  report["config"] = harness::to_json(config);
  report["timing"] = {{"mean_step_seconds", result.mean_step_seconds}, {"mean_scoring_seconds", result.mean_scoring_seconds}};
  if (!f.out.empty()) {
    const fs::path dir = f.out;
    fs::create_directories(dir);
    write_text(dir / "result.json", report.dump(2) + "\n");
    harness::write_trajectory(result, dir / "trajectory.jsonl");
    sim::save_scene(scene, dir / "scene.json");
    if (last_map) heatmap::export_heatmaps(*last_map, dir / "heatmaps", "gamap", last_step);
  }
  std::cout << harness::to_string(result.outcome) << " steps=" << result.steps << " L=" << result.path_length
            << " L*=" << result.shortest_length << " d=" << result.final_distance
            << " error=" << harness::to_string(result.error) << '\n';
  return 0;
}

int suite_command(const std::string& matrix, const std::string& out, unsigned threads) {
  auto config = harness::load_suite(matrix);
  if (threads != 0) config.threads = threads;
  const auto report = harness::run_suite(config);
  const std::string summary = harness::summary_text(report);
  if (!out.empty()) {
    fs::create_directories(out);
    write_text(fs::path(out) / "report.json", harness::to_json(report).dump(2) + "\n");
    write_text(fs::path(out) / "summary.txt", summary);
  }
  std::cout << summary;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute-map object navigation engine"};
  app.require_subcommand(1);

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Run a single episode");
  run_cmd->add_option("--config", run.config_file, "JSON episode config; flags override it");
  run_cmd->add_option("--scene", run.scene, "Scene fixture file");
  run_cmd->add_option("--seed", run.seed, "Scene seed");
  run_cmd->add_option("--difficulty", run.difficulty, "easy | maze | multiscale");
  run_cmd->add_option("--target", run.target, "Target category override");
  run_cmd->add_option("--levels", run.levels, "Pyramid levels (1-4)");
  run_cmd->add_option("--ng", run.ng, "Geometric attribute count");
  run_cmd->add_option("--na", run.na, "Affordance attribute count");
  run_cmd->add_option("--update-mode", run.update_mode, "max | average | replacement");
  run_cmd->add_option("--radius", run.radius, "Candidate radius around frontiers, in cells");
  run_cmd->add_option("--max-steps", run.max_steps, "Step budget");
  run_cmd->add_option("--success-dist", run.success_dist, "Success distance in meters");
  run_cmd->add_option("--provider", run.provider, "synthetic | remote");
  run_cmd->add_option("--remote-url", run.remote_url, "Embedding service base URL");
  run_cmd->add_option("--policy", run.policy, "gamap | nearest_frontier");
  run_cmd->add_option("--noise", run.noise, "Per-observation salience noise in [0, 1]");
  run_cmd->add_option("--out", run.out, "Directory for result, trajectory and heatmaps");

  std::string matrix;
  std::string suite_out;
  unsigned threads = 0;
  auto* suite_cmd = app.add_subcommand("suite", "Run an ablation matrix");
  suite_cmd->add_option("--matrix", matrix, "Suite matrix JSON")->required();
  suite_cmd->add_option("--out", suite_out, "Directory for report.json and summary.txt");
  suite_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::string map_file;
  std::string channel = std::string(heatmap::kMeanChannel);
  std::string png;
  auto* heat_cmd = app.add_subcommand("render-heatmap", "Colourise an exported heatmap channel");
  heat_cmd->add_option("--map", map_file, "Heatmap sidecar JSON")->required();
  heat_cmd->add_option("--channel", channel, "Channel name or 'mean'");
  heat_cmd->add_option("--png", png, "Output PNG")->required();

  std::uint64_t gen_seed = 0;
  std::string gen_difficulty = "easy";
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen-scene", "Generate a scene fixture");
  gen_cmd->add_option("--seed", gen_seed, "Seed")->required();
  gen_cmd->add_option("--difficulty", gen_difficulty, "easy | maze | multiscale");
  gen_cmd->add_option("--out", gen_out, "Output scene file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_command(*run_cmd, run);
    if (suite_cmd->parsed()) return suite_command(matrix, suite_out, threads);
    if (heat_cmd->parsed()) {
      heatmap::render_png(map_file, channel, png);
      return 0;
    }
    if (gen_cmd->parsed()) {
      sim::save_scene(sim::generate_scene(gen_seed, sim::parse_difficulty(gen_difficulty)), gen_out);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
