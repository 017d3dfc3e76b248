#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ganav/scene.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kScenes = fs::path(GANAV_DEFAULT_DATA_DIR) / "scenes";

struct Run {
  int status = -1;
  std::string out;
};

Run cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "stdout.txt";
  const std::string cmd = std::string("\"") + GANAV_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  Run r;
  const int raw = std::system(cmd.c_str());
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("ganav_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("gen-scene writes a loadable scene") {
    const auto dir = scratch("gen");
    const auto r = cli("gen-scene --seed 7 --difficulty maze --out " + (dir / "s.json").string(), dir);
    CHECK(r.status == 0);
    const auto scene = ganav::sim::load_scene(dir / "s.json");
    CHECK(scene.seed == 7);
    CHECK(scene.difficulty == ganav::sim::Difficulty::Maze);
  }

  TEST_CASE("run on a fixture with artifacts, then render a heatmap") {
    const auto dir = scratch("run");
    const auto r = cli("run --scene " + (kScenes / "chair_ahead.json").string() + " --out " + (dir / "ep").string(), dir);
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("success", 0) == 0);
    std::ifstream in(dir / "ep" / "result.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["outcome"] == "success");
    CHECK(j.contains("timing"));
    CHECK(fs::exists(dir / "ep" / "trajectory.jsonl"));
    CHECK(fs::exists(dir / "ep" / "scene.json"));
    const auto side = dir / "ep" / "heatmaps" / "gamap.json";
    REQUIRE(fs::exists(side));
    const auto h = cli("render-heatmap --map " + side.string() + " --channel mean --png " + (dir / "m.png").string(), dir);
    CHECK(h.status == 0);
    CHECK(fs::file_size(dir / "m.png") > 8);
  }

  TEST_CASE("suite writes report and summary") {
    const auto dir = scratch("suite");
    std::ofstream(dir / "m.json") << R"({"name": "cli", "base": {"max_steps": 60}, "seeds": [1],
      "difficulties": ["easy"], "variants": [{"name": "gamap"}]})";
    const auto r = cli("suite --matrix " + (dir / "m.json").string() + " --out " + (dir / "o").string() + " --threads 1",
                       dir);
    CHECK(r.status == 0);
    CHECK(fs::exists(dir / "o" / "report.json"));
    CHECK(fs::exists(dir / "o" / "summary.txt"));
  }

  TEST_CASE("bad input exits non-zero with the error kind") {
    const auto dir = scratch("bad");
    CHECK(cli("run --scene /nonexistent.json", dir).status == 2);
    const auto r = cli("run --scene " + (kScenes / "chair_ahead.json").string() + " --levels 9", dir);
    CHECK(r.status == 2);
    CHECK(r.out.find("error [") != std::string::npos);
    CHECK(cli("frobnicate", dir).status != 0);
    CHECK(cli("gen-scene --seed 1", dir).status != 0);
  }
}
