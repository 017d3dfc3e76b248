#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ganav/harness.hpp"

namespace ganav::harness {

// One column of the ablation matrix: config fields layered over the base.
struct Variant {
  std::string name;
  nlohmann::json overrides = nlohmann::json::object();
};

struct SuiteConfig {
  std::string name = "suite";
  EpisodeConfig base;
  std::vector<std::uint64_t> seeds;
  std::vector<sim::Difficulty> difficulties;
  std::vector<Variant> variants;
  // 0 picks the hardware concurrency.
  unsigned threads = 0;
};

// Matrix file: {"name", "base": {...}, "seeds": [..] | {"start", "count"},
// "difficulties": [..], "variants": [{"name", "overrides": {...}}]}.
SuiteConfig suite_from_json(const nlohmann::json& j);
SuiteConfig load_suite(const std::filesystem::path& path);

struct CellSummary {
  std::string variant;
  sim::Difficulty difficulty = sim::Difficulty::Easy;
  std::vector<EpisodeResult> episodes;
  // Episodes that raised instead of finishing; excluded from the metrics.
  std::vector<std::string> errors;
  double sr = 0.0;
  double spl = 0.0;
  double detection_pct = 0.0;
  double planning_pct = 0.0;
  double exploration_pct = 0.0;
  double mean_step_seconds = 0.0;
  double mean_scoring_seconds = 0.0;
};

struct SuiteReport {
  std::string name;
  std::vector<CellSummary> cells;

  const CellSummary& cell(const std::string& variant, sim::Difficulty difficulty) const;
};

// Runs every (variant, difficulty, seed) episode. Throws EmptySuite.
SuiteReport run_suite(const SuiteConfig& config);

// Timing lives under "timing" keys; strip_timing removes them.
nlohmann::json to_json(const SuiteReport& report);
nlohmann::json strip_timing(nlohmann::json j);
std::string summary_text(const SuiteReport& report);

}  // namespace ganav::harness
