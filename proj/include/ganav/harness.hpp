#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ganav/gamap.hpp"
#include "ganav/planner.hpp"
#include "ganav/render.hpp"
#include "ganav/scene.hpp"

namespace ganav::harness {

using geometry::CellIndex;
using geometry::Pose;

enum class Policy { GaMap, NearestFrontier };
enum class ProviderKind { Synthetic, Remote };
enum class Outcome { Success, Failure };
enum class ErrorClass { None, Detection, Planning, Exploration };

std::string_view to_string(Policy p) noexcept;
std::string_view to_string(ProviderKind p) noexcept;
std::string_view to_string(Outcome o) noexcept;
std::string_view to_string(ErrorClass e) noexcept;
Policy parse_policy(std::string_view text);
ProviderKind parse_provider(std::string_view text);

inline constexpr int kStuckSteps = 30;

struct EpisodeConfig {
  // Scene: a fixture file when set, otherwise generated from seed + difficulty.
  std::string scene_file;
  std::uint64_t seed = 0;
  sim::Difficulty difficulty = sim::Difficulty::Easy;
  // Empty means the scene's own target category.
  std::string target;
  int n_geometric = 3;
  int n_affordance = 1;
  int levels = 3;
  mapping::UpdateMode update_mode = mapping::UpdateMode::Max;
  // 0.15 m, rounded down to whole cells of the 0.1 m map.
  int candidate_radius = 1;
  // Candidate scores this close to the best count as tied; the nearer wins.
  double score_tolerance = 0.0;
  int max_steps = 500;
  double success_distance = 1.0;
  ProviderKind provider = ProviderKind::Synthetic;
  std::string remote_url = "http://127.0.0.1:8765";
  Policy policy = Policy::GaMap;
  // Empty means the bundled attribute fixtures.
  std::string attribute_dir;

  // Fault and noise injection for the ablations.
  double salience_noise = 0.0;
  double detect_range = 3.0;
  double false_negative_rate = 0.0;
  double false_positive_rate = 0.0;
  double inflation_radius = 0.18;

  void validate() const;
};

nlohmann::json to_json(const EpisodeConfig& config);
// Fields absent from `j` keep the values already in `base`.
EpisodeConfig config_from_json(const nlohmann::json& j, EpisodeConfig base = {});

struct StepRecord {
  int step = 0;
  Pose pose;
  planning::Action action = planning::Action::Stop;
  std::optional<CellIndex> goal;
  bool detected = false;
  bool collided = false;
};

struct EpisodeResult {
  Outcome outcome = Outcome::Failure;
  int steps = 0;
  double path_length = 0.0;
  double shortest_length = 0.0;
  Pose stop_pose;
  double final_distance = 0.0;
  ErrorClass error = ErrorClass::None;
  std::vector<StepRecord> trace;
  std::string diagnostic;

  // Episode identity, carried into reports.
  std::uint64_t seed = 0;
  std::string scene;
  std::string target;

  // Wall-clock timing, excluded from determinism comparisons.
  double mean_step_seconds = 0.0;
  double mean_scoring_seconds = 0.0;
};

nlohmann::json to_json(const EpisodeResult& result);

// Loads or generates the scene, applying the config's target override.
sim::Scene obtain_scene(const EpisodeConfig& config);

// Geodesic length from spawn to the nearest cell within `success_distance` of
// a target footprint, over ground-truth free space with the planner's
// inflation. Throws Unreachable.
double shortest_path_length(const sim::Scene& scene, double success_distance, double inflation_radius);

// Distance from `(x, y)` to the nearest target footprint cell.
double distance_to_target(const sim::Scene& scene, double x, double y);

struct EpisodeHooks {
  // Called after every fused observation.
  std::function<void(int step, const mapping::GaMap& map)> on_map;
};

EpisodeResult run_episode(const EpisodeConfig& config, const EpisodeHooks& hooks = {});
EpisodeResult run_episode(const EpisodeConfig& config, const sim::Scene& scene, const EpisodeHooks& hooks = {});

double success_rate(std::span<const EpisodeResult> results);
double spl(std::span<const EpisodeResult> results);

// Attributes a failure to detection, planning or exploration by replaying the
// trace against the ground truth. Throws NotAFailure.
ErrorClass classify_error(const EpisodeResult& result, const sim::Scene& scene, double detect_range = 3.0,
                          const sim::Sensor& sensor = {});

// One JSON object per step.
void write_trajectory(const EpisodeResult& result, const std::filesystem::path& path);

}  // namespace ganav::harness
