#include "ganav/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>

#include "ganav/attributes.hpp"
#include "ganav/error.hpp"
#include "ganav/pyramid.hpp"
#include "ganav/remote_provider.hpp"
#include "ganav/rng.hpp"
#include "ganav/scene_gen.hpp"
#include "ganav/synthetic_provider.hpp"

namespace ganav::harness {

using nlohmann::json;
using planning::Action;
using planning::ActionCommand;

std::string_view to_string(Policy p) noexcept { return p == Policy::GaMap ? "gamap" : "nearest_frontier"; }
std::string_view to_string(ProviderKind p) noexcept { return p == ProviderKind::Synthetic ? "synthetic" : "remote"; }
std::string_view to_string(Outcome o) noexcept { return o == Outcome::Success ? "success" : "failure"; }

std::string_view to_string(ErrorClass e) noexcept {
  switch (e) {
    case ErrorClass::None: return "none";
    case ErrorClass::Detection: return "detection";
    case ErrorClass::Planning: return "planning";
    case ErrorClass::Exploration: return "exploration";
  }
  return "none";
}

Policy parse_policy(std::string_view text) {
  if (text == "gamap") return Policy::GaMap;
  if (text == "nearest_frontier" || text == "fbe") return Policy::NearestFrontier;
  fail(Errc::InvalidArgument, "unknown policy '" + std::string(text) + "'");
}

ProviderKind parse_provider(std::string_view text) {
  if (text == "synthetic") return ProviderKind::Synthetic;
  if (text == "remote") return ProviderKind::Remote;
  fail(Errc::InvalidArgument, "unknown provider '" + std::string(text) + "'");
}

void EpisodeConfig::validate() const {
  if (max_steps < 1) fail(Errc::InvalidArgument, "max_steps must be at least 1");
  if (!(success_distance > 0.0)) fail(Errc::InvalidArgument, "success_distance must be positive");
  if (levels < 1 || levels > scoring::kMaxLevels) fail(Errc::InvalidArgument, "levels must be in [1, 4]");
  if (candidate_radius < 0) fail(Errc::InvalidArgument, "candidate radius must be non-negative");
  if (!(score_tolerance >= 0.0)) fail(Errc::InvalidArgument, "score tolerance must be non-negative");
  if (n_geometric < 0 || n_affordance < 0 || n_geometric + n_affordance < 1) {
    fail(Errc::PromptCountError, "need at least one attribute channel");
  }
  for (double rate : {salience_noise, false_negative_rate, false_positive_rate}) {
    if (!(rate >= 0.0 && rate <= 1.0)) fail(Errc::InvalidArgument, "rates must lie in [0, 1]");
  }
  if (!(detect_range > 0.0)) fail(Errc::InvalidArgument, "detect_range must be positive");
  if (!(inflation_radius >= 0.0)) fail(Errc::InvalidArgument, "inflation radius must be non-negative");
}

json to_json(const EpisodeConfig& c) {
  return json{{"scene_file", c.scene_file},
              {"seed", c.seed},
              {"difficulty", std::string(sim::to_string(c.difficulty))},
              {"target", c.target},
              {"n_geometric", c.n_geometric},
              {"n_affordance", c.n_affordance},
              {"levels", c.levels},
              {"update_mode", std::string(mapping::to_string(c.update_mode))},
              {"candidate_radius", c.candidate_radius},
              {"score_tolerance", c.score_tolerance},
              {"max_steps", c.max_steps},
              {"success_distance", c.success_distance},
              {"provider", std::string(to_string(c.provider))},
              {"remote_url", c.remote_url},
              {"policy", std::string(to_string(c.policy))},
              {"attribute_dir", c.attribute_dir},
              {"salience_noise", c.salience_noise},
              {"detect_range", c.detect_range},
              {"false_negative_rate", c.false_negative_rate},
              {"false_positive_rate", c.false_positive_rate},
              {"inflation_radius", c.inflation_radius}};
}

EpisodeConfig config_from_json(const json& j, EpisodeConfig c) {
  if (!j.is_object()) fail(Errc::ParseError, "episode config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "scene_file") c.scene_file = value.get<std::string>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "difficulty") c.difficulty = sim::parse_difficulty(value.get<std::string>());
      else if (key == "target") c.target = value.get<std::string>();
      else if (key == "n_geometric") c.n_geometric = value.get<int>();
      else if (key == "n_affordance") c.n_affordance = value.get<int>();
      else if (key == "levels") c.levels = value.get<int>();
      else if (key == "update_mode") c.update_mode = mapping::parse_update_mode(value.get<std::string>());
      else if (key == "candidate_radius") c.candidate_radius = value.get<int>();
      else if (key == "score_tolerance") c.score_tolerance = value.get<double>();
      else if (key == "max_steps") c.max_steps = value.get<int>();
      else if (key == "success_distance") c.success_distance = value.get<double>();
      else if (key == "provider") c.provider = parse_provider(value.get<std::string>());
      else if (key == "remote_url") c.remote_url = value.get<std::string>();
      else if (key == "policy") c.policy = parse_policy(value.get<std::string>());
      else if (key == "attribute_dir") c.attribute_dir = value.get<std::string>();
      else if (key == "salience_noise") c.salience_noise = value.get<double>();
      else if (key == "detect_range") c.detect_range = value.get<double>();
      else if (key == "false_negative_rate") c.false_negative_rate = value.get<double>();
      else if (key == "false_positive_rate") c.false_positive_rate = value.get<double>();
      else if (key == "inflation_radius") c.inflation_radius = value.get<double>();
      else fail(Errc::ParseError, "unknown episode config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    fail(Errc::ParseError, std::string("bad episode config: ") + e.what());
  }
  return c;
}

json to_json(const EpisodeResult& r) {
  return json{{"seed", r.seed},
              {"scene", r.scene},
              {"target", r.target},
              {"outcome", std::string(to_string(r.outcome))},
              {"steps", r.steps},
              {"path_length", r.path_length},
              {"shortest_length", r.shortest_length},
              {"stop_pose", {r.stop_pose.x, r.stop_pose.y, r.stop_pose.theta}},
              {"final_distance", r.final_distance},
              {"error", std::string(to_string(r.error))},
              {"diagnostic", r.diagnostic}};
}

sim::Scene obtain_scene(const EpisodeConfig& config) {
  sim::Scene scene = config.scene_file.empty() ? sim::generate_scene(config.seed, config.difficulty)
                                               : sim::load_scene(config.scene_file);
  if (!config.target.empty() && config.target != scene.target) {
    scene.target = config.target;
    bool present = false;
    for (std::size_t k = 0; k < scene.objects.size(); ++k) present = present || scene.is_target(static_cast<int>(k));
    if (!present) fail(Errc::SceneLoadError, "scene has no '" + config.target + "' instance");
  }
  return scene;
}

double distance_to_target(const sim::Scene& scene, double x, double y) {
  double best = planning::kInf;
  const double res = scene.spec.resolution;
  for (const auto& o : scene.objects) {
    if (o.category != scene.target) continue;
    for (CellIndex c : o.footprint) {
      const double x0 = scene.spec.origin_x + c.col * res;
      const double y0 = scene.spec.origin_y + c.row * res;
      const double dx = std::max({x0 - x, 0.0, x - (x0 + res)});
      const double dy = std::max({y0 - y, 0.0, y - (y0 + res)});
      best = std::min(best, std::hypot(dx, dy));
    }
  }
  return best;
}

namespace {

planning::CostGrid ground_truth_costs(const sim::Scene& scene, double inflation_radius, const Pose& at) {
  const auto& spec = scene.spec;
  std::vector<std::uint8_t> walls(spec.cell_count());
  for (std::size_t i = 0; i < walls.size(); ++i) walls[i] = scene.terrain[i] != sim::Terrain::Free;
  const int radius = planning::inflation_cells(inflation_radius, spec.resolution);
  const auto inflated = planning::inflate(walls, spec, radius);
  planning::CostGrid grid{spec, std::vector<double>(spec.cell_count())};
  for (std::size_t i = 0; i < walls.size(); ++i) {
    const CellIndex c = spec.from_linear(i);
    const bool cleared = !walls[i] && std::hypot(spec.center_x(c) - at.x, spec.center_y(c) - at.y) <= radius * spec.resolution;
    grid.cost[i] = inflated[i] && !cleared ? planning::kInf : spec.resolution;
  }
  return grid;
}

}  // namespace

double shortest_path_length(const sim::Scene& scene, double success_distance, double inflation_radius) {
  const auto start = geometry::world_to_cell(scene.spawn.x, scene.spawn.y, scene.spec);
  if (!start || scene.blocked(*start)) fail(Errc::PoseInObstacle, "spawn is not in free space");
  auto grid = ground_truth_costs(scene, inflation_radius, scene.spawn);
  grid.cost[scene.spec.linear(*start)] = scene.spec.resolution;
  const auto field = planning::fmm_field(grid, *start);
  double best = planning::kInf;
  for (std::size_t i = 0; i < scene.spec.cell_count(); ++i) {
    const CellIndex c = scene.spec.from_linear(i);
    if (!field.reachable(c)) continue;
    if (distance_to_target(scene, scene.spec.center_x(c), scene.spec.center_y(c)) <= success_distance) {
      best = std::min(best, field.at(c));
    }
  }
  if (best == planning::kInf) fail(Errc::Unreachable, "no reachable cell lies within the success distance");
  return best;
}

namespace {

// Reachable cell closest to (x, y); ties go to the nearer cell in the field.
std::optional<CellIndex> approach_cell(const planning::DistanceField& field, double x, double y) {
  const auto& spec = field.spec();
  std::optional<CellIndex> best;
  double best_d = planning::kInf;
  double best_t = planning::kInf;
  for (std::size_t i = 0; i < spec.cell_count(); ++i) {
    const CellIndex c = spec.from_linear(i);
    if (!field.reachable(c)) continue;
    const double d = std::hypot(spec.center_x(c) - x, spec.center_y(c) - y);
    const double t = field.at(c);
    if (d < best_d || (d == best_d && t < best_t)) {
      best = c;
      best_d = d;
      best_t = t;
    }
  }
  return best;
}

using Clock = std::chrono::steady_clock;

// One full revolution at the default turn angle.
constexpr int kLookAroundTurns = 12;
constexpr double kRetargetMargin = 0.3;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

}  // namespace

EpisodeResult run_episode(const EpisodeConfig& config, const EpisodeHooks& hooks) {
  return run_episode(config, obtain_scene(config), hooks);
}

EpisodeResult run_episode(const EpisodeConfig& config, const sim::Scene& scene, const EpisodeHooks& hooks) {
  config.validate();
  EpisodeResult result;
  result.seed = config.seed;
  result.scene = config.scene_file.empty() ? std::string(sim::to_string(config.difficulty)) + ":" + std::to_string(config.seed)
                                           : config.scene_file;
  result.target = scene.target;
  result.stop_pose = scene.spawn;
  result.shortest_length = shortest_path_length(scene, config.success_distance, config.inflation_radius);
  if (!(result.shortest_length > 0.0)) fail(Errc::SceneLoadError, "spawn already lies within the success distance");

  const sim::Sensor sensor;
  const planning::MotionParams motion;
  const planning::PlannerParams planner{config.inflation_radius, 2.0};
  const sim::DetectorParams detector{config.detect_range, config.false_negative_rate, config.false_positive_rate,
                                     hash_mix(config.seed, 0xD7)};
  const mapping::FusionParams fusion{sensor.camera_height, sensor.max_depth, {}, config.update_mode, true};
  scoring::ScoringOptions scoring;
  scoring.levels = config.levels;

  // Attributes and provider.
  attributes::AttributeSource source = attributes::FixtureSource{
      config.attribute_dir.empty() ? attributes::default_fixture_dir() : std::filesystem::path(config.attribute_dir)};
  if (config.provider == ProviderKind::Remote) source = attributes::RemoteSource{config.remote_url};

  std::unique_ptr<scoring::EmbeddingProvider> provider;
  sim::SyntheticProvider* synthetic = nullptr;
  attributes::AttributeEmbeddings embeddings;
  try {
    const auto attrs = attributes::resolve_attributes(scene.target, config.n_geometric, config.n_affordance, source);
    if (config.provider == ProviderKind::Synthetic) {
      auto p = std::make_unique<sim::SyntheticProvider>(sim::SyntheticProvider::for_scene(scene, attrs.channel_names()));
      p->set_noise(config.salience_noise, hash_mix(config.seed, 0x5A));
      synthetic = p.get();
      provider = std::move(p);
    } else {
      provider = std::make_unique<remote::RemoteProvider>(config.remote_url);
    }
    embeddings = attributes::embed_attributes(attrs, *provider);
  } catch (const Error& e) {
    if (e.code() != Errc::ProviderFailure && e.code() != Errc::RemoteUnavailable) throw;
    result.error = ErrorClass::Exploration;
    result.diagnostic = e.what();
    result.final_distance = distance_to_target(scene, scene.spawn.x, scene.spawn.y);
    return result;
  }

  mapping::GaMap map(scene.spec, embeddings.names);
  const auto& spec = map.spec();
  Pose pose = scene.spawn;
  std::optional<std::pair<double, double>> target_point;
  double step_time = 0.0;
  double scoring_time = 0.0;
  bool stopped = false;
  int blind_turns = 0;

  for (int step = 0; step < config.max_steps; ++step) {
    const auto step_start = Clock::now();
    StepRecord record;
    record.step = step;
    record.pose = pose;

    const sim::Observation obs = sim::render(scene, pose, sensor);
    if (synthetic != nullptr) synthetic->set_noise_epoch(static_cast<std::uint64_t>(step));
    scoring::ScoreImage scores;
    try {
      const auto scoring_start = Clock::now();
      scores = scoring::score_observation(obs.rgb, embeddings, *provider, scoring);
      scoring_time += seconds_since(scoring_start);
    } catch (const Error& e) {
      if (e.code() != Errc::ProviderFailure) throw;
      result.diagnostic = e.what();
      break;
    }
    mapping::fuse_observation(map, scores, obs.depth, pose, sensor.intrinsics, fusion);
    map.mark_visited(pose.x, pose.y, motion.arrival_radius);
    if (hooks.on_map) hooks.on_map(step, map);

    if (const auto det = sim::oracle_detect(scene, obs, sensor, detector, step)) {
      // Keep the stored point unless the new sighting is clearly nearer, so the
      // approach goal does not hop between neighbouring cells every frame.
      if (!target_point ||
          det->range < std::hypot(pose.x - target_point->first, pose.y - target_point->second) - kRetargetMargin) {
        target_point = std::pair{det->x, det->y};
      }
      record.detected = true;
    }

    const CellIndex agent = *geometry::world_to_cell(pose.x, pose.y, spec);
    auto costs = planning::build_cost_grid(map, planner, pose);
    // The agent occupies its own cell whatever the map believes.
    if (costs.cost[spec.linear(agent)] == planning::kInf) costs.cost[spec.linear(agent)] = spec.resolution;
    const auto field = planning::fmm_field(costs, agent);

    ActionCommand action{Action::Stop, 0.0};
    if (target_point) {
      if (std::hypot(pose.x - target_point->first, pose.y - target_point->second) > config.success_distance) {
        record.goal = approach_cell(field, target_point->first, target_point->second);
      }
    } else {
      std::optional<planning::GoalChoice> choice;
      if (config.policy == Policy::GaMap) choice = planning::select_goal(map, field, config.candidate_radius, config.score_tolerance);
      if (!choice) choice = planning::nearest_frontier(map, field);
      if (choice) {
        record.goal = choice->cell;
        blind_turns = 0;
      } else if (blind_turns < kLookAroundTurns) {
        // Nothing reachable in view: turn in place before giving up.
        action = ActionCommand{Action::TurnLeft, motion.turn_angle};
        ++blind_turns;
      } else {
        result.diagnostic = "exploration exhausted";
        result.trace.push_back(record);
        step_time += seconds_since(step_start);
        break;
      }
    }
    if (record.goal && *record.goal != agent) {
      const auto path = planning::extract_path(field, *record.goal);
      action = planning::next_action(pose, path, spec, motion);
    }
    record.action = action.type;

    const sim::MoveResult moved = sim::apply_action(scene, pose, action);
    record.collided = moved.collided;
    if (action.type == Action::MoveForward && !moved.collided) result.path_length += motion.forward_step;
    if (moved.blocked_cell) {
      const auto& b = *moved.blocked_cell;
      if (const auto cell = geometry::world_to_cell(scene.spec.center_x(b), scene.spec.center_y(b), spec)) {
        map.mark_obstacle(*cell);
      }
    }
    pose = moved.pose;
    result.trace.push_back(record);
    ++result.steps;
    step_time += seconds_since(step_start);
    if (action.type == Action::Stop) {
      stopped = true;
      break;
    }
  }

  result.stop_pose = pose;
  result.final_distance = distance_to_target(scene, pose.x, pose.y);
  result.outcome = stopped && result.final_distance <= config.success_distance ? Outcome::Success : Outcome::Failure;
  if (!result.trace.empty()) {
    result.mean_step_seconds = step_time / static_cast<double>(result.trace.size());
    result.mean_scoring_seconds = scoring_time / static_cast<double>(result.trace.size());
  }
  if (result.outcome == Outcome::Failure) result.error = classify_error(result, scene, config.detect_range, sensor);
  return result;
}

double success_rate(std::span<const EpisodeResult> results) {
  if (results.empty()) fail(Errc::EmptyResults, "success rate of no episodes");
  std::size_t hits = 0;
  for (const auto& r : results) hits += r.outcome == Outcome::Success;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(results.size());
}

double spl(std::span<const EpisodeResult> results) {
  if (results.empty()) fail(Errc::EmptyResults, "SPL of no episodes");
  double total = 0.0;
  for (const auto& r : results) {
    if (!(r.shortest_length > 0.0)) fail(Errc::InvalidShortestPath, "shortest path length must be positive");
    if (!(r.path_length >= 0.0)) fail(Errc::InvalidArgument, "path length must be non-negative");
    if (r.outcome == Outcome::Success) total += r.shortest_length / std::max(r.path_length, r.shortest_length);
  }
  return 100.0 * total / static_cast<double>(results.size());
}

ErrorClass classify_error(const EpisodeResult& result, const sim::Scene& scene, double detect_range,
                          const sim::Sensor& sensor) {
  if (result.outcome != Outcome::Failure) fail(Errc::NotAFailure, "only failed episodes have an error class");

  bool saw_target = false;
  bool fired_on_target = false;
  bool fired_on_other = false;
  int still = 0;
  bool stuck = false;
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& rec = result.trace[i];
    const sim::Observation obs = sim::render(scene, rec.pose, sensor);
    const bool in_view = sim::nearest_visible(scene, obs, sensor, detect_range, true).has_value();
    saw_target = saw_target || in_view;
    if (rec.detected) (in_view ? fired_on_target : fired_on_other) = true;
    if (i > 0 && rec.pose.x == result.trace[i - 1].pose.x && rec.pose.y == result.trace[i - 1].pose.y) {
      stuck = stuck || ++still >= kStuckSteps;
    } else {
      still = 0;
    }
  }
  if ((saw_target && !fired_on_target) || fired_on_other) return ErrorClass::Detection;
  if (fired_on_target || stuck) return ErrorClass::Planning;
  return ErrorClass::Exploration;
}

void write_trajectory(const EpisodeResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  for (const auto& r : result.trace) {
    json j{{"step", r.step},
           {"pose", {r.pose.x, r.pose.y, r.pose.theta}},
           {"action", std::string(planning::to_string(r.action))},
           {"goal", r.goal ? json{r.goal->row, r.goal->col} : json(nullptr)},
           {"detected", r.detected},
           {"collided", r.collided}};
    out << j.dump() << '\n';
  }
}

}  // namespace ganav::harness
