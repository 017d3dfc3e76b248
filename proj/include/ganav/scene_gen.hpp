#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ganav/render.hpp"
#include "ganav/scene.hpp"

namespace ganav::sim {

// World-side description of an object category: its size, colours and how
// strongly each of its attributes shows in those colours.
struct CategoryModel {
  std::string name;
  int length = 1;  // cells along the part edge
  int depth = 1;
  double height = 0.8;
  Rgb body;
  Rgb part;
  bool part_is_edge = true;  // otherwise the whole footprint carries the part band
  SalienceTable body_salience;
  SalienceTable part_salience;
  // Geometric parts then affordances, in the order the attribute fixtures use.
  std::vector<std::string> geometric;
  std::vector<std::string> affordance;
};

// Navigable target categories, then salience-free clutter, then the companion
// model placed next to targets.
const std::vector<CategoryModel>& catalogue();
const CategoryModel& category_model(std::string_view name);
std::vector<std::string> target_categories();

inline constexpr double kSceneResolution = 0.1;
inline constexpr int kMaxAttempts = 20;

struct GenerationLimits {
  double inflation_radius = 0.18;
  // A reachable cell must lie this close to the target footprint.
  double approach_distance = 0.6;
};

// Seeded scene. Throws GenerationFailed when no attempt passes the checks.
Scene generate_scene(std::uint64_t seed, Difficulty difficulty, const GenerationLimits& limits = {});

// Free cells the inflated agent can reach from spawn.
std::vector<std::uint8_t> reachable_cells(const Scene& scene, double inflation_radius);
bool target_reachable(const Scene& scene, const GenerationLimits& limits = {});

// Target part pixels over all surface pixels in the spawn view.
double part_view_fraction(const Scene& scene, const Sensor& sensor = {});

}  // namespace ganav::sim
