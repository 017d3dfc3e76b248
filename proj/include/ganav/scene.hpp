#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ganav/geometry.hpp"
#include "ganav/image.hpp"

namespace ganav::sim {

using geometry::CellIndex;
using geometry::GridSpec;
using geometry::Pose;

enum class Terrain : std::uint8_t { Free = 0, Wall = 1, Object = 2 };

// attribute text -> salience in [0, 1]
using SalienceTable = std::map<std::string, double>;

struct ObjectInstance {
  std::string category;
  std::vector<CellIndex> footprint;
  // Subset of the footprint whose upper band is drawn in `part_colour`.
  std::vector<CellIndex> part;
  double height = 0.8;
  Rgb body_colour;
  Rgb part_colour;
  SalienceTable body_salience;
  SalienceTable part_salience;

  bool operator==(const ObjectInstance&) const = default;
};

enum class Difficulty { Easy, Maze, Multiscale, Fixture };

std::string_view to_string(Difficulty d) noexcept;
Difficulty parse_difficulty(std::string_view text);

struct Scene {
  std::uint64_t seed = 0;
  Difficulty difficulty = Difficulty::Fixture;
  GridSpec spec;
  std::vector<Terrain> terrain;
  // Index into `objects` per cell, -1 where no object stands.
  std::vector<int> object_at;
  std::vector<ObjectInstance> objects;
  Pose spawn;
  std::string target;

  Terrain terrain_at(CellIndex c) const { return terrain[spec.linear(c)]; }
  bool blocked(CellIndex c) const { return !spec.contains(c) || terrain[spec.linear(c)] != Terrain::Free; }
  bool is_target(int object) const { return object >= 0 && objects[static_cast<std::size_t>(object)].category == target; }

  // Rebuilds `object_at` and the Object terrain from the object table.
  void index_objects();
  // Checks sizes, salience ranges, and that spawn is in free space.
  void validate() const;

  bool operator==(const Scene&) const = default;
};

// Free cells reachable from `start` over 4-connected free cells.
std::vector<std::uint8_t> flood_fill(const Scene& scene, CellIndex start);

// Cells the segment from (x0, y0) along (dx, dy) passes through, in order,
// with the ray parameters where it enters and leaves each one. The visitor
// returns false to stop. Parameters are in units of the direction vector.
void traverse_cells(const GridSpec& spec, double x0, double y0, double dx, double dy, double t_max,
                    const std::function<bool(CellIndex, double, double)>& visit);

// Text serialisation: JSON with run-length encoded terrain rows.
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);
void save_scene(const Scene& scene, const std::filesystem::path& path);
Scene load_scene(const std::filesystem::path& path);

}  // namespace ganav::sim
