#pragma once

#include <cstdint>
#include <optional>

#include "ganav/geometry.hpp"
#include "ganav/image.hpp"
#include "ganav/planner.hpp"
#include "ganav/scene.hpp"

namespace ganav::sim {

inline constexpr Rgb kFloorColour{128, 118, 104};
inline constexpr Rgb kWallColour{188, 188, 196};
inline constexpr Rgb kSkyColour{0, 0, 0};
// Upper fraction of an object's height drawn in the part colour.
inline constexpr double kPartBand = 0.35;

// 64 x 64 pixels, 79 degree horizontal field of view.
geometry::CameraIntrinsics default_intrinsics();

struct Sensor {
  geometry::CameraIntrinsics intrinsics = default_intrinsics();
  double camera_height = 0.88;
  double max_depth = 10.0;
};

enum class Surface : std::uint8_t { Sky, Floor, Wall, Body, Part };

struct Observation {
  RgbImage rgb;
  DepthImage depth;  // z-depth in meters; max_depth where nothing was hit
  Image<int> object;  // object index per pixel, -1 elsewhere
  Image<Surface> surface;
  Pose pose;
};

// Casts one ray per image column through the terrain grid. Walls stop the
// ray and are unbounded in height; objects are boxes of their own height that
// rows can pass over; rows below the horizon that reach the floor first see
// the floor. Throws PoseInObstacle.
Observation render(const Scene& scene, const Pose& pose, const Sensor& sensor = {});

struct Detection {
  int object = -1;
  bool is_target = false;
  double range = 0.0;    // horizontal distance to the closest visible point
  double bearing = 0.0;  // relative to the agent heading, left positive
  double x = 0.0;
  double y = 0.0;
};

struct DetectorParams {
  double detect_range = 3.0;
  double false_negative_rate = 0.0;
  double false_positive_rate = 0.0;
  std::uint64_t seed = 0;
};

// Closest visible pixel of any object satisfying `want` within range.
std::optional<Detection> nearest_visible(const Scene& scene, const Observation& obs, const Sensor& sensor,
                                         double range, bool targets);

// Reports the target when a target pixel lies within detect_range. Misses
// and spurious firings on other objects are drawn per step from the seed.
std::optional<Detection> oracle_detect(const Scene& scene, const Observation& obs, const Sensor& sensor,
                                       const DetectorParams& params, int step);

struct MoveResult {
  Pose pose;
  bool collided = false;
  // First blocked cell on a rejected move, if it lies inside the grid.
  std::optional<CellIndex> blocked_cell;
};

// Forward moves are rejected whole if the swept segment touches a blocked
// cell. Turns always succeed. Stop leaves the pose alone.
MoveResult apply_action(const Scene& scene, const Pose& pose, const planning::ActionCommand& action);

}  // namespace ganav::sim
