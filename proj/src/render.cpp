#include "ganav/render.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "ganav/error.hpp"
#include "ganav/rng.hpp"

namespace ganav::sim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Segment {
  double t_in;
  double t_out;
  int object;  // -1 for a wall
  bool part;
};

bool in_part(const ObjectInstance& o, CellIndex c) {
  for (CellIndex p : o.part) {
    if (p == c) return true;
  }
  return false;
}

}  // namespace

geometry::CameraIntrinsics default_intrinsics() {
  return geometry::CameraIntrinsics::from_hfov(64, 64, 79.0 * geometry::kPi / 180.0);
}

Observation render(const Scene& scene, const Pose& pose, const Sensor& sensor) {
  const auto& k = sensor.intrinsics;
  k.validate();
  const auto start = geometry::world_to_cell(pose.x, pose.y, scene.spec);
  if (!start || scene.blocked(*start)) fail(Errc::PoseInObstacle, "camera pose is not in free space");

  Observation obs{RgbImage(k.height, k.width, kSkyColour), DepthImage(k.height, k.width, sensor.max_depth),
                  Image<int>(k.height, k.width, -1), Image<Surface>(k.height, k.width, Surface::Sky), pose};
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  const double h = sensor.camera_height;
  std::vector<Segment> segments;

  for (int q = 0; q < k.width; ++q) {
    const double xc = (q - k.cx) / k.fx;
    // Unit z-depth along this column maps to this world displacement.
    const double dx = c + xc * s;
    const double dy = s - xc * c;
    segments.clear();
    traverse_cells(scene.spec, pose.x, pose.y, dx, dy, sensor.max_depth, [&](CellIndex cell, double t_in, double t_out) {
      const Terrain t = scene.terrain_at(cell);
      if (t == Terrain::Wall) {
        segments.push_back({t_in, t_out, -1, false});
        return false;
      }
      if (t == Terrain::Object) {
        const int id = scene.object_at[scene.spec.linear(cell)];
        segments.push_back({t_in, t_out, id, in_part(scene.objects[static_cast<std::size_t>(id)], cell)});
      }
      return true;
    });

    for (int p = 0; p < k.height; ++p) {
      const double yc = (p - k.cy) / k.fy;
      const double floor_t = yc > 0.0 ? h / yc : kInf;
      double hit_t = kInf;
      Surface surface = Surface::Sky;
      int object = -1;
      double hit_z = 0.0;
      for (const Segment& seg : segments) {
        if (floor_t < seg.t_in) break;
        if (seg.object < 0) {
          hit_t = seg.t_in;
          surface = Surface::Wall;
          break;
        }
        const double height = scene.objects[static_cast<std::size_t>(seg.object)].height;
        const double z_in = h - yc * seg.t_in;
        if (z_in <= height) {
          hit_t = seg.t_in;
          hit_z = z_in;
        } else if (yc > 0.0 && (h - height) / yc <= seg.t_out) {
          hit_t = (h - height) / yc;
          hit_z = height;
        } else {
          continue;
        }
        object = seg.object;
        surface = seg.part && hit_z >= height * (1.0 - kPartBand) ? Surface::Part : Surface::Body;
        break;
      }
      if (surface == Surface::Sky && floor_t < kInf) {
        hit_t = floor_t;
        surface = Surface::Floor;
      }
      if (surface == Surface::Sky || hit_t >= sensor.max_depth) continue;

      obs.depth(p, q) = hit_t;
      obs.surface(p, q) = surface;
      obs.object(p, q) = object;
      switch (surface) {
        case Surface::Floor: obs.rgb(p, q) = kFloorColour; break;
        case Surface::Wall: obs.rgb(p, q) = kWallColour; break;
        case Surface::Body: obs.rgb(p, q) = scene.objects[static_cast<std::size_t>(object)].body_colour; break;
        case Surface::Part: obs.rgb(p, q) = scene.objects[static_cast<std::size_t>(object)].part_colour; break;
        case Surface::Sky: break;
      }
    }
  }
  return obs;
}

std::optional<Detection> nearest_visible(const Scene& scene, const Observation& obs, const Sensor& sensor,
                                         double range, bool targets) {
  std::optional<Detection> best;
  const auto& k = sensor.intrinsics;
  for (int p = 0; p < obs.object.rows(); ++p) {
    for (int q = 0; q < obs.object.cols(); ++q) {
      const int id = obs.object(p, q);
      if (id < 0 || scene.is_target(id) != targets) continue;
      const auto point = geometry::try_back_project(k, obs.depth, p, q, sensor.max_depth);
      if (!point) continue;
      const auto w = geometry::to_world(*point, obs.pose, sensor.camera_height);
      const double r = std::hypot(w.x - obs.pose.x, w.y - obs.pose.y);
      if (r > range || (best && r >= best->range)) continue;
      const double bearing = geometry::normalize_angle(std::atan2(w.y - obs.pose.y, w.x - obs.pose.x) - obs.pose.theta);
      best = Detection{id, targets, r, bearing, w.x, w.y};
    }
  }
  return best;
}

std::optional<Detection> oracle_detect(const Scene& scene, const Observation& obs, const Sensor& sensor,
                                       const DetectorParams& params, int step) {
  const auto step_key = static_cast<std::uint64_t>(step);
  if (auto hit = nearest_visible(scene, obs, sensor, params.detect_range, true)) {
    if (params.false_negative_rate > 0.0 && hash_unit(hash_mix(params.seed, step_key, 1)) < params.false_negative_rate) {
      return std::nullopt;
    }
    return hit;
  }
  if (params.false_positive_rate > 0.0 && hash_unit(hash_mix(params.seed, step_key, 2)) < params.false_positive_rate) {
    return nearest_visible(scene, obs, sensor, params.detect_range, false);
  }
  return std::nullopt;
}

MoveResult apply_action(const Scene& scene, const Pose& pose, const planning::ActionCommand& action) {
  using planning::Action;
  switch (action.type) {
    case Action::TurnLeft: return {Pose{pose.x, pose.y, geometry::normalize_angle(pose.theta + action.amount)}, false, std::nullopt};
    case Action::TurnRight: return {Pose{pose.x, pose.y, geometry::normalize_angle(pose.theta - action.amount)}, false, std::nullopt};
    case Action::Stop: return {pose, false, std::nullopt};
    case Action::MoveForward: break;
  }
  const double dx = std::cos(pose.theta);
  const double dy = std::sin(pose.theta);
  std::optional<CellIndex> blocked;
  double reached = 0.0;
  traverse_cells(scene.spec, pose.x, pose.y, dx, dy, action.amount, [&](CellIndex cell, double, double t_out) {
    if (scene.blocked(cell)) {
      blocked = cell;
      return false;
    }
    reached = t_out;
    return true;
  });
  // Leaving the grid counts as a collision too.
  if (blocked || reached < action.amount) return {pose, true, blocked};
  return {Pose{pose.x + action.amount * dx, pose.y + action.amount * dy, pose.theta}, false, std::nullopt};
}

}  // namespace ganav::sim
