#include "ganav/geometry.hpp"

#include <cmath>
#include <string>

namespace ganav::geometry {

CameraIntrinsics CameraIntrinsics::from_hfov(int width, int height, double hfov_rad) {
  if (width <= 0 || height <= 0) fail(Errc::InvalidArgument, "image size must be positive");
  if (!(hfov_rad > 0.0 && hfov_rad < kPi)) fail(Errc::InvalidArgument, "hfov must be in (0, pi)");
  const double f = (width / 2.0) / std::tan(hfov_rad / 2.0);
  return CameraIntrinsics{f, f, width / 2.0, height / 2.0, width, height};
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) fail(Errc::InvalidArgument, "focal lengths must be positive");
  if (width <= 0 || height <= 0) fail(Errc::InvalidArgument, "image size must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    fail(Errc::InvalidArgument, "principal point outside the image");
  }
}

double normalize_angle(double theta) noexcept {
  double t = std::fmod(theta + kPi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  t -= kPi;
  // fmod can land exactly on +pi after the shift back
  if (t >= kPi) t -= 2.0 * kPi;
  return t;
}

void GridSpec::validate() const {
  if (!(resolution > 0.0)) fail(Errc::InvalidArgument, "grid resolution must be positive");
  if (rows <= 0 || cols <= 0) fail(Errc::InvalidArgument, "grid dimensions must be positive");
}

GridSpec default_grid_spec() { return GridSpec{0.05, 480, 480, -12.0, -12.0}; }

bool valid_depth(double d, double max_depth) noexcept {
  return std::isfinite(d) && d > 0.0 && d < max_depth;
}

CameraPoint back_project(const CameraIntrinsics& k, const DepthImage& depth, int p, int q) {
  if (!depth.in_bounds(p, q)) {
    fail(Errc::OutOfBounds, "pixel (" + std::to_string(p) + ", " + std::to_string(q) + ") outside depth image");
  }
  const double d = depth(p, q);
  if (!std::isfinite(d) || d <= 0.0) fail(Errc::InvalidDepth, "depth must be finite and positive");
  return CameraPoint{(q - k.cx) / k.fx * d, (p - k.cy) / k.fy * d, d};
}

std::optional<CameraPoint> try_back_project(const CameraIntrinsics& k, const DepthImage& depth, int p,
                                            int q, double max_depth) {
  if (!depth.in_bounds(p, q)) return std::nullopt;
  const double d = depth(p, q);
  if (!valid_depth(d, max_depth)) return std::nullopt;
  return CameraPoint{(q - k.cx) / k.fx * d, (p - k.cy) / k.fy * d, d};
}

WorldPoint to_world(const CameraPoint& point, const Pose& pose, double camera_height) noexcept {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  return WorldPoint{pose.x + point.z * c + point.x * s, pose.y + point.z * s - point.x * c,
                    camera_height - point.y};
}

std::optional<CellIndex> world_to_cell(double x, double y, const GridSpec& spec) noexcept {
  const double fc = std::floor((x - spec.origin_x) / spec.resolution);
  const double fr = std::floor((y - spec.origin_y) / spec.resolution);
  if (!(fc >= 0.0 && fr >= 0.0 && fc < spec.cols && fr < spec.rows)) return std::nullopt;
  return CellIndex{static_cast<int>(fr), static_cast<int>(fc)};
}

HeightClass classify_height(double z, const HeightBands& bands) noexcept {
  if (z < bands.floor_max) return HeightClass::Floor;
  if (z <= bands.obstacle_max) return HeightClass::Obstacle;
  return HeightClass::Ignored;
}

}  // namespace ganav::geometry
