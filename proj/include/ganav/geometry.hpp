#pragma once

#include <compare>
#include <cstddef>
#include <optional>

#include "ganav/image.hpp"

// Camera and grid geometry.
//
// Conventions used throughout the project:
//  * Camera frame: x to the right, y down, z along the optical axis.
//    Pixel (p, q) is (row, col); the column drives x through fx/cx and the
//    row drives y through fy/cy.
//  * World frame: right-handed, z up, heading theta measured from +x toward +y.
//    A camera at pose (x, y, theta) looks along (cos theta, sin theta); its
//    right-hand side points along (sin theta, -cos theta).
//  * Grid: row indexes the world y axis, col indexes the world x axis, and
//    cell (0, 0) has its lower corner at `origin`.
namespace ganav::geometry {

inline constexpr double kPi = 3.14159265358979323846;

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  // Square pixels, principal point at the image centre.
  static CameraIntrinsics from_hfov(int width, int height, double hfov_rad);

  void validate() const;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  bool operator==(const Pose&) const = default;
};

// Wraps an angle into [-pi, pi).
double normalize_angle(double theta) noexcept;

struct CameraPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct CellIndex {
  int row = 0;
  int col = 0;

  auto operator<=>(const CellIndex&) const = default;
};

struct GridSpec {
  double resolution = 0.05;
  int rows = 480;
  int cols = 480;
  double origin_x = -12.0;
  double origin_y = -12.0;

  void validate() const;
  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(rows) * cols; }
  bool contains(CellIndex c) const noexcept { return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols; }
  std::size_t linear(CellIndex c) const noexcept { return static_cast<std::size_t>(c.row) * cols + c.col; }
  CellIndex from_linear(std::size_t i) const noexcept {
    return CellIndex{static_cast<int>(i / cols), static_cast<int>(i % cols)};
  }
  double center_x(CellIndex c) const noexcept { return origin_x + (c.col + 0.5) * resolution; }
  double center_y(CellIndex c) const noexcept { return origin_y + (c.row + 0.5) * resolution; }

  bool operator==(const GridSpec&) const = default;
};

// Default map: 480 x 480 cells at 5 cm, centred on the world origin.
GridSpec default_grid_spec();

// depth(p,q) * K^-1 * [q, p, 1]^T. Throws InvalidDepth or OutOfBounds.
CameraPoint back_project(const CameraIntrinsics& intrinsics, const DepthImage& depth, int p, int q);

// Same as back_project but returns nullopt for depths outside (0, max_depth).
std::optional<CameraPoint> try_back_project(const CameraIntrinsics& intrinsics, const DepthImage& depth,
                                            int p, int q, double max_depth);

bool valid_depth(double d, double max_depth) noexcept;

WorldPoint to_world(const CameraPoint& point, const Pose& pose, double camera_height) noexcept;

// floor((point - origin) / resolution) per axis; nullopt outside the grid.
std::optional<CellIndex> world_to_cell(double x, double y, const GridSpec& spec) noexcept;
inline std::optional<CellIndex> world_to_cell(const WorldPoint& p, const GridSpec& spec) noexcept {
  return world_to_cell(p.x, p.y, spec);
}

enum class HeightClass { Floor, Obstacle, Ignored };

struct HeightBands {
  double floor_max = 0.2;
  double obstacle_max = 1.5;
};

HeightClass classify_height(double z, const HeightBands& bands = {}) noexcept;

}  // namespace ganav::geometry
