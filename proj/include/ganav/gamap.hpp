#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ganav/geometry.hpp"
#include "ganav/pyramid.hpp"

namespace ganav::mapping {

using geometry::CellIndex;
using geometry::GridSpec;

enum class Occupancy : std::uint8_t { Unknown = 0, Free = 1, Obstacle = 2 };

enum class UpdateMode { Max, Average, Replacement };

std::string_view to_string(UpdateMode mode) noexcept;
UpdateMode parse_update_mode(std::string_view text);

// Score of a cell/channel that no pixel has ever landed on. Cosine scores can
// be negative, so zero cannot play this role.
inline constexpr double kUnobserved = -std::numeric_limits<double>::infinity();

inline bool is_unobserved(double s) noexcept { return s == kUnobserved; }

// Combines a stored cell score with a fresh observation. An unobserved old
// value is always replaced.
double update_rule(double old_score, double new_score, UpdateMode mode) noexcept;

// Per-cell, per-channel attribute scores plus occupancy and visitation layers.
class GaMap {
 public:
  GaMap(GridSpec spec, std::vector<std::string> channel_names);

  const GridSpec& spec() const noexcept { return spec_; }
  std::size_t channels() const noexcept { return names_.size(); }
  const std::vector<std::string>& channel_names() const noexcept { return names_; }

  Occupancy occupancy(CellIndex c) const;
  void set_occupancy(CellIndex c, Occupancy o);
  // Upgrades Unknown to Free; leaves Free and Obstacle untouched.
  void mark_free(CellIndex c);
  void mark_obstacle(CellIndex c);

  bool scored(CellIndex c) const;
  std::span<const double> scores(CellIndex c) const;
  std::span<double> scores(CellIndex c);

  bool visited(CellIndex c) const;
  // Marks every cell whose centre lies within `radius` of (x, y).
  void mark_visited(double x, double y, double radius);

  std::span<const Occupancy> occupancy_grid() const noexcept { return occupancy_; }
  std::span<const double> score_grid() const noexcept { return scores_; }
  std::span<const std::uint8_t> visited_grid() const noexcept { return visited_; }

  bool same_state(const GaMap& other) const noexcept;

 private:
  friend struct FusionAccess;

  void check(CellIndex c) const;

  GridSpec spec_;
  std::vector<std::string> names_;
  std::vector<double> scores_;  // cell-major: scores_[cell * C + e]
  std::vector<Occupancy> occupancy_;
  std::vector<std::uint8_t> visited_;
};

// Obstacle-height points are pushed this far (meters) along the viewing ray
// before binning, so surfaces lying on a cell boundary land in the cell
// behind them rather than the free cell in front.
inline constexpr double kSurfaceNudge = 1e-4;

struct FusionParams {
  double camera_height = 0.88;
  double max_depth = 10.0;
  geometry::HeightBands bands{};
  UpdateMode mode = UpdateMode::Max;
  bool carve = true;
};

struct FusionStats {
  std::size_t valid_pixels = 0;
  std::size_t out_of_map = 0;
  std::size_t cells_scored = 0;
};

// Projects one scored RGB-D observation into the map.
//
// Every valid depth pixel below the obstacle height band is back-projected
// and dropped onto its ground cell. Within the observation each cell keeps the
// per-channel maximum over its pixels; that staged value is then merged with
// the stored score through `params.mode`. Floor-height pixels mark cells Free,
// obstacle-height pixels mark them Obstacle, and each image column carves Free
// space from the camera cell to its nearest hit. Obstacle is never downgraded.
FusionStats fuse_observation(GaMap& map, const scoring::ScoreImage& scores, const DepthImage& depth,
                             const geometry::Pose& pose, const geometry::CameraIntrinsics& intrinsics,
                             const FusionParams& params = {});

// Mean over channels; kUnobserved if the cell has never been scored.
double channel_mean(const GaMap& map, CellIndex cell);

// Free cells with at least one 4-connected Unknown neighbour, row-major.
std::vector<CellIndex> frontiers(const GaMap& map);
std::vector<std::uint8_t> frontier_mask(const GaMap& map);

// Scored Free cells within Chebyshev distance `radius` of a frontier cell, row-major.
std::vector<CellIndex> candidate_cells(const GaMap& map, int radius);

}  // namespace ganav::mapping
