#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ganav/gamap.hpp"
#include "ganav/geometry.hpp"

namespace ganav::planning {

using geometry::CellIndex;
using geometry::GridSpec;
using geometry::Pose;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct PlannerParams {
  // Obstacles grow by ceil(radius / resolution) cells before planning.
  double inflation_radius = 0.18;
  // Traversal cost multiplier for Unknown cells relative to Free.
  double unknown_cost = 2.0;
};

// Per-cell traversal cost in meters per cell step; kInf marks blocked cells.
struct CostGrid {
  GridSpec spec;
  std::vector<double> cost;

  bool traversable(CellIndex c) const noexcept { return spec.contains(c) && cost[spec.linear(c)] < kInf; }
};

// Dilates `blocked` by a Euclidean disc of `cells` cells.
std::vector<std::uint8_t> inflate(std::span<const std::uint8_t> blocked, const GridSpec& spec, int cells);

int inflation_cells(double radius, double resolution) noexcept;

// Cost grid from the map. Obstacles (inflated) are blocked; when `clear_at` is
// set, inflation within the inflation radius of that point is lifted so an
// agent that drifted close to a wall can still leave.
CostGrid build_cost_grid(const mapping::GaMap& map, const PlannerParams& params,
                         std::optional<Pose> clear_at = std::nullopt);

class DistanceField {
 public:
  DistanceField(GridSpec spec, CellIndex source, std::vector<double> values)
      : spec_(spec), source_(source), values_(std::move(values)) {}

  const GridSpec& spec() const noexcept { return spec_; }
  CellIndex source() const noexcept { return source_; }
  double at(CellIndex c) const;
  bool reachable(CellIndex c) const noexcept { return spec_.contains(c) && values_[spec_.linear(c)] < kInf; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  GridSpec spec_;
  CellIndex source_;
  std::vector<double> values_;
};

// First-order upwind fast marching on the 4-neighbour stencil. Throws
// SourceBlocked if `source` is not traversable.
DistanceField fmm_field(const CostGrid& grid, CellIndex source);

// Plans on the map with default costs; the source cell is treated as Free
// unless it is a mapped Obstacle, which throws SourceBlocked.
DistanceField fmm_field(const mapping::GaMap& map, CellIndex source, const PlannerParams& params = {});

// Shortest 8-connected walk from `goal` to the field source using only moves
// that lower the field, diagonals only across open corners. Returned
// source-first. Throws Unreachable.
std::vector<CellIndex> extract_path(const DistanceField& field, CellIndex goal);

double path_length(std::span<const CellIndex> path, double resolution) noexcept;

struct GoalChoice {
  CellIndex cell;
  double score = 0.0;
  double distance = 0.0;
};

// Highest channel-mean candidate near a frontier that the field reaches.
// Scores within `tolerance` of the best are ties, broken by field distance and
// then row-major order. Cells the agent has already stood on are skipped.
// nullopt means exploration is exhausted.
std::optional<GoalChoice> select_goal(const mapping::GaMap& map, const DistanceField& field, int radius,
                                      double tolerance = 0.0);
std::optional<GoalChoice> select_goal(const mapping::GaMap& map, CellIndex agent, int radius,
                                      const PlannerParams& params = {}, double tolerance = 0.0);

// Reachable, unvisited frontier cell with the smallest field distance.
std::optional<GoalChoice> nearest_frontier(const mapping::GaMap& map, const DistanceField& field);

enum class Action { MoveForward, TurnLeft, TurnRight, Stop };

std::string_view to_string(Action a) noexcept;

struct ActionCommand {
  Action type = Action::Stop;
  // meters for MoveForward, radians for turns
  double amount = 0.0;

  bool operator==(const ActionCommand&) const = default;
};

struct MotionParams {
  double forward_step = 0.25;
  double turn_angle = 30.0 * geometry::kPi / 180.0;
  // Waypoint = first path cell at least this far from the agent.
  double lookahead = 0.3;
  double arrival_radius = 0.25;
};

// Turns toward the lookahead waypoint while its bearing error exceeds half a
// turn step, otherwise moves forward. Never emits Stop. Throws EmptyPath.
ActionCommand next_action(const Pose& pose, std::span<const CellIndex> path, const GridSpec& spec,
                          const MotionParams& params = {});

// True once the agent is within the arrival radius of the path's last cell.
bool arrived(const Pose& pose, std::span<const CellIndex> path, const GridSpec& spec, const MotionParams& params = {});

}  // namespace ganav::planning
