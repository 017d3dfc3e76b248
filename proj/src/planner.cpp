#include "ganav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "ganav/error.hpp"

namespace ganav::planning {

using mapping::Occupancy;

int inflation_cells(double radius, double resolution) noexcept {
  if (radius <= 0.0) return 0;
  // Tolerate radius/resolution landing a hair above an integer.
  return static_cast<int>(std::ceil(radius / resolution - 1e-9));
}

std::vector<std::uint8_t> inflate(std::span<const std::uint8_t> blocked, const GridSpec& spec, int cells) {
  if (blocked.size() != spec.cell_count()) fail(Errc::DimensionMismatch, "inflation mask does not match the grid");
  std::vector<std::uint8_t> out(blocked.begin(), blocked.end());
  if (cells <= 0) return out;
  std::vector<std::pair<int, int>> disc;
  for (int dr = -cells; dr <= cells; ++dr) {
    for (int dc = -cells; dc <= cells; ++dc) {
      if (dr * dr + dc * dc <= cells * cells && (dr != 0 || dc != 0)) disc.emplace_back(dr, dc);
    }
  }
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      if (!blocked[spec.linear({r, c})]) continue;
      for (auto [dr, dc] : disc) {
        const CellIndex n{r + dr, c + dc};
        if (spec.contains(n)) out[spec.linear(n)] = 1;
      }
    }
  }
  return out;
}

CostGrid build_cost_grid(const mapping::GaMap& map, const PlannerParams& params, std::optional<Pose> clear_at) {
  if (params.unknown_cost < 1.0) fail(Errc::InvalidArgument, "unknown cell cost must be at least 1");
  const GridSpec& spec = map.spec();
  const auto occ = map.occupancy_grid();
  std::vector<std::uint8_t> walls(spec.cell_count());
  for (std::size_t i = 0; i < walls.size(); ++i) walls[i] = occ[i] == Occupancy::Obstacle;
  const int radius = inflation_cells(params.inflation_radius, spec.resolution);
  const auto inflated = inflate(walls, spec, radius);

  CostGrid grid{spec, std::vector<double>(spec.cell_count())};
  for (std::size_t i = 0; i < grid.cost.size(); ++i) {
    if (inflated[i]) {
      grid.cost[i] = kInf;
    } else {
      grid.cost[i] = spec.resolution * (occ[i] == Occupancy::Unknown ? params.unknown_cost : 1.0);
    }
  }

  if (clear_at) {
    const double reach = radius * spec.resolution;
    const auto centre = geometry::world_to_cell(clear_at->x, clear_at->y, spec);
    if (centre) {
      for (int dr = -radius - 1; dr <= radius + 1; ++dr) {
        for (int dc = -radius - 1; dc <= radius + 1; ++dc) {
          const CellIndex n{centre->row + dr, centre->col + dc};
          if (!spec.contains(n)) continue;
          const std::size_t i = spec.linear(n);
          if (walls[i] || !inflated[i]) continue;
          if (std::hypot(spec.center_x(n) - clear_at->x, spec.center_y(n) - clear_at->y) > reach) continue;
          grid.cost[i] = spec.resolution * (occ[i] == Occupancy::Unknown ? params.unknown_cost : 1.0);
        }
      }
    }
  }
  return grid;
}

double DistanceField::at(CellIndex c) const {
  if (!spec_.contains(c)) fail(Errc::OutOfBounds, "cell outside the distance field");
  return values_[spec_.linear(c)];
}

DistanceField fmm_field(const CostGrid& grid, CellIndex source) {
  const GridSpec& spec = grid.spec;
  if (grid.cost.size() != spec.cell_count()) fail(Errc::DimensionMismatch, "cost grid does not match its spec");
  if (!spec.contains(source)) fail(Errc::OutOfBounds, "planning source outside the map");
  if (!grid.traversable(source)) fail(Errc::SourceBlocked, "planning source is blocked");

  enum : std::uint8_t { Far, Trial, Known };
  std::vector<double> t(spec.cell_count(), kInf);
  std::vector<std::uint8_t> state(spec.cell_count(), Far);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  const std::size_t s = spec.linear(source);
  t[s] = 0.0;
  heap.emplace(0.0, s);

  auto known_min = [&](int r, int c, int dr, int dc) {
    double best = kInf;
    for (int sign : {-1, 1}) {
      const CellIndex n{r + sign * dr, c + sign * dc};
      if (!spec.contains(n)) continue;
      const std::size_t j = spec.linear(n);
      if (state[j] == Known) best = std::min(best, t[j]);
    }
    return best;
  };

  while (!heap.empty()) {
    const auto [value, i] = heap.top();
    heap.pop();
    if (state[i] == Known || value > t[i]) continue;
    state[i] = Known;
    const CellIndex cell = spec.from_linear(i);
    constexpr int kSteps[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (const auto& d : kSteps) {
      const CellIndex n{cell.row + d[0], cell.col + d[1]};
      if (!grid.traversable(n)) continue;
      const std::size_t j = spec.linear(n);
      if (state[j] == Known) continue;
      const double a = known_min(n.row, n.col, 0, 1);
      const double b = known_min(n.row, n.col, 1, 0);
      const double f = grid.cost[j];
      double candidate;
      if (a == kInf || b == kInf || std::abs(a - b) >= f) {
        candidate = std::min(a, b) + f;
      } else {
        candidate = 0.5 * (a + b + std::sqrt(2.0 * f * f - (a - b) * (a - b)));
      }
      if (candidate < t[j]) {
        t[j] = candidate;
        state[j] = Trial;
        heap.emplace(candidate, j);
      }
    }
  }
  return DistanceField(spec, source, std::move(t));
}

DistanceField fmm_field(const mapping::GaMap& map, CellIndex source, const PlannerParams& params) {
  if (!map.spec().contains(source)) fail(Errc::OutOfBounds, "planning source outside the map");
  if (map.occupancy(source) == Occupancy::Obstacle) fail(Errc::SourceBlocked, "planning source is an obstacle");
  const GridSpec& spec = map.spec();
  CostGrid grid = build_cost_grid(map, params, Pose{spec.center_x(source), spec.center_y(source), 0.0});
  grid.cost[spec.linear(source)] = spec.resolution;
  return fmm_field(grid, source);
}

std::vector<CellIndex> extract_path(const DistanceField& field, CellIndex goal) {
  const GridSpec& spec = field.spec();
  if (!spec.contains(goal)) fail(Errc::OutOfBounds, "goal outside the map");
  if (!field.reachable(goal)) fail(Errc::Unreachable, "goal is not reachable from the source");

  // Shortest 8-connected walk that strictly descends the field. Greedy
  // descent can take a staircase through a one-cell gap where a diagonal fits.
  const std::size_t n = spec.cell_count();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::ptrdiff_t> prev(n, -1);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[spec.linear(goal)] = 0.0;
  open.push({0.0, spec.linear(goal)});
  std::ptrdiff_t source = -1;
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (d > dist[i]) continue;
    const CellIndex cur = spec.from_linear(i);
    const double here = field.at(cur);
    if (here <= 0.0) {
      source = static_cast<std::ptrdiff_t>(i);
      break;
    }
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const CellIndex nb{cur.row + dr, cur.col + dc};
        if (!field.reachable(nb) || !(field.at(nb) < here)) continue;
        const bool diag = dr != 0 && dc != 0;
        // Diagonals only across open corners.
        if (diag && (!field.reachable({cur.row + dr, cur.col}) || !field.reachable({cur.row, cur.col + dc}))) continue;
        const std::size_t j = spec.linear(nb);
        const double nd = d + (diag ? std::numbers::sqrt2 : 1.0);
        if (nd < dist[j]) {
          dist[j] = nd;
          prev[j] = static_cast<std::ptrdiff_t>(i);
          open.push({nd, j});
        }
      }
    }
  }
  // The upwind 4-neighbour always descends, so this only trips on a corrupt field.
  if (source < 0) fail(Errc::Unreachable, "descent stalled before reaching the source");
  std::vector<CellIndex> path;
  for (std::ptrdiff_t i = source; i >= 0; i = prev[static_cast<std::size_t>(i)]) {
    path.push_back(spec.from_linear(static_cast<std::size_t>(i)));
  }
  return path;
}

double path_length(std::span<const CellIndex> path, double resolution) noexcept {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    total += std::hypot(path[i].row - path[i - 1].row, path[i].col - path[i - 1].col);
  }
  return total * resolution;
}

std::optional<GoalChoice> select_goal(const mapping::GaMap& map, const DistanceField& field, int radius,
                                      double tolerance) {
  if (!(field.spec() == map.spec())) fail(Errc::DimensionMismatch, "distance field does not match the map");
  if (!(tolerance >= 0.0)) fail(Errc::InvalidArgument, "score tolerance must be non-negative");
  std::vector<GoalChoice> pool;
  double top = -kInf;
  for (CellIndex c : mapping::candidate_cells(map, radius)) {
    if (!field.reachable(c) || map.visited(c)) continue;
    pool.push_back(GoalChoice{c, mapping::channel_mean(map, c), field.at(c)});
    top = std::max(top, pool.back().score);
  }
  // Everything within `tolerance` of the best score counts as tied.
  std::optional<GoalChoice> best;
  const auto& spec = map.spec();
  for (const GoalChoice& g : pool) {
    if (g.score < top - tolerance) continue;
    if (!best || g.distance < best->distance ||
        (g.distance == best->distance && spec.linear(g.cell) < spec.linear(best->cell))) {
      best = g;
    }
  }
  return best;
}

std::optional<GoalChoice> select_goal(const mapping::GaMap& map, CellIndex agent, int radius,
                                      const PlannerParams& params, double tolerance) {
  return select_goal(map, fmm_field(map, agent, params), radius, tolerance);
}

std::optional<GoalChoice> nearest_frontier(const mapping::GaMap& map, const DistanceField& field) {
  if (!(field.spec() == map.spec())) fail(Errc::DimensionMismatch, "distance field does not match the map");
  std::optional<GoalChoice> best;
  for (CellIndex c : mapping::frontiers(map)) {
    if (!field.reachable(c) || map.visited(c)) continue;
    const double d = field.at(c);
    if (!best || d < best->distance) best = GoalChoice{c, 0.0, d};
  }
  return best;
}

std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::MoveForward: return "move_forward";
    case Action::TurnLeft: return "turn_left";
    case Action::TurnRight: return "turn_right";
    case Action::Stop: return "stop";
  }
  return "?";
}

ActionCommand next_action(const Pose& pose, std::span<const CellIndex> path, const GridSpec& spec,
                          const MotionParams& params) {
  if (path.empty()) fail(Errc::EmptyPath, "cannot follow an empty path");
  CellIndex waypoint = path.back();
  for (CellIndex c : path) {
    if (std::hypot(spec.center_x(c) - pose.x, spec.center_y(c) - pose.y) >= params.lookahead) {
      waypoint = c;
      break;
    }
  }
  const double bearing = std::atan2(spec.center_y(waypoint) - pose.y, spec.center_x(waypoint) - pose.x);
  const double error = geometry::normalize_angle(bearing - pose.theta);
  if (std::abs(error) > params.turn_angle / 2.0) {
    return ActionCommand{error > 0.0 ? Action::TurnLeft : Action::TurnRight, params.turn_angle};
  }
  return ActionCommand{Action::MoveForward, params.forward_step};
}

bool arrived(const Pose& pose, std::span<const CellIndex> path, const GridSpec& spec, const MotionParams& params) {
  if (path.empty()) return true;
  const CellIndex last = path.back();
  return std::hypot(spec.center_x(last) - pose.x, spec.center_y(last) - pose.y) <= params.arrival_radius;
}

}  // namespace ganav::planning
