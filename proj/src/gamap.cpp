#include "ganav/gamap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ganav/kernels.hpp"

namespace ganav::mapping {

using geometry::CameraIntrinsics;
using geometry::HeightClass;
using geometry::Pose;

std::string_view to_string(UpdateMode mode) noexcept {
  switch (mode) {
    case UpdateMode::Max: return "max";
    case UpdateMode::Average: return "average";
    case UpdateMode::Replacement: return "replacement";
  }
  return "max";
}

UpdateMode parse_update_mode(std::string_view text) {
  if (text == "max") return UpdateMode::Max;
  if (text == "average") return UpdateMode::Average;
  if (text == "replacement") return UpdateMode::Replacement;
  fail(Errc::InvalidArgument, "unknown update mode '" + std::string(text) + "'");
}

double update_rule(double old_score, double new_score, UpdateMode mode) noexcept {
  if (is_unobserved(old_score)) return new_score;
  switch (mode) {
    case UpdateMode::Max: return old_score > new_score ? old_score : new_score;
    case UpdateMode::Average: return (old_score + new_score) * 0.5;
    case UpdateMode::Replacement: return new_score;
  }
  return new_score;
}

GaMap::GaMap(GridSpec spec, std::vector<std::string> channel_names)
    : spec_(spec), names_(std::move(channel_names)) {
  spec_.validate();
  if (names_.empty()) fail(Errc::InvalidArgument, "map needs at least one channel");
  scores_.assign(spec_.cell_count() * names_.size(), kUnobserved);
  occupancy_.assign(spec_.cell_count(), Occupancy::Unknown);
  visited_.assign(spec_.cell_count(), 0);
}

void GaMap::check(CellIndex c) const {
  if (!spec_.contains(c)) {
    fail(Errc::OutOfBounds, "cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) + ") outside map");
  }
}

Occupancy GaMap::occupancy(CellIndex c) const {
  check(c);
  return occupancy_[spec_.linear(c)];
}

void GaMap::set_occupancy(CellIndex c, Occupancy o) {
  check(c);
  occupancy_[spec_.linear(c)] = o;
}

void GaMap::mark_free(CellIndex c) {
  check(c);
  auto& cell = occupancy_[spec_.linear(c)];
  if (cell == Occupancy::Unknown) cell = Occupancy::Free;
}

void GaMap::mark_obstacle(CellIndex c) {
  check(c);
  occupancy_[spec_.linear(c)] = Occupancy::Obstacle;
}

bool GaMap::scored(CellIndex c) const { return !is_unobserved(scores(c).front()); }

std::span<const double> GaMap::scores(CellIndex c) const {
  check(c);
  return {scores_.data() + spec_.linear(c) * names_.size(), names_.size()};
}

std::span<double> GaMap::scores(CellIndex c) {
  check(c);
  return {scores_.data() + spec_.linear(c) * names_.size(), names_.size()};
}

bool GaMap::visited(CellIndex c) const {
  check(c);
  return visited_[spec_.linear(c)] != 0;
}

void GaMap::mark_visited(double x, double y, double radius) {
  const int reach = static_cast<int>(std::ceil(radius / spec_.resolution)) + 1;
  const auto centre = geometry::world_to_cell(x, y, spec_);
  if (!centre) return;
  for (int r = centre->row - reach; r <= centre->row + reach; ++r) {
    for (int c = centre->col - reach; c <= centre->col + reach; ++c) {
      const CellIndex cell{r, c};
      if (!spec_.contains(cell)) continue;
      const double dx = spec_.center_x(cell) - x;
      const double dy = spec_.center_y(cell) - y;
      if (dx * dx + dy * dy <= radius * radius) visited_[spec_.linear(cell)] = 1;
    }
  }
  visited_[spec_.linear(*centre)] = 1;
}

bool GaMap::same_state(const GaMap& other) const noexcept {
  return spec_ == other.spec_ && names_ == other.names_ && scores_ == other.scores_ &&
         occupancy_ == other.occupancy_ && visited_ == other.visited_;
}

namespace {

struct ColumnEnd {
  bool valid = false;
  bool obstacle = false;
  double x = 0.0;
  double y = 0.0;
  double range = 0.0;
};

// Integer line stepping from `from` to `to`; `to` itself is skipped when
// `include_end` is false.
void carve_line(GaMap& map, CellIndex from, CellIndex to, bool include_end) {
  const GridSpec& spec = map.spec();
  int r = from.row;
  int c = from.col;
  const int dr = std::abs(to.row - r);
  const int dc = std::abs(to.col - c);
  const int sr = r < to.row ? 1 : -1;
  const int sc = c < to.col ? 1 : -1;
  int err = dc - dr;
  while (true) {
    const bool at_end = r == to.row && c == to.col;
    if (at_end && !include_end) break;
    const CellIndex cell{r, c};
    if (!spec.contains(cell)) break;
    map.mark_free(cell);
    if (at_end) break;
    const int e2 = 2 * err;
    if (e2 > -dr) {
      err -= dr;
      c += sc;
    }
    if (e2 < dc) {
      err += dc;
      r += sr;
    }
  }
}

// Carves one ground-plane ray from the camera to (x, y).
void carve_to(GaMap& map, CellIndex origin, double x, double y, bool stops_at_obstacle) {
  const GridSpec& spec = map.spec();
  // Clamp far points into index space so lines leave the grid cleanly.
  const double fc = std::floor((x - spec.origin_x) / spec.resolution);
  const double fr = std::floor((y - spec.origin_y) / spec.resolution);
  const CellIndex end{static_cast<int>(std::clamp(fr, -1.0, static_cast<double>(spec.rows))),
                      static_cast<int>(std::clamp(fc, -1.0, static_cast<double>(spec.cols)))};
  carve_line(map, origin, end, !stops_at_obstacle);
}

}  // namespace

FusionStats fuse_observation(GaMap& map, const scoring::ScoreImage& scores, const DepthImage& depth,
                             const Pose& pose, const CameraIntrinsics& intrinsics, const FusionParams& params) {
  if (scores.rows() != depth.rows() || scores.cols() != depth.cols()) {
    fail(Errc::DimensionMismatch, "score image and depth image differ in size");
  }
  if (scores.channels() != map.channels()) fail(Errc::DimensionMismatch, "score channels differ from map channels");
  if (intrinsics.width != depth.cols() || intrinsics.height != depth.rows()) {
    fail(Errc::DimensionMismatch, "intrinsics do not match the depth image");
  }

  const GridSpec& spec = map.spec();
  const std::size_t channels = map.channels();
  FusionStats stats;

  // Staging buffer: one C-wide slot per touched cell holding the max over its pixels.
  thread_local std::vector<std::int32_t> slot_of;
  if (slot_of.size() != spec.cell_count()) slot_of.assign(spec.cell_count(), -1);
  std::vector<std::size_t> touched;
  std::vector<double> staged;
  std::vector<std::size_t> floor_cells;
  std::vector<std::size_t> obstacle_cells;
  std::vector<ColumnEnd> ends(static_cast<std::size_t>(depth.cols()));
  std::vector<double> pixel(channels);

  for (int q = 0; q < depth.cols(); ++q) {
    ColumnEnd& end = ends[static_cast<std::size_t>(q)];
    for (int p = 0; p < depth.rows(); ++p) {
      const auto cam = geometry::try_back_project(intrinsics, depth, p, q, params.max_depth);
      if (!cam) continue;
      geometry::WorldPoint wp = geometry::to_world(*cam, pose, params.camera_height);
      const HeightClass cls = geometry::classify_height(wp.z, params.bands);
      if (cls == HeightClass::Ignored) continue;
      ++stats.valid_pixels;

      const double range = std::hypot(wp.x - pose.x, wp.y - pose.y);
      if (cls == HeightClass::Obstacle && range > 0.0) {
        // A face seen exactly on a cell boundary belongs to the cell behind it.
        wp.x += (wp.x - pose.x) / range * kSurfaceNudge;
        wp.y += (wp.y - pose.y) / range * kSurfaceNudge;
      }
      if (cls == HeightClass::Obstacle) {
        if (!end.obstacle || range < end.range) end = ColumnEnd{true, true, wp.x, wp.y, range};
      } else if (!end.obstacle && (!end.valid || range > end.range)) {
        end = ColumnEnd{true, false, wp.x, wp.y, range};
      }

      const auto cell = geometry::world_to_cell(wp, spec);
      if (!cell) {
        ++stats.out_of_map;
        continue;
      }
      const std::size_t lin = spec.linear(*cell);
      (cls == HeightClass::Obstacle ? obstacle_cells : floor_cells).push_back(lin);

      for (std::size_t e = 0; e < channels; ++e) pixel[e] = scores(p, q, e);
      std::int32_t& slot = slot_of[lin];
      if (slot < 0) {
        slot = static_cast<std::int32_t>(touched.size());
        touched.push_back(lin);
        staged.insert(staged.end(), pixel.begin(), pixel.end());
      } else {
        kernels::max_into(std::span<double>(staged.data() + static_cast<std::size_t>(slot) * channels, channels),
                          pixel);
      }
    }
  }

  const auto mode = static_cast<kernels::MergeMode>(static_cast<int>(params.mode));
  for (std::size_t i = 0; i < touched.size(); ++i) {
    const CellIndex cell = spec.from_linear(touched[i]);
    kernels::merge(map.scores(cell), std::span<const double>(staged.data() + i * channels, channels), mode,
                   kUnobserved);
    slot_of[touched[i]] = -1;
  }
  stats.cells_scored = touched.size();

  if (params.carve) {
    if (const auto origin = geometry::world_to_cell(pose.x, pose.y, spec)) {
      map.mark_free(*origin);
      const double step = 0.5 * spec.resolution;
      for (std::size_t q = 0; q < ends.size(); ++q) {
        const ColumnEnd& a = ends[q];
        if (!a.valid) continue;
        carve_to(map, *origin, a.x, a.y, a.obstacle);
        if (q + 1 >= ends.size() || !ends[q + 1].valid) continue;

        // Fill the angular gap to the next column so distant floor and walls
        // do not leave Unknown holes between columns.
        const ColumnEnd& b = ends[q + 1];
        const double gap = std::hypot(b.x - a.x, b.y - a.y);
        const int n = static_cast<int>(std::ceil(gap / step));
        const bool surface = a.obstacle && b.obstacle && gap <= 3.0 * spec.resolution;
        const double near = std::min(a.range, b.range);
        const bool near_is_obstacle = a.range <= b.range ? a.obstacle : b.obstacle;
        for (int i = 1; i < n; ++i) {
          const double s = static_cast<double>(i) / n;
          const double x = a.x + (b.x - a.x) * s;
          const double y = a.y + (b.y - a.y) * s;
          if (surface) {
            carve_to(map, *origin, x, y, true);
            if (const auto hit = geometry::world_to_cell(x, y, spec)) map.mark_obstacle(*hit);
          } else {
            const double len = std::hypot(x - pose.x, y - pose.y);
            if (!(len > 0.0)) continue;
            carve_to(map, *origin, pose.x + (x - pose.x) / len * near, pose.y + (y - pose.y) / len * near,
                     near_is_obstacle);
          }
        }
      }
    }
  }

  for (std::size_t lin : floor_cells) map.mark_free(spec.from_linear(lin));
  for (std::size_t lin : obstacle_cells) map.mark_obstacle(spec.from_linear(lin));
  return stats;
}

double channel_mean(const GaMap& map, CellIndex cell) {
  const auto s = map.scores(cell);
  if (is_unobserved(s.front())) return kUnobserved;
  double sum = 0.0;
  for (double v : s) sum += v;
  return sum / static_cast<double>(s.size());
}

std::vector<std::uint8_t> frontier_mask(const GaMap& map) {
  const GridSpec& spec = map.spec();
  const auto occ = map.occupancy_grid();
  std::vector<std::uint8_t> mask(spec.cell_count(), 0);
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * spec.cols + c;
      if (occ[i] != Occupancy::Free) continue;
      const bool up = r > 0 && occ[i - spec.cols] == Occupancy::Unknown;
      const bool down = r + 1 < spec.rows && occ[i + spec.cols] == Occupancy::Unknown;
      const bool left = c > 0 && occ[i - 1] == Occupancy::Unknown;
      const bool right = c + 1 < spec.cols && occ[i + 1] == Occupancy::Unknown;
      if (up || down || left || right) mask[i] = 1;
    }
  }
  return mask;
}

std::vector<CellIndex> frontiers(const GaMap& map) {
  const auto mask = frontier_mask(map);
  std::vector<CellIndex> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(map.spec().from_linear(i));
  }
  return out;
}

std::vector<CellIndex> candidate_cells(const GaMap& map, int radius) {
  if (radius < 0) fail(Errc::InvalidArgument, "candidate radius must be non-negative");
  const GridSpec& spec = map.spec();
  const auto mask = frontier_mask(map);

  // Separable Chebyshev dilation: rows first, then columns.
  std::vector<std::uint8_t> horizontal(mask.size(), 0);
  for (int r = 0; r < spec.rows; ++r) {
    int last = -1'000'000;
    for (int c = 0; c < spec.cols; ++c) {
      if (mask[static_cast<std::size_t>(r) * spec.cols + c]) last = c;
      if (c - last <= radius) horizontal[static_cast<std::size_t>(r) * spec.cols + c] = 1;
    }
    last = 1'000'000;
    for (int c = spec.cols - 1; c >= 0; --c) {
      if (mask[static_cast<std::size_t>(r) * spec.cols + c]) last = c;
      if (last - c <= radius) horizontal[static_cast<std::size_t>(r) * spec.cols + c] = 1;
    }
  }
  std::vector<std::uint8_t> dilated(mask.size(), 0);
  for (int c = 0; c < spec.cols; ++c) {
    int last = -1'000'000;
    for (int r = 0; r < spec.rows; ++r) {
      if (horizontal[static_cast<std::size_t>(r) * spec.cols + c]) last = r;
      if (r - last <= radius) dilated[static_cast<std::size_t>(r) * spec.cols + c] = 1;
    }
    last = 1'000'000;
    for (int r = spec.rows - 1; r >= 0; --r) {
      if (horizontal[static_cast<std::size_t>(r) * spec.cols + c]) last = r;
      if (last - r <= radius) dilated[static_cast<std::size_t>(r) * spec.cols + c] = 1;
    }
  }

  const auto occ = map.occupancy_grid();
  const auto scores = map.score_grid();
  std::vector<CellIndex> out;
  for (std::size_t i = 0; i < dilated.size(); ++i) {
    if (dilated[i] && occ[i] == Occupancy::Free && !is_unobserved(scores[i * map.channels()])) {
      out.push_back(spec.from_linear(i));
    }
  }
  return out;
}

}  // namespace ganav::mapping
