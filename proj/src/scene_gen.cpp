#include "ganav/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <optional>

#include "ganav/error.hpp"
#include "ganav/planner.hpp"
#include "ganav/rng.hpp"

namespace ganav::sim {
namespace {

std::vector<CategoryModel> build_catalogue() {
  std::vector<CategoryModel> c;
  c.push_back({"chair", 5, 5, 0.9, {150, 70, 40}, {220, 40, 40}, true,
               {{"backrest", 0.15}, {"armrest", 0.6}, {"seat", 0.8}, {"sitting", 0.7}, {"resting", 0.5}, {"working", 0.4}},
               {{"backrest", 0.95}, {"armrest", 0.35}, {"seat", 0.2}, {"sitting", 0.6}, {"resting", 0.4}, {"working", 0.3}},
               {"backrest", "armrest", "seat"},
               {"sitting", "resting", "working"}});
  c.push_back({"sofa", 20, 9, 0.85, {60, 90, 160}, {40, 60, 210}, true,
               {{"cushions", 0.85}, {"armrest", 0.6}, {"backrest", 0.2}, {"sitting", 0.7}, {"lying", 0.6}, {"relaxing", 0.6}},
               {{"cushions", 0.5}, {"armrest", 0.3}, {"backrest", 0.9}, {"sitting", 0.4}, {"lying", 0.3}, {"relaxing", 0.6}},
               {"cushions", "armrest", "backrest"},
               {"sitting", "lying", "relaxing"}});
  c.push_back({"bed", 20, 15, 0.6, {225, 215, 190}, {120, 80, 50}, true,
               {{"headboard", 0.1}, {"mattress", 0.85}, {"pillow", 0.6}, {"sleeping", 0.8}, {"lying", 0.7}, {"resting", 0.6}},
               {{"headboard", 0.95}, {"mattress", 0.2}, {"pillow", 0.4}, {"sleeping", 0.6}, {"lying", 0.4}, {"resting", 0.5}},
               {"headboard", "mattress", "pillow"},
               {"sleeping", "lying", "resting"}});
  c.push_back({"toilet", 4, 6, 0.8, {240, 240, 235}, {200, 225, 240}, true,
               {{"tank", 0.2}, {"bowl", 0.85}, {"seat", 0.7}, {"flushing", 0.5}, {"sitting", 0.6}, {"washing", 0.4}},
               {{"tank", 0.95}, {"bowl", 0.2}, {"seat", 0.2}, {"flushing", 0.8}, {"sitting", 0.2}, {"washing", 0.4}},
               {"tank", "bowl", "seat"},
               {"flushing", "sitting", "washing"}});
  c.push_back({"tv_monitor", 12, 3, 1.3, {35, 35, 35}, {20, 20, 100}, false,
               {{"screen", 0.2}, {"bezel", 0.6}, {"stand", 0.85}, {"watching", 0.3}, {"displaying", 0.3}, {"gaming", 0.2}},
               {{"screen", 0.95}, {"bezel", 0.5}, {"stand", 0.1}, {"watching", 0.85}, {"displaying", 0.8}, {"gaming", 0.5}},
               {"screen", "bezel", "stand"},
               {"watching", "displaying", "gaming"}});
  c.push_back({"plant", 4, 4, 1.2, {150, 100, 60}, {40, 160, 60}, false,
               {{"leaves", 0.2}, {"stem", 0.5}, {"pot", 0.9}, {"decorating", 0.5}, {"growing", 0.4}, {"purifying", 0.2}},
               {{"leaves", 0.95}, {"stem", 0.5}, {"pot", 0.1}, {"decorating", 0.7}, {"growing", 0.7}, {"purifying", 0.6}},
               {"leaves", "stem", "pot"},
               {"decorating", "growing", "purifying"}});
  c.push_back({"table", 10, 6, 0.75, {160, 130, 90}, {160, 130, 90}, false, {}, {}, {}, {}});
  c.push_back({"cabinet", 8, 4, 1.0, {110, 100, 95}, {110, 100, 95}, false, {}, {}, {}, {}});
  // Companion furniture; its saliences are drawn per scene from the target's attributes.
  c.push_back({"side_table", 6, 4, 0.7, {175, 150, 205}, {175, 150, 205}, false, {}, {}, {}, {}});
  return c;
}

constexpr std::size_t kTargetCount = 6;
constexpr std::size_t kCompanion = 8;

// Weak similarity between the target's attributes and a non-target category.
SalienceTable weak_table(Rng& rng, const CategoryModel& target, double lo, double hi) {
  std::vector<std::string> pool(target.geometric.begin(), target.geometric.end());
  pool.push_back(target.affordance.front());
  SalienceTable out;
  const int picks = static_cast<int>(rng.uniform_int(1, 2));
  for (int k = 0; k < picks; ++k) {
    const auto& name = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
    out[name] = rng.uniform(lo, hi);
  }
  return out;
}

Scene empty_scene(int rows, int cols) {
  Scene s;
  s.spec = GridSpec{kSceneResolution, rows, cols, 0.0, 0.0};
  s.terrain.assign(s.spec.cell_count(), Terrain::Free);
  s.object_at.assign(s.spec.cell_count(), -1);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (r == 0 || c == 0 || r == rows - 1 || c == cols - 1) s.terrain[s.spec.linear({r, c})] = Terrain::Wall;
    }
  }
  return s;
}

void wall_line(Scene& s, bool horizontal, int at, int from, int to, int gap_start, int gap_len) {
  for (int k = from; k < to; ++k) {
    if (k >= gap_start && k < gap_start + gap_len) continue;
    const CellIndex c = horizontal ? CellIndex{at, k} : CellIndex{k, at};
    s.terrain[s.spec.linear(c)] = Terrain::Wall;
  }
}

// Recursive division over the open interior [r0, r1) x [c0, c1).
void divide(Scene& s, Rng& rng, int r0, int c0, int r1, int c1, int min_room, int door) {
  const int h = r1 - r0;
  const int w = c1 - c0;
  const bool can_h = h >= 2 * min_room + 1;
  const bool can_v = w >= 2 * min_room + 1;
  if (!can_h && !can_v) return;
  bool horizontal = can_h && (!can_v || (h > w) || (h == w && rng.bernoulli(0.5)));
  if (horizontal) {
    const int at = static_cast<int>(rng.uniform_int(r0 + min_room, r1 - min_room - 1));
    const int gap = static_cast<int>(rng.uniform_int(c0, c1 - door));
    wall_line(s, true, at, c0, c1, gap, door);
    divide(s, rng, r0, c0, at, c1, min_room, door);
    divide(s, rng, at + 1, c0, r1, c1, min_room, door);
  } else {
    const int at = static_cast<int>(rng.uniform_int(c0 + min_room, c1 - min_room - 1));
    const int gap = static_cast<int>(rng.uniform_int(r0, r1 - door));
    wall_line(s, false, at, r0, r1, gap, door);
    divide(s, rng, r0, c0, r1, at, min_room, door);
    divide(s, rng, r0, at + 1, r1, c1, min_room, door);
  }
}

struct Placement {
  std::vector<CellIndex> footprint;
  std::vector<CellIndex> part;
  double cx = 0.0;
  double cy = 0.0;
};

std::optional<Placement> try_place(const Scene& s, Rng& rng, const CategoryModel& m,
                                   const std::function<bool(double, double)>& where, int tries = 300) {
  for (int t = 0; t < tries; ++t) {
    const int orient = static_cast<int>(rng.uniform_int(0, 3));
    const int rows = orient % 2 == 0 ? m.depth : m.length;
    const int cols = orient % 2 == 0 ? m.length : m.depth;
    const int r0 = static_cast<int>(rng.uniform_int(1, s.spec.rows - rows - 1));
    const int c0 = static_cast<int>(rng.uniform_int(1, s.spec.cols - cols - 1));
    bool ok = true;
    for (int r = r0 - 1; r <= r0 + rows && ok; ++r) {
      for (int c = c0 - 1; c <= c0 + cols && ok; ++c) {
        if (s.blocked({r, c})) ok = false;
      }
    }
    if (!ok) continue;
    Placement p;
    p.cx = (c0 + cols / 2.0) * s.spec.resolution + s.spec.origin_x;
    p.cy = (r0 + rows / 2.0) * s.spec.resolution + s.spec.origin_y;
    if (!where(p.cx, p.cy)) continue;
    for (int r = r0; r < r0 + rows; ++r) {
      for (int c = c0; c < c0 + cols; ++c) {
        p.footprint.push_back({r, c});
        const bool edge = orient == 0 ? r == r0 : orient == 1 ? c == c0 + cols - 1 : orient == 2 ? r == r0 + rows - 1 : c == c0;
        if (!m.part_is_edge || edge) p.part.push_back({r, c});
      }
    }
    return p;
  }
  return std::nullopt;
}

void add_object(Scene& s, const CategoryModel& m, Placement p, SalienceTable body, SalienceTable part) {
  ObjectInstance o;
  o.category = m.name;
  o.footprint = std::move(p.footprint);
  o.part = std::move(p.part);
  o.height = m.height;
  o.body_colour = m.body;
  o.part_colour = m.part;
  o.body_salience = std::move(body);
  o.part_salience = std::move(part);
  s.objects.push_back(std::move(o));
  s.index_objects();
}

// Drops the target, a few distractor categories and clutter into the scene.
bool furnish(Scene& s, Rng& rng, const CategoryModel& target, int distractors, int clutter,
             const std::function<bool(double, double)>& target_where) {
  auto anywhere = [](double, double) { return true; };
  auto spot = try_place(s, rng, target, target_where);
  if (!spot) return false;
  add_object(s, target, std::move(*spot), target.body_salience, target.part_salience);

  const auto& cat = catalogue();
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < kTargetCount; ++i) {
    if (cat[i].name != target.name) others.push_back(i);
  }
  for (int k = 0; k < distractors; ++k) {
    const auto& m = cat[others[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(others.size()) - 1))]];
    // All instances of one category share colours, so they share saliences.
    SalienceTable body;
    SalienceTable part;
    bool seen = false;
    for (const auto& o : s.objects) {
      if (o.category == m.name) {
        body = o.body_salience;
        part = o.part_salience;
        seen = true;
      }
    }
    if (!seen) {
      body = weak_table(rng, target, 0.05, 0.15);
      part = weak_table(rng, target, 0.05, 0.2);
    }
    if (auto p = try_place(s, rng, m, anywhere)) add_object(s, m, std::move(*p), body, part);
  }
  for (int k = 0; k < clutter; ++k) {
    const auto& m = cat[kTargetCount + static_cast<std::size_t>(rng.uniform_int(0, 1))];
    if (auto p = try_place(s, rng, m, anywhere)) add_object(s, m, std::move(*p), {}, {});
  }
  return true;
}

// Furniture used alongside the target shares its affordance, and sits in the
// same room: within `reach` of the target centre with no wall in between.
void add_companions(Scene& s, Rng& rng, const CategoryModel& target, int count, double reach) {
  const auto& t = s.objects.front();
  double tx = 0.0;
  double ty = 0.0;
  for (CellIndex f : t.footprint) {
    tx += s.spec.center_x(f);
    ty += s.spec.center_y(f);
  }
  tx /= static_cast<double>(t.footprint.size());
  ty /= static_cast<double>(t.footprint.size());
  auto near_target = [&](double x, double y) {
    const double d = std::hypot(x - tx, y - ty);
    if (d > reach) return false;
    bool wall = false;
    traverse_cells(s.spec, tx, ty, (x - tx) / d, (y - ty) / d, d, [&](CellIndex c, double, double) {
      wall = s.terrain_at(c) == Terrain::Wall;
      return !wall;
    });
    return !wall;
  };
  SalienceTable table;
  table[target.affordance.front()] = rng.uniform(0.35, 0.55);
  table[target.geometric[static_cast<std::size_t>(rng.uniform_int(0, 2))]] = rng.uniform(0.2, 0.4);
  const auto& m = catalogue()[kCompanion];
  for (int k = 0; k < count; ++k) {
    if (auto p = try_place(s, rng, m, near_target)) add_object(s, m, std::move(*p), table, table);
  }
}

std::vector<std::uint8_t> inflated_blocked(const Scene& s, double radius) {
  std::vector<std::uint8_t> blocked(s.spec.cell_count());
  for (std::size_t i = 0; i < blocked.size(); ++i) blocked[i] = s.terrain[i] != Terrain::Free;
  return planning::inflate(blocked, s.spec, planning::inflation_cells(radius, s.spec.resolution));
}

// 4-connected BFS step counts over the inflated free space; -1 = unreachable.
std::vector<int> bfs_steps(const Scene& s, const std::vector<std::uint8_t>& blocked, CellIndex start) {
  std::vector<int> dist(s.spec.cell_count(), -1);
  if (blocked[s.spec.linear(start)]) return dist;
  std::deque<CellIndex> queue{start};
  dist[s.spec.linear(start)] = 0;
  while (!queue.empty()) {
    const CellIndex c = queue.front();
    queue.pop_front();
    for (auto [dr, dc] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
      const CellIndex n{c.row + dr, c.col + dc};
      if (!s.spec.contains(n)) continue;
      const std::size_t j = s.spec.linear(n);
      if (blocked[j] || dist[j] >= 0) continue;
      dist[j] = dist[s.spec.linear(c)] + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

// Cells within `reach` meters of any target footprint cell centre.
std::vector<std::uint8_t> approach_mask(const Scene& s, double reach) {
  std::vector<std::uint8_t> mask(s.spec.cell_count(), 0);
  const int k = static_cast<int>(std::ceil(reach / s.spec.resolution));
  for (const auto& o : s.objects) {
    if (o.category != s.target) continue;
    for (CellIndex f : o.footprint) {
      for (int dr = -k; dr <= k; ++dr) {
        for (int dc = -k; dc <= k; ++dc) {
          const CellIndex n{f.row + dr, f.col + dc};
          if (s.spec.contains(n) && std::hypot(dr, dc) * s.spec.resolution <= reach) mask[s.spec.linear(n)] = 1;
        }
      }
    }
  }
  return mask;
}

// Places the spawn; returns false if the scene fails the reachability checks.
bool finish(Scene& s, Rng& rng, const GenerationLimits& limits, double min_route,
            const std::function<bool(double, double)>& spawn_where, std::optional<double> face_target_jitter) {
  const auto blocked = inflated_blocked(s, limits.inflation_radius);
  const auto approach = approach_mask(s, limits.approach_distance);
  std::size_t open = 0;
  for (auto b : blocked) open += b == 0;

  for (int t = 0; t < 200; ++t) {
    const CellIndex cell{static_cast<int>(rng.uniform_int(1, s.spec.rows - 2)),
                         static_cast<int>(rng.uniform_int(1, s.spec.cols - 2))};
    if (blocked[s.spec.linear(cell)]) continue;
    const double x = s.spec.center_x(cell);
    const double y = s.spec.center_y(cell);
    if (!spawn_where(x, y)) continue;
    const auto dist = bfs_steps(s, blocked, cell);
    std::size_t reached = 0;
    int best = -1;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (dist[i] < 0) continue;
      ++reached;
      if (approach[i] && (best < 0 || dist[i] < best)) best = dist[i];
    }
    // Furniture must not wall off part of the scene.
    if (best < 0 || reached * 10 < open * 9) return false;
    if (best * s.spec.resolution < min_route) continue;

    double theta = rng.uniform(-geometry::kPi, geometry::kPi);
    if (face_target_jitter) {
      const auto& o = *std::find_if(s.objects.begin(), s.objects.end(), [&](const auto& o) { return o.category == s.target; });
      double tx = 0.0;
      double ty = 0.0;
      for (CellIndex f : o.footprint) {
        tx += s.spec.center_x(f);
        ty += s.spec.center_y(f);
      }
      tx /= static_cast<double>(o.footprint.size());
      ty /= static_cast<double>(o.footprint.size());
      theta = geometry::normalize_angle(std::atan2(ty - y, tx - x) + rng.uniform(-*face_target_jitter, *face_target_jitter));
    }
    s.spawn = Pose{x, y, theta};
    return true;
  }
  return false;
}

std::optional<Scene> attempt(std::uint64_t seed, Difficulty difficulty, const GenerationLimits& limits) {
  Rng rng(seed);
  const auto& cat = catalogue();
  auto anywhere = [](double, double) { return true; };

  switch (difficulty) {
    case Difficulty::Easy: {
      const int rows = static_cast<int>(rng.uniform_int(80, 110));
      const int cols = static_cast<int>(rng.uniform_int(80, 110));
      Scene s = empty_scene(rows, cols);
      const int walls = static_cast<int>(rng.uniform_int(1, 2));
      for (int k = 0; k < walls; ++k) {
        const bool horizontal = rng.bernoulli(0.5);
        const int span = horizontal ? cols : rows;
        const int at = static_cast<int>(rng.uniform_int((horizontal ? rows : cols) * 3 / 10, (horizontal ? rows : cols) * 7 / 10));
        const int gap_len = static_cast<int>(rng.uniform_int(15, 25));
        const int gap = static_cast<int>(rng.uniform_int(1, span - gap_len - 1));
        wall_line(s, horizontal, at, 1, span - 1, gap, gap_len);
      }
      const auto& target = cat[static_cast<std::size_t>(rng.uniform_int(0, kTargetCount - 1))];
      s.target = target.name;
      if (!furnish(s, rng, target, static_cast<int>(rng.uniform_int(2, 4)), static_cast<int>(rng.uniform_int(1, 2)), anywhere)) {
        return std::nullopt;
      }
      add_companions(s, rng, target, static_cast<int>(rng.uniform_int(2, 3)), 4.0);
      if (!finish(s, rng, limits, 3.0, anywhere, std::nullopt)) return std::nullopt;
      return s;
    }
    case Difficulty::Maze: {
      Scene s = empty_scene(120, 120);
      divide(s, rng, 1, 1, 119, 119, 24, 10);
      const auto& target = cat[static_cast<std::size_t>(rng.uniform_int(0, kTargetCount - 1))];
      s.target = target.name;
      if (!furnish(s, rng, target, static_cast<int>(rng.uniform_int(3, 5)), static_cast<int>(rng.uniform_int(2, 4)), anywhere)) {
        return std::nullopt;
      }
      add_companions(s, rng, target, static_cast<int>(rng.uniform_int(2, 3)), 4.0);
      if (!finish(s, rng, limits, 6.0, anywhere, std::nullopt)) return std::nullopt;
      return s;
    }
    case Difficulty::Multiscale: {
      Scene s = empty_scene(140, 140);
      // A few pillars break up the hall without closing it.
      const int pillars = static_cast<int>(rng.uniform_int(3, 6));
      for (int k = 0; k < pillars; ++k) {
        const int r = static_cast<int>(rng.uniform_int(20, 117));
        const int c = static_cast<int>(rng.uniform_int(20, 117));
        for (int dr = 0; dr < 3; ++dr) {
          for (int dc = 0; dc < 3; ++dc) s.terrain[s.spec.linear({r + dr, c + dc})] = Terrain::Wall;
        }
      }
      // Small targets only, so the distinctive part stays small from afar.
      static const std::size_t kSmall[] = {0, 3, 5};
      const auto& target = cat[kSmall[rng.uniform_int(0, 2)]];
      s.target = target.name;
      const bool far_side = rng.bernoulli(0.5);
      auto target_where = [&](double, double y) { return far_side ? y > 10.5 : y < 3.5; };
      auto spawn_where = [&](double, double y) { return far_side ? y < 3.0 : y > 11.0; };
      if (!furnish(s, rng, target, static_cast<int>(rng.uniform_int(3, 5)), static_cast<int>(rng.uniform_int(2, 3)), target_where)) {
        return std::nullopt;
      }
      if (!finish(s, rng, limits, 7.0, spawn_where, 0.25)) return std::nullopt;
      const double fraction = part_view_fraction(s);
      if (fraction >= 0.02) return std::nullopt;
      return s;
    }
    case Difficulty::Fixture: break;
  }
  fail(Errc::InvalidArgument, "fixture scenes are loaded, not generated");
}

}  // namespace

const std::vector<CategoryModel>& catalogue() {
  static const std::vector<CategoryModel> models = build_catalogue();
  return models;
}

const CategoryModel& category_model(std::string_view name) {
  for (const auto& m : catalogue()) {
    if (m.name == name) return m;
  }
  fail(Errc::UnknownCategory, "no category model for '" + std::string(name) + "'");
}

std::vector<std::string> target_categories() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kTargetCount; ++i) out.push_back(catalogue()[i].name);
  return out;
}

Scene generate_scene(std::uint64_t seed, Difficulty difficulty, const GenerationLimits& limits) {
  for (int a = 0; a < kMaxAttempts; ++a) {
    const std::uint64_t attempt_seed = a == 0 ? seed : hash_mix(seed, static_cast<std::uint64_t>(a));
    if (auto s = attempt(attempt_seed, difficulty, limits)) {
      s->seed = seed;
      s->difficulty = difficulty;
      s->validate();
      return std::move(*s);
    }
  }
  fail(Errc::GenerationFailed, "no valid " + std::string(to_string(difficulty)) + " scene for seed " + std::to_string(seed) +
                                   " after " + std::to_string(kMaxAttempts) + " attempts");
}

std::vector<std::uint8_t> reachable_cells(const Scene& scene, double inflation_radius) {
  const auto blocked = inflated_blocked(scene, inflation_radius);
  const auto start = geometry::world_to_cell(scene.spawn.x, scene.spawn.y, scene.spec);
  std::vector<std::uint8_t> out(scene.spec.cell_count(), 0);
  if (!start) return out;
  const auto dist = bfs_steps(scene, blocked, *start);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dist[i] >= 0;
  return out;
}

bool target_reachable(const Scene& scene, const GenerationLimits& limits) {
  const auto reach = reachable_cells(scene, limits.inflation_radius);
  const auto approach = approach_mask(scene, limits.approach_distance);
  for (std::size_t i = 0; i < reach.size(); ++i) {
    if (reach[i] && approach[i]) return true;
  }
  return false;
}

double part_view_fraction(const Scene& scene, const Sensor& sensor) {
  const Observation obs = render(scene, scene.spawn, sensor);
  std::size_t part = 0;
  std::size_t visible = 0;
  for (int p = 0; p < obs.surface.rows(); ++p) {
    for (int q = 0; q < obs.surface.cols(); ++q) {
      const Surface s = obs.surface(p, q);
      if (s == Surface::Sky) continue;
      ++visible;
      if (s == Surface::Part && scene.is_target(obs.object(p, q))) ++part;
    }
  }
  return visible == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(visible);
}

}  // namespace ganav::sim
