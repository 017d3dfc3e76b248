#include "ganav/scene.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ganav/error.hpp"

namespace ganav::sim {

using nlohmann::json;

std::string_view to_string(Difficulty d) noexcept {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Maze: return "maze";
    case Difficulty::Multiscale: return "multiscale";
    case Difficulty::Fixture: return "fixture";
  }
  return "?";
}

Difficulty parse_difficulty(std::string_view text) {
  if (text == "easy") return Difficulty::Easy;
  if (text == "maze") return Difficulty::Maze;
  if (text == "multiscale") return Difficulty::Multiscale;
  if (text == "fixture") return Difficulty::Fixture;
  fail(Errc::InvalidArgument, "unknown difficulty '" + std::string(text) + "'");
}

void Scene::index_objects() {
  object_at.assign(spec.cell_count(), -1);
  for (auto& t : terrain) {
    if (t == Terrain::Object) t = Terrain::Free;
  }
  for (std::size_t k = 0; k < objects.size(); ++k) {
    for (CellIndex c : objects[k].footprint) {
      if (!spec.contains(c)) fail(Errc::SceneLoadError, "object footprint outside the scene");
      object_at[spec.linear(c)] = static_cast<int>(k);
      terrain[spec.linear(c)] = Terrain::Object;
    }
  }
}

void Scene::validate() const {
  spec.validate();
  if (terrain.size() != spec.cell_count() || object_at.size() != spec.cell_count()) {
    fail(Errc::SceneLoadError, "scene layers do not match the grid");
  }
  if (target.empty()) fail(Errc::SceneLoadError, "scene has no target category");
  for (const auto& o : objects) {
    if (o.footprint.empty()) fail(Errc::SceneLoadError, "object with empty footprint");
    if (!(o.height > 0.0)) fail(Errc::SceneLoadError, "object height must be positive");
    for (const auto* table : {&o.body_salience, &o.part_salience}) {
      for (const auto& [name, s] : *table) {
        if (!(s >= 0.0 && s <= 1.0)) fail(Errc::SceneLoadError, "salience for '" + name + "' outside [0, 1]");
      }
    }
  }
  const auto cell = geometry::world_to_cell(spawn.x, spawn.y, spec);
  if (!cell || blocked(*cell)) fail(Errc::PoseInObstacle, "spawn is not in free space");
}

std::vector<std::uint8_t> flood_fill(const Scene& scene, CellIndex start) {
  const GridSpec& spec = scene.spec;
  std::vector<std::uint8_t> seen(spec.cell_count(), 0);
  if (scene.blocked(start)) return seen;
  std::vector<CellIndex> stack{start};
  seen[spec.linear(start)] = 1;
  while (!stack.empty()) {
    const CellIndex c = stack.back();
    stack.pop_back();
    for (auto [dr, dc] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
      const CellIndex n{c.row + dr, c.col + dc};
      if (scene.blocked(n) || seen[spec.linear(n)]) continue;
      seen[spec.linear(n)] = 1;
      stack.push_back(n);
    }
  }
  return seen;
}

void traverse_cells(const GridSpec& spec, double x0, double y0, double dx, double dy, double t_max,
                    const std::function<bool(CellIndex, double, double)>& visit) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double gx = (x0 - spec.origin_x) / spec.resolution;
  const double gy = (y0 - spec.origin_y) / spec.resolution;
  CellIndex cell{static_cast<int>(std::floor(gy)), static_cast<int>(std::floor(gx))};
  const int step_c = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_r = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double ddx = dx / spec.resolution;
  const double ddy = dy / spec.resolution;
  // Ray parameter at the next vertical / horizontal grid line.
  double next_x = step_c > 0 ? (cell.col + 1 - gx) / ddx : (step_c < 0 ? (gx - cell.col) / -ddx : kInf);
  double next_y = step_r > 0 ? (cell.row + 1 - gy) / ddy : (step_r < 0 ? (gy - cell.row) / -ddy : kInf);
  const double delta_x = step_c != 0 ? 1.0 / std::abs(ddx) : kInf;
  const double delta_y = step_r != 0 ? 1.0 / std::abs(ddy) : kInf;

  double t_in = 0.0;
  while (spec.contains(cell) && t_in <= t_max) {
    const double t_out = std::min(next_x, next_y);
    if (!visit(cell, t_in, t_out)) return;
    if (t_out == kInf) return;
    t_in = t_out;
    if (next_x < next_y) {
      cell.col += step_c;
      next_x += delta_x;
    } else {
      cell.row += step_r;
      next_y += delta_y;
    }
  }
}

namespace {

char terrain_char(Terrain t) {
  switch (t) {
    case Terrain::Free: return '.';
    case Terrain::Wall: return '#';
    case Terrain::Object: return 'o';
  }
  return '?';
}

std::string encode_row(const Scene& s, int r) {
  std::string out;
  int c = 0;
  while (c < s.spec.cols) {
    const Terrain t = s.terrain_at({r, c});
    int run = 1;
    while (c + run < s.spec.cols && s.terrain_at({r, c + run}) == t) ++run;
    out += std::to_string(run);
    out += terrain_char(t);
    c += run;
  }
  return out;
}

void decode_row(Scene& s, int r, const std::string& text) {
  int c = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])) != 0) ++j;
    if (j == i || j >= text.size()) fail(Errc::SceneLoadError, "bad run-length row " + std::to_string(r));
    const int run = std::stoi(text.substr(i, j - i));
    Terrain t;
    switch (text[j]) {
      case '.': t = Terrain::Free; break;
      case '#': t = Terrain::Wall; break;
      case 'o': t = Terrain::Object; break;
      default: fail(Errc::SceneLoadError, std::string("unknown terrain symbol '") + text[j] + "'");
    }
    if (c + run > s.spec.cols) fail(Errc::SceneLoadError, "row " + std::to_string(r) + " is too long");
    for (int k = 0; k < run; ++k) s.terrain[s.spec.linear({r, c + k})] = t;
    c += run;
    i = j + 1;
  }
  if (c != s.spec.cols) fail(Errc::SceneLoadError, "row " + std::to_string(r) + " is too short");
}

json cells_json(const std::vector<CellIndex>& cells) {
  json out = json::array();
  for (CellIndex c : cells) out.push_back({c.row, c.col});
  return out;
}

std::vector<CellIndex> cells_from(const json& j) {
  std::vector<CellIndex> out;
  for (const auto& c : j) out.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
  return out;
}

json colour_json(Rgb c) { return {c.r, c.g, c.b}; }
Rgb colour_from(const json& j) { return Rgb{j.at(0).get<std::uint8_t>(), j.at(1).get<std::uint8_t>(), j.at(2).get<std::uint8_t>()}; }

}  // namespace

std::string scene_to_json(const Scene& s) {
  json rows = json::array();
  for (int r = 0; r < s.spec.rows; ++r) rows.push_back(encode_row(s, r));
  json objects = json::array();
  for (const auto& o : s.objects) {
    objects.push_back({{"category", o.category},
                       {"footprint", cells_json(o.footprint)},
                       {"part", cells_json(o.part)},
                       {"height", o.height},
                       {"body_colour", colour_json(o.body_colour)},
                       {"part_colour", colour_json(o.part_colour)},
                       {"body_salience", o.body_salience},
                       {"part_salience", o.part_salience}});
  }
  const json j{{"format", "ganav-scene"},
               {"version", 1},
               {"seed", s.seed},
               {"difficulty", std::string(to_string(s.difficulty))},
               {"resolution", s.spec.resolution},
               {"rows", s.spec.rows},
               {"cols", s.spec.cols},
               {"origin", {s.spec.origin_x, s.spec.origin_y}},
               {"terrain", rows},
               {"objects", objects},
               {"spawn", {s.spawn.x, s.spawn.y, s.spawn.theta}},
               {"target", s.target}};
  return j.dump(1);
}

Scene scene_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "ganav-scene") fail(Errc::SceneLoadError, "not a scene file");
    Scene s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
    s.spec.resolution = j.at("resolution").get<double>();
    s.spec.rows = j.at("rows").get<int>();
    s.spec.cols = j.at("cols").get<int>();
    s.spec.origin_x = j.at("origin").at(0).get<double>();
    s.spec.origin_y = j.at("origin").at(1).get<double>();
    s.spec.validate();
    s.terrain.assign(s.spec.cell_count(), Terrain::Free);
    const auto& rows = j.at("terrain");
    if (rows.size() != static_cast<std::size_t>(s.spec.rows)) fail(Errc::SceneLoadError, "terrain row count mismatch");
    for (int r = 0; r < s.spec.rows; ++r) decode_row(s, r, rows.at(r).get<std::string>());
    for (const auto& o : j.at("objects")) {
      ObjectInstance obj;
      obj.category = o.at("category").get<std::string>();
      obj.footprint = cells_from(o.at("footprint"));
      obj.part = cells_from(o.at("part"));
      obj.height = o.at("height").get<double>();
      obj.body_colour = colour_from(o.at("body_colour"));
      obj.part_colour = colour_from(o.at("part_colour"));
      obj.body_salience = o.at("body_salience").get<SalienceTable>();
      obj.part_salience = o.at("part_salience").get<SalienceTable>();
      s.objects.push_back(std::move(obj));
    }
    const auto terrain_copy = s.terrain;
    s.index_objects();
    for (std::size_t i = 0; i < terrain_copy.size(); ++i) {
      if (terrain_copy[i] == Terrain::Wall) s.terrain[i] = Terrain::Wall;
      if ((terrain_copy[i] == Terrain::Object) != (s.terrain[i] == Terrain::Object)) {
        fail(Errc::SceneLoadError, "terrain rows disagree with object footprints");
      }
    }
    const auto& spawn = j.at("spawn");
    s.spawn = Pose{spawn.at(0).get<double>(), spawn.at(1).get<double>(), spawn.at(2).get<double>()};
    s.target = j.at("target").get<std::string>();
    s.validate();
    return s;
  } catch (const json::exception& e) {
    fail(Errc::SceneLoadError, std::string("malformed scene: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::SceneLoadError) throw;
    fail(Errc::SceneLoadError, e.what());
  }
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  out << scene_to_json(scene) << '\n';
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::SceneLoadError, "cannot read scene " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return scene_from_json(buffer.str());
}

}  // namespace ganav::sim
