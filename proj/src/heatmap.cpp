#include "ganav/heatmap.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ganav/codec.hpp"

namespace ganav::heatmap {
namespace {

std::string file_safe(std::string_view name) {
  std::string out;
  for (char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    out += std::isalnum(c) != 0 || ch == '-' ? ch : '_';
  }
  return out;
}

Rgb colour(std::uint16_t sample) {
  if (sample == 0) return Rgb{48, 48, 48};
  // Blue -> cyan -> yellow -> red ramp over [-1, 1].
  const double t = std::clamp((decode_score(sample) + 1.0) / 2.0, 0.0, 1.0);
  auto ch = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  const double r = std::clamp(2.0 * t - 0.5, 0.0, 1.0);
  const double g = 1.0 - std::abs(2.0 * t - 1.0);
  const double b = std::clamp(1.5 - 2.0 * t, 0.0, 1.0);
  return Rgb{ch(r), ch(g), ch(b)};
}

}  // namespace

std::uint16_t encode_score(double score) noexcept {
  if (mapping::is_unobserved(score)) return 0;
  const double t = (std::clamp(score, -1.0, 1.0) + 1.0) / 2.0;
  // 0 is reserved for unobserved cells
  return static_cast<std::uint16_t>(std::max(1L, std::lround(t * 65535.0)));
}

double decode_score(std::uint16_t sample) noexcept { return sample / 65535.0 * 2.0 - 1.0; }

void write_pgm16(const std::filesystem::path& path, const Grid16& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  out << "P5\n" << grid.cols << ' ' << grid.rows << "\n65535\n";
  for (std::uint16_t v : grid.samples) {
    const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xFF)};
    out.write(bytes, 2);
  }
  if (!out) fail(Errc::IoError, "short write to " + path.string());
}

Grid16 read_pgm16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot read " + path.string());
  std::string magic;
  int maxval = 0;
  Grid16 grid;
  in >> magic >> grid.cols >> grid.rows >> maxval;
  if (magic != "P5" || maxval != 65535 || grid.rows <= 0 || grid.cols <= 0) {
    fail(Errc::ParseError, path.string() + " is not a 16-bit binary PGM");
  }
  in.get();
  grid.samples.resize(static_cast<std::size_t>(grid.rows) * grid.cols);
  for (auto& v : grid.samples) {
    unsigned char bytes[2];
    if (!in.read(reinterpret_cast<char*>(bytes), 2)) fail(Errc::ParseError, path.string() + " is truncated");
    v = static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
  }
  return grid;
}

Grid16 channel_grid(const mapping::GaMap& map, std::size_t channel) {
  if (channel >= map.channels()) fail(Errc::OutOfBounds, "no such channel");
  const auto& spec = map.spec();
  Grid16 grid{spec.rows, spec.cols, std::vector<std::uint16_t>(spec.cell_count())};
  const auto scores = map.score_grid();
  for (std::size_t i = 0; i < spec.cell_count(); ++i) grid.samples[i] = encode_score(scores[i * map.channels() + channel]);
  return grid;
}

Grid16 mean_grid(const mapping::GaMap& map) {
  const auto& spec = map.spec();
  Grid16 grid{spec.rows, spec.cols, std::vector<std::uint16_t>(spec.cell_count())};
  for (std::size_t i = 0; i < spec.cell_count(); ++i) {
    grid.samples[i] = encode_score(mapping::channel_mean(map, spec.from_linear(i)));
  }
  return grid;
}

std::filesystem::path export_heatmaps(const mapping::GaMap& map, const std::filesystem::path& dir,
                                      const std::string& stem, int step) {
  std::filesystem::create_directories(dir);
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t e = 0; e < map.channels(); ++e) {
    const std::string name = stem + "_" + file_safe(map.channel_names()[e]) + ".pgm";
    write_pgm16(dir / name, channel_grid(map, e));
    files.push_back({{"channel", map.channel_names()[e]}, {"file", name}});
  }
  const std::string mean_name = stem + "_mean.pgm";
  write_pgm16(dir / mean_name, mean_grid(map));
  files.push_back({{"channel", std::string(kMeanChannel)}, {"file", mean_name}});

  const auto& spec = map.spec();
  const nlohmann::json sidecar{{"format", "ganav-heatmap"},
                               {"version", 1},
                               {"resolution", spec.resolution},
                               {"rows", spec.rows},
                               {"cols", spec.cols},
                               {"origin", {spec.origin_x, spec.origin_y}},
                               {"step", step},
                               {"channels", map.channel_names()},
                               {"encoding", "score = sample / 65535 * 2 - 1; sample 0 = unobserved"},
                               {"files", files}};
  const auto path = dir / (stem + ".json");
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write " + path.string());
  out << sidecar.dump(2) << '\n';
  return path;
}

Sidecar read_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot read " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    Sidecar s;
    s.spec.resolution = j.at("resolution").get<double>();
    s.spec.rows = j.at("rows").get<int>();
    s.spec.cols = j.at("cols").get<int>();
    s.spec.origin_x = j.at("origin").at(0).get<double>();
    s.spec.origin_y = j.at("origin").at(1).get<double>();
    s.step = j.at("step").get<int>();
    s.channels = j.at("channels").get<std::vector<std::string>>();
    for (const auto& f : j.at("files")) s.files.emplace_back(f.at("channel").get<std::string>(), f.at("file").get<std::string>());
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, "malformed heatmap sidecar " + path.string() + ": " + e.what());
  }
}

void render_png(const std::filesystem::path& sidecar_path, const std::string& channel,
                const std::filesystem::path& png) {
  const Sidecar sidecar = read_sidecar(sidecar_path);
  const auto it = std::find_if(sidecar.files.begin(), sidecar.files.end(),
                               [&](const auto& f) { return f.first == channel; });
  if (it == sidecar.files.end()) fail(Errc::InvalidArgument, "heatmap has no channel '" + channel + "'");
  const Grid16 grid = read_pgm16(sidecar_path.parent_path() / it->second);

  RgbImage image(grid.rows, grid.cols);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      image(grid.rows - 1 - r, c) = colour(grid.samples[static_cast<std::size_t>(r) * grid.cols + c]);
    }
  }
  const codec::Bytes bytes = codec::encode_png_rgb(image.view());
  std::ofstream out(png, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot write " + png.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace ganav::heatmap
