#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ganav/gamap.hpp"

// Heatmap artifacts: one 16-bit binary PGM per channel plus the channel mean,
// and a JSON sidecar naming them. Scores map linearly from [-1, 1] onto
// [0, 65535]; unobserved cells are written as 0. Rows are stored in map row
// order (row 0 = lowest world y) and samples are big-endian, per netpbm.
namespace ganav::heatmap {

inline constexpr std::string_view kMeanChannel = "mean";

std::uint16_t encode_score(double score) noexcept;
double decode_score(std::uint16_t sample) noexcept;

struct Grid16 {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint16_t> samples;
};

void write_pgm16(const std::filesystem::path& path, const Grid16& grid);
Grid16 read_pgm16(const std::filesystem::path& path);

Grid16 channel_grid(const mapping::GaMap& map, std::size_t channel);
Grid16 mean_grid(const mapping::GaMap& map);

// Writes <stem>_<channel>.pgm for every channel, <stem>_mean.pgm and
// <stem>.json. Returns the sidecar path.
std::filesystem::path export_heatmaps(const mapping::GaMap& map, const std::filesystem::path& dir,
                                      const std::string& stem, int step);

struct Sidecar {
  geometry::GridSpec spec;
  int step = 0;
  std::vector<std::string> channels;
  // channel name (or "mean") -> PGM file, relative to the sidecar
  std::vector<std::pair<std::string, std::string>> files;
};

Sidecar read_sidecar(const std::filesystem::path& path);

// Colourises one channel of an exported heatmap and writes it as PNG, with
// world y pointing up. Unobserved cells are drawn dark grey.
void render_png(const std::filesystem::path& sidecar, const std::string& channel, const std::filesystem::path& png);

}  // namespace ganav::heatmap
