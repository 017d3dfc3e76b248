#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ganav/attributes.hpp"
#include "ganav/embedding.hpp"
#include "ganav/image.hpp"

// Multi-scale patch scoring of an RGB observation against attribute embeddings.
namespace ganav::scoring {

inline constexpr int kDefaultLevels = 3;
inline constexpr int kMaxLevels = 4;

// One patch of the pyramid. Level and (h, w) are 1-based.
struct PatchRect {
  int level = 1;
  int h = 1;
  int w = 1;
  int row0 = 0;
  int col0 = 0;
  int rows = 0;
  int cols = 0;
};

struct PatchPyramid {
  int levels = 0;
  int image_rows = 0;
  int image_cols = 0;
  // Level-major, row-major within a level: level k starts at (4^(k-1) - 1) / 3.
  std::vector<PatchRect> patches;
  // Resampled copies, one per patch, only when a resize target was requested.
  std::vector<RgbImage> resized;

  std::size_t count(int level) const noexcept { return std::size_t{1} << (2 * (level - 1)); }
  std::size_t level_offset(int level) const noexcept { return ((std::size_t{1} << (2 * (level - 1))) - 1) / 3; }
};

// Throws IndivisibleImage unless both sides divide by 2^(levels-1).
PatchPyramid partition(const RgbImage& image, int levels, int resize_to = 0);

// 1-based (h, w) of the level-k patch containing pixel (p, q). Throws OutOfBounds.
std::pair<int, int> patch_index(int p, int q, int k, int rows, int cols);

// Cosine similarity clamped to [-1, 1]. Throws ZeroVector or DimensionMismatch.
double similarity(std::span<const double> v, std::span<const double> e);

enum class LevelAggregation { Mean, Max };

struct ScoringOptions {
  int levels = kDefaultLevels;
  LevelAggregation aggregation = LevelAggregation::Mean;
  std::size_t batch_size = 64;
  // Order in which levels are sent to the provider; empty means 1..L.
  // The per-pixel reduction always runs in level order, so the result does
  // not depend on this.
  std::vector<int> level_order;
};

// Per-pixel, per-channel score S(p, q, e), stored as one row-major plane per channel.
class ScoreImage {
 public:
  ScoreImage() = default;
  ScoreImage(int rows, int cols, std::size_t channels, double fill = 0.0);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t channels() const noexcept { return channels_; }

  double operator()(int p, int q, std::size_t e) const noexcept { return plane(e)[static_cast<std::size_t>(p) * cols_ + q]; }
  double& operator()(int p, int q, std::size_t e) noexcept { return plane(e)[static_cast<std::size_t>(p) * cols_ + q]; }

  std::span<double> plane(std::size_t e) noexcept { return {data_.data() + e * plane_size(), plane_size()}; }
  std::span<const double> plane(std::size_t e) const noexcept { return {data_.data() + e * plane_size(), plane_size()}; }
  std::span<const double> values() const noexcept { return data_; }

  bool operator==(const ScoreImage&) const = default;

 private:
  std::size_t plane_size() const noexcept { return static_cast<std::size_t>(rows_) * cols_; }

  int rows_ = 0;
  int cols_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

// Scores of every patch against every channel, indexed [patch][channel] in
// PatchPyramid order.
using PatchScores = std::vector<std::vector<double>>;

PatchScores score_patches(const PatchPyramid& pyramid, const RgbImage& image,
                          const attributes::AttributeEmbeddings& attrs, EmbeddingProvider& provider,
                          const ScoringOptions& options);

// Broadcasts patch scores to pixels and reduces across levels.
ScoreImage accumulate(const PatchPyramid& pyramid, const PatchScores& scores, std::size_t channels,
                      LevelAggregation aggregation);

ScoreImage score_observation(const RgbImage& image, const attributes::AttributeEmbeddings& attrs,
                             EmbeddingProvider& provider, const ScoringOptions& options = {});

}  // namespace ganav::scoring
