#include "ganav/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ganav/kernels.hpp"

namespace ganav::scoring {
namespace {

void check_levels(int levels) {
  if (levels < 1 || levels > kMaxLevels) {
    fail(Errc::InvalidArgument, "pyramid levels must be in [1, " + std::to_string(kMaxLevels) + "]");
  }
}

std::vector<int> resolve_order(const ScoringOptions& options) {
  std::vector<int> order = options.level_order;
  if (order.empty()) {
    order.resize(options.levels);
    std::iota(order.begin(), order.end(), 1);
    return order;
  }
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < options.levels; ++k) {
    if (static_cast<int>(sorted.size()) != options.levels || sorted[k] != k + 1) {
      fail(Errc::InvalidArgument, "level_order must be a permutation of 1..levels");
    }
  }
  return order;
}

}  // namespace

PatchPyramid partition(const RgbImage& image, int levels, int resize_to) {
  check_levels(levels);
  const int finest = 1 << (levels - 1);
  if (image.rows() <= 0 || image.cols() <= 0 || image.rows() % finest != 0 || image.cols() % finest != 0) {
    fail(Errc::IndivisibleImage, std::to_string(image.rows()) + "x" + std::to_string(image.cols()) +
                                     " image does not divide into " + std::to_string(finest) + "x" +
                                     std::to_string(finest) + " patches");
  }

  PatchPyramid pyramid;
  pyramid.levels = levels;
  pyramid.image_rows = image.rows();
  pyramid.image_cols = image.cols();
  for (int k = 1; k <= levels; ++k) {
    const int n = 1 << (k - 1);
    const int ph = image.rows() / n;
    const int pw = image.cols() / n;
    for (int h = 1; h <= n; ++h) {
      for (int w = 1; w <= n; ++w) {
        pyramid.patches.push_back(PatchRect{k, h, w, (h - 1) * ph, (w - 1) * pw, ph, pw});
      }
    }
  }
  if (resize_to > 0) {
    pyramid.resized.reserve(pyramid.patches.size());
    for (const PatchRect& rect : pyramid.patches) {
      pyramid.resized.push_back(
          resize_bilinear(image.view().sub(rect.row0, rect.col0, rect.rows, rect.cols), resize_to, resize_to));
    }
  }
  return pyramid;
}

std::pair<int, int> patch_index(int p, int q, int k, int rows, int cols) {
  check_levels(k);
  if (p < 0 || q < 0 || p >= rows || q >= cols) fail(Errc::OutOfBounds, "pixel outside image");
  const int n = 1 << (k - 1);
  if (rows % n != 0 || cols % n != 0) fail(Errc::IndivisibleImage, "image does not divide at this level");
  return {p / (rows / n) + 1, q / (cols / n) + 1};
}

double similarity(std::span<const double> v, std::span<const double> e) {
  if (v.size() != e.size()) fail(Errc::DimensionMismatch, "embedding dimensions differ");
  const double nv = std::sqrt(kernels::dot(v, v));
  const double ne = std::sqrt(kernels::dot(e, e));
  if (!(nv > 0.0) || !(ne > 0.0)) fail(Errc::ZeroVector, "cosine similarity of a zero vector");
  return std::clamp(kernels::dot(v, e) / (nv * ne), -1.0, 1.0);
}

ScoreImage::ScoreImage(int rows, int cols, std::size_t channels, double fill)
    : rows_(rows), cols_(cols), channels_(channels),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * channels, fill) {
  if (rows < 0 || cols < 0) fail(Errc::InvalidArgument, "negative score image size");
}

PatchScores score_patches(const PatchPyramid& pyramid, const RgbImage& image,
                          const attributes::AttributeEmbeddings& attrs, EmbeddingProvider& provider,
                          const ScoringOptions& options) {
  if (attrs.channels() == 0) fail(Errc::InvalidArgument, "no attribute channels to score");
  if (options.batch_size == 0) fail(Errc::InvalidArgument, "batch size must be positive");
  ScoringOptions effective = options;
  effective.levels = pyramid.levels;
  const std::vector<int> order = resolve_order(effective);

  PatchScores scores(pyramid.patches.size());
  for (int k : order) {
    const std::size_t first = pyramid.level_offset(k);
    const std::size_t count = pyramid.count(k);
    for (std::size_t start = first; start < first + count; start += options.batch_size) {
      const std::size_t end = std::min(first + count, start + options.batch_size);
      std::vector<RgbView> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        const PatchRect& r = pyramid.patches[i];
        batch.push_back(pyramid.resized.empty() ? image.view().sub(r.row0, r.col0, r.rows, r.cols)
                                                : pyramid.resized[i].view());
      }

      const PatchRect& lead = pyramid.patches[start];
      const std::string where = "level " + std::to_string(k) + " patch (" + std::to_string(lead.h) + ", " +
                                std::to_string(lead.w) + ")";
      std::vector<Embedding> vectors;
      try {
        vectors = provider.embed_images(batch);
      } catch (const Error& e) {
        fail(Errc::ProviderFailure, where + ": " + e.what());
      }
      if (vectors.size() != batch.size()) fail(Errc::ProviderFailure, where + ": wrong number of embeddings");

      for (std::size_t i = start; i < end; ++i) {
        const Embedding& v = vectors[i - start];
        auto& row = scores[i];
        row.resize(attrs.channels());
        try {
          for (std::size_t e = 0; e < attrs.channels(); ++e) row[e] = similarity(v, attrs.vectors[e]);
        } catch (const Error& e) {
          fail(Errc::ProviderFailure, where + ": " + e.what());
        }
      }
    }
  }
  return scores;
}

ScoreImage accumulate(const PatchPyramid& pyramid, const PatchScores& scores, std::size_t channels,
                      LevelAggregation aggregation) {
  if (scores.size() != pyramid.patches.size()) fail(Errc::DimensionMismatch, "patch score count mismatch");
  const bool mean = aggregation == LevelAggregation::Mean;
  ScoreImage out(pyramid.image_rows, pyramid.image_cols, channels,
                 mean ? 0.0 : -std::numeric_limits<double>::infinity());

  for (std::size_t e = 0; e < channels; ++e) {
    std::span<double> plane = out.plane(e);
    for (std::size_t i = 0; i < pyramid.patches.size(); ++i) {
      const PatchRect& r = pyramid.patches[i];
      const double s = scores[i][e];
      for (int row = r.row0; row < r.row0 + r.rows; ++row) {
        auto segment = plane.subspan(static_cast<std::size_t>(row) * pyramid.image_cols + r.col0, r.cols);
        if (mean) {
          kernels::add_scalar(segment, s);
        } else {
          kernels::max_scalar(segment, s);
        }
      }
    }
    if (mean) kernels::scale(plane, 1.0 / pyramid.levels);
  }
  return out;
}

ScoreImage score_observation(const RgbImage& image, const attributes::AttributeEmbeddings& attrs,
                             EmbeddingProvider& provider, const ScoringOptions& options) {
  check_levels(options.levels);
  const PatchPyramid pyramid = partition(image, options.levels, provider.input_size());
  const PatchScores scores = score_patches(pyramid, image, attrs, provider, options);
  return accumulate(pyramid, scores, attrs.channels(), options.aggregation);
}

}  // namespace ganav::scoring
