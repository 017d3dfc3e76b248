#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ganav/embedding.hpp"
#include "ganav/gamap.hpp"
#include "ganav/image.hpp"
#include "ganav/scene.hpp"

namespace testing {

// Embeds a patch from its mean colour plus a constant axis; deterministic and
// sensitive to where in the image the patch sits. Counts calls and items.
class MeanColourProvider final : public ganav::scoring::EmbeddingProvider {
 public:
  std::size_t dimension() override { return 4; }
  std::vector<ganav::scoring::Embedding> embed_images(std::span<const ganav::RgbView> patches) override {
    ++calls;
    std::vector<ganav::scoring::Embedding> out;
    for (const auto& p : patches) {
      ganav::scoring::Embedding v{0.0, 0.0, 0.0, 20.0};
      for (int r = 0; r < p.rows(); ++r) {
        for (const auto& px : p.row(r)) {
          v[0] += px.r;
          v[1] += px.g;
          v[2] += px.b;
        }
      }
      const double n = static_cast<double>(p.rows()) * p.cols();
      for (int i = 0; i < 3; ++i) v[i] = v[i] / n - 127.5;
      ganav::scoring::normalize(v);
      out.push_back(std::move(v));
      ++items;
    }
    return out;
  }
  std::vector<ganav::scoring::Embedding> embed_texts(std::span<const std::string> texts) override {
    std::vector<ganav::scoring::Embedding> out;
    for (const auto& t : texts) {
      std::uint64_t h = std::hash<std::string>{}(t);
      ganav::scoring::Embedding v(4);
      for (auto& x : v) {
        x = static_cast<double>(h % 2001) / 1000.0 - 1.0;
        h /= 2001;
      }
      v[3] += 0.1;
      ganav::scoring::normalize(v);
      out.push_back(std::move(v));
    }
    return out;
  }

  int calls = 0;
  int items = 0;
};

inline ganav::RgbImage random_image(std::mt19937_64& rng, int rows, int cols) {
  ganav::RgbImage img(rows, cols);
  std::uniform_int_distribution<int> u(0, 255);
  for (auto& px : img.pixels()) px = ganav::Rgb{static_cast<std::uint8_t>(u(rng)), static_cast<std::uint8_t>(u(rng)),
                                                static_cast<std::uint8_t>(u(rng))};
  return img;
}

// Open room of free floor ringed by wall, no objects.
inline ganav::sim::Scene empty_room(int rows, int cols, double resolution = 0.1) {
  ganav::sim::Scene s;
  s.spec = ganav::geometry::GridSpec{resolution, rows, cols, 0.0, 0.0};
  s.terrain.assign(s.spec.cell_count(), ganav::sim::Terrain::Free);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (r == 0 || c == 0 || r == rows - 1 || c == cols - 1) s.terrain[s.spec.linear({r, c})] = ganav::sim::Terrain::Wall;
    }
  }
  s.object_at.assign(s.spec.cell_count(), -1);
  s.spawn = {s.spec.center_x({rows / 2, cols / 2}), s.spec.center_y({rows / 2, cols / 2}), 0.0};
  return s;
}

inline ganav::sim::ObjectInstance box(std::string category, int r0, int c0, int rows, int cols, ganav::Rgb colour) {
  ganav::sim::ObjectInstance o;
  o.category = std::move(category);
  for (int r = r0; r < r0 + rows; ++r) {
    for (int c = c0; c < c0 + cols; ++c) o.footprint.push_back({r, c});
  }
  o.body_colour = colour;
  o.part_colour = colour;
  return o;
}

}  // namespace testing
