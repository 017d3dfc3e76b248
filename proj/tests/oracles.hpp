#pragma once

// Brute-force reference implementations the library is checked against. They
// deliberately avoid the library's own helpers (patch_index, kernels, carving)
// and work pixel by pixel or cell by cell.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ganav/gamap.hpp"
#include "ganav/geometry.hpp"
#include "ganav/image.hpp"
#include "ganav/pyramid.hpp"

namespace oracle {

using ganav::geometry::CellIndex;
using ganav::geometry::GridSpec;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

inline bool close(double a, double b, double rel = 1e-9) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Per-pixel pyramid scoring: for every pixel and level, find the patch by
// integer division, embed it alone and average the cosines.
inline ganav::scoring::ScoreImage score_per_pixel(const ganav::RgbImage& image,
                                                  const std::vector<std::vector<double>>& text,
                                                  ganav::scoring::EmbeddingProvider& provider, int levels) {
  const int rows = image.rows();
  const int cols = image.cols();
  ganav::scoring::ScoreImage out(rows, cols, text.size(), 0.0);
  std::map<std::tuple<int, int, int>, std::vector<double>> cache;
  for (int p = 0; p < rows; ++p) {
    for (int q = 0; q < cols; ++q) {
      for (std::size_t e = 0; e < text.size(); ++e) {
        double sum = 0.0;
        for (int k = 1; k <= levels; ++k) {
          const int n = 1 << (k - 1);
          const int ph = rows / n;
          const int pw = cols / n;
          const int h = p / ph;
          const int w = q / pw;
          auto it = cache.find({k, h, w});
          if (it == cache.end()) {
            ganav::RgbView v = image.view().sub(h * ph, w * pw, ph, pw);
            auto emb = provider.embed_images(std::span<const ganav::RgbView>(&v, 1));
            it = cache.emplace(std::tuple{k, h, w}, emb.front()).first;
          }
          sum += cosine(it->second, text[e]);
        }
        out(p, q, e) = sum / levels;
      }
    }
  }
  return out;
}

struct FusionOracle {
  double camera_height = 0.88;
  double max_depth = 10.0;
  double floor_max = 0.2;
  double obstacle_max = 1.5;
};

// Per-cell maximum over pixels landing in each cell, then max with the prior
// scores. Returns the full cell-major score grid.
inline std::vector<double> fuse_max(std::vector<double> prior, const GridSpec& spec, std::size_t channels,
                                    const ganav::scoring::ScoreImage& scores, const ganav::DepthImage& depth,
                                    const ganav::geometry::Pose& pose,
                                    const ganav::geometry::CameraIntrinsics& k, const FusionOracle& o = {}) {
  std::vector<double> staged(prior.size(), ganav::mapping::kUnobserved);
  for (int p = 0; p < depth.rows(); ++p) {
    for (int q = 0; q < depth.cols(); ++q) {
      const double d = depth(p, q);
      if (!(std::isfinite(d) && d > 0.0 && d < o.max_depth)) continue;
      const double xc = (q - k.cx) / k.fx * d;
      const double yc = (p - k.cy) / k.fy * d;
      // Forward along heading, camera x to the agent's right.
      double wx = pose.x + d * std::cos(pose.theta) + xc * std::sin(pose.theta);
      double wy = pose.y + d * std::sin(pose.theta) - xc * std::cos(pose.theta);
      const double wz = o.camera_height - yc;
      if (wz > o.obstacle_max) continue;
      if (wz >= o.floor_max) {
        const double r = std::hypot(wx - pose.x, wy - pose.y);
        if (r > 0.0) {
          wx += (wx - pose.x) / r * ganav::mapping::kSurfaceNudge;
          wy += (wy - pose.y) / r * ganav::mapping::kSurfaceNudge;
        }
      }
      const double fc = std::floor((wx - spec.origin_x) / spec.resolution);
      const double fr = std::floor((wy - spec.origin_y) / spec.resolution);
      if (fc < 0 || fr < 0 || fc >= spec.cols || fr >= spec.rows) continue;
      const std::size_t cell = static_cast<std::size_t>(fr) * spec.cols + static_cast<std::size_t>(fc);
      for (std::size_t e = 0; e < channels; ++e) {
        double& s = staged[cell * channels + e];
        s = std::max(s, scores(p, q, e));
      }
    }
  }
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (staged[i] == ganav::mapping::kUnobserved) continue;
    prior[i] = prior[i] == ganav::mapping::kUnobserved ? staged[i] : std::max(prior[i], staged[i]);
  }
  return prior;
}

// Dijkstra over free cells with unit steps of `resolution`; diagonal moves cost
// sqrt(2) and may not cut a blocked corner.
inline std::vector<double> dijkstra(const std::vector<std::uint8_t>& blocked, const GridSpec& spec, CellIndex src,
                                    bool eight) {
  std::vector<double> dist(spec.cell_count(), kInf);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[spec.linear(src)] = 0.0;
  heap.emplace(0.0, spec.linear(src));
  auto free_at = [&](int r, int c) {
    return r >= 0 && c >= 0 && r < spec.rows && c < spec.cols && !blocked[static_cast<std::size_t>(r) * spec.cols + c];
  };
  while (!heap.empty()) {
    auto [d, i] = heap.top();
    heap.pop();
    if (d > dist[i]) continue;
    const int r = static_cast<int>(i) / spec.cols;
    const int c = static_cast<int>(i) % spec.cols;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const bool diag = dr != 0 && dc != 0;
        if (diag && !eight) continue;
        if (!free_at(r + dr, c + dc)) continue;
        if (diag && (!free_at(r + dr, c) || !free_at(r, c + dc))) continue;
        const double step = (diag ? std::sqrt(2.0) : 1.0) * spec.resolution;
        const std::size_t j = static_cast<std::size_t>(r + dr) * spec.cols + (c + dc);
        if (d + step < dist[j]) {
          dist[j] = d + step;
          heap.emplace(dist[j], j);
        }
      }
    }
  }
  return dist;
}

// Every cell within Chebyshev distance `radius` of a marked cell.
inline std::vector<std::uint8_t> dilate(const std::vector<std::uint8_t>& mask, const GridSpec& spec, int radius) {
  std::vector<std::uint8_t> out(mask.size(), 0);
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      for (int rr = 0; rr < spec.rows && !out[spec.linear({r, c})]; ++rr) {
        for (int cc = 0; cc < spec.cols; ++cc) {
          if (mask[spec.linear({rr, cc})] && std::abs(rr - r) <= radius && std::abs(cc - c) <= radius) {
            out[spec.linear({r, c})] = 1;
            break;
          }
        }
      }
    }
  }
  return out;
}

// Free cells with an Unknown 4-neighbour.
inline std::vector<std::uint8_t> frontier_scan(const ganav::mapping::GaMap& map) {
  using ganav::mapping::Occupancy;
  const GridSpec& spec = map.spec();
  std::vector<std::uint8_t> out(spec.cell_count(), 0);
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      if (map.occupancy({r, c}) != Occupancy::Free) continue;
      const int nb[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
      for (const auto& n : nb) {
        if (spec.contains({n[0], n[1]}) && map.occupancy({n[0], n[1]}) == Occupancy::Unknown) {
          out[spec.linear({r, c})] = 1;
        }
      }
    }
  }
  return out;
}

}  // namespace oracle
