#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ganav/embedding.hpp"
#include "ganav/scene.hpp"

namespace ganav::sim {

// Deterministic stand-in for a vision-language encoder.
//
// The space has one basis vector per attribute channel plus one background
// axis. Text for channel e embeds to b_e; any other text embeds to the
// background axis. A pixel of colour c contributes
//   sum_e s(c, e) b_e + (1 - max_e s(c, e)) b_bg
// and a patch embeds to the normalised sum over its pixels, so cosine with b_e
// grows with the salient area and colours without saliences pull toward the
// background.
class SyntheticProvider final : public scoring::EmbeddingProvider {
 public:
  SyntheticProvider(std::vector<std::string> channels, std::map<Rgb, std::vector<double>> saliences);

  // Saliences of every object colour in the scene for the given channels.
  static SyntheticProvider for_scene(const Scene& scene, std::vector<std::string> channels);

  std::size_t dimension() override { return channels_.size() + 1; }
  std::vector<scoring::Embedding> embed_images(std::span<const RgbView> patches) override;
  std::vector<scoring::Embedding> embed_texts(std::span<const std::string> texts) override;

  // Per-observation degradation: each colour's saliences are scaled by
  // 1 - sigma * u with u uniform in [0, 1), drawn from (seed, epoch, colour).
  void set_noise(double sigma, std::uint64_t seed);
  void set_noise_epoch(std::uint64_t epoch) { epoch_ = epoch; }

  const std::vector<std::string>& channels() const noexcept { return channels_; }

 private:
  std::vector<std::string> channels_;
  std::map<Rgb, std::vector<double>> saliences_;
  double sigma_ = 0.0;
  std::uint64_t seed_ = 0;
  std::uint64_t epoch_ = 0;
};

}  // namespace ganav::sim
