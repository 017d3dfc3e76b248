#include "ganav/synthetic_provider.hpp"

#include <algorithm>

#include "ganav/error.hpp"
#include "ganav/rng.hpp"

namespace ganav::sim {

SyntheticProvider::SyntheticProvider(std::vector<std::string> channels, std::map<Rgb, std::vector<double>> saliences)
    : channels_(std::move(channels)), saliences_(std::move(saliences)) {
  if (channels_.empty()) fail(Errc::InvalidArgument, "synthetic provider needs at least one channel");
  for (const auto& [colour, s] : saliences_) {
    if (s.size() != channels_.size()) fail(Errc::DimensionMismatch, "salience vector does not match the channels");
    for (double v : s) {
      if (!(v >= 0.0 && v <= 1.0)) fail(Errc::InvalidArgument, "salience outside [0, 1]");
    }
  }
}

SyntheticProvider SyntheticProvider::for_scene(const Scene& scene, std::vector<std::string> channels) {
  std::map<Rgb, std::vector<double>> table;
  auto add = [&](Rgb colour, const SalienceTable& known) {
    auto& s = table.try_emplace(colour, channels.size(), 0.0).first->second;
    for (std::size_t e = 0; e < channels.size(); ++e) {
      if (auto it = known.find(channels[e]); it != known.end()) s[e] = std::max(s[e], it->second);
    }
  };
  for (const auto& o : scene.objects) {
    add(o.body_colour, o.body_salience);
    add(o.part_colour, o.part_salience);
  }
  return SyntheticProvider(std::move(channels), std::move(table));
}

void SyntheticProvider::set_noise(double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) fail(Errc::InvalidArgument, "noise level must be in [0, 1]");
  sigma_ = sigma;
  seed_ = seed;
}

std::vector<scoring::Embedding> SyntheticProvider::embed_images(std::span<const RgbView> patches) {
  const std::size_t channels = channels_.size();
  std::vector<scoring::Embedding> out;
  out.reserve(patches.size());

  // Pixel feature per colour, built lazily for this batch.
  std::map<Rgb, scoring::Embedding> features;
  auto feature = [&](Rgb colour) -> const scoring::Embedding& {
    auto [it, fresh] = features.try_emplace(colour, channels + 1, 0.0);
    if (!fresh) return it->second;
    auto& f = it->second;
    double peak = 0.0;
    if (auto s = saliences_.find(colour); s != saliences_.end()) {
      double gain = 1.0;
      if (sigma_ > 0.0) {
        const std::uint64_t key = (std::uint64_t{colour.r} << 16) | (std::uint64_t{colour.g} << 8) | colour.b;
        gain = 1.0 - sigma_ * hash_unit(hash_mix(seed_, epoch_, key));
      }
      for (std::size_t e = 0; e < channels; ++e) {
        f[e] = s->second[e] * gain;
        peak = std::max(peak, f[e]);
      }
    }
    f[channels] = 1.0 - peak;
    return f;
  };

  for (const RgbView& patch : patches) {
    if (patch.rows() <= 0 || patch.cols() <= 0) fail(Errc::InvalidArgument, "empty patch");
    scoring::Embedding v(channels + 1, 0.0);
    const Rgb* last = nullptr;
    const scoring::Embedding* last_feature = nullptr;
    for (int r = 0; r < patch.rows(); ++r) {
      for (const Rgb& px : patch.row(r)) {
        if (last == nullptr || *last != px) {
          last = &px;
          last_feature = &feature(px);
        }
        for (std::size_t i = 0; i <= channels; ++i) v[i] += (*last_feature)[i];
      }
    }
    scoring::normalize(v);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<scoring::Embedding> SyntheticProvider::embed_texts(std::span<const std::string> texts) {
  std::vector<scoring::Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    scoring::Embedding v(channels_.size() + 1, 0.0);
    const auto it = std::find(channels_.begin(), channels_.end(), t);
    v[static_cast<std::size_t>(it - channels_.begin())] = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace ganav::sim
