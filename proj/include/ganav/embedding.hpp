#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ganav/image.hpp"

namespace ganav::scoring {

using Embedding = std::vector<double>;

// Source of image-patch and text embeddings in a shared space.
//
// Implementations return one unit-norm vector per input, in input order, all
// of dimension `dimension()`, and must be deterministic for identical inputs.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dimension() = 0;
  // Side length patches are resized to before embedding; 0 means patches are
  // passed at native resolution.
  virtual int input_size() { return 0; }

  virtual std::vector<Embedding> embed_images(std::span<const RgbView> patches) = 0;
  virtual std::vector<Embedding> embed_texts(std::span<const std::string> texts) = 0;
};

double l2_norm(std::span<const double> v) noexcept;
// Scales `v` to unit length. Throws ZeroVector.
void normalize(Embedding& v);

}  // namespace ganav::scoring
