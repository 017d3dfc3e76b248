#include "ganav/embedding.hpp"

#include <cmath>

#include "ganav/kernels.hpp"

namespace ganav::scoring {

double l2_norm(std::span<const double> v) noexcept { return std::sqrt(kernels::dot(v, v)); }

void normalize(Embedding& v) {
  const double n = l2_norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) fail(Errc::ZeroVector, "cannot normalize a zero or non-finite vector");
  for (double& x : v) x /= n;
}

}  // namespace ganav::scoring
