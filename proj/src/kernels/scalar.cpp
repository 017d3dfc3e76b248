#include "ganav/kernels.hpp"

namespace ganav::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void add_scalar(double* dst, std::size_t n, double v) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += v;
}

void max_scalar(double* dst, std::size_t n, double v) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = dst[i] > v ? dst[i] : v;
}

void scale(double* dst, std::size_t n, double v) {
  for (std::size_t i = 0; i < n; ++i) dst[i] *= v;
}

void max_into(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = dst[i] > src[i] ? dst[i] : src[i];
}

void merge(double* dst, const double* src, std::size_t n, MergeMode mode, double unobserved) {
  for (std::size_t i = 0; i < n; ++i) {
    const double old = dst[i];
    const double now = src[i];
    double out = now;
    switch (mode) {
      case MergeMode::Max: out = old > now ? old : now; break;
      case MergeMode::Average: out = (old + now) * 0.5; break;
      case MergeMode::Replacement: out = now; break;
    }
    dst[i] = old == unobserved ? now : out;
  }
}

constexpr Table kScalar{Isa::Scalar, "scalar", dot, add_scalar, max_scalar, scale, max_into, merge};

}  // namespace

namespace detail {
const Table& scalar_impl() noexcept { return kScalar; }
}  // namespace detail

}  // namespace ganav::kernels
