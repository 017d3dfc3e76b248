#include <immintrin.h>

#include "ganav/kernels.hpp"

namespace ganav::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc0);
  const __m128d hi = _mm256_extractf128_pd(acc0, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double acc = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void add_scalar(double* dst, std::size_t n, double v) {
  const __m256d vv = _mm256_set1_pd(v);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), vv));
  for (; i < n; ++i) dst[i] += v;
}

void max_scalar(double* dst, std::size_t n, double v) {
  const __m256d vv = _mm256_set1_pd(v);
  std::size_t i = 0;
  // maxpd(a, b) yields a only when a > b, matching the scalar reference.
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(dst + i, _mm256_max_pd(_mm256_loadu_pd(dst + i), vv));
  for (; i < n; ++i) dst[i] = dst[i] > v ? dst[i] : v;
}

void scale(double* dst, std::size_t n, double v) {
  const __m256d vv = _mm256_set1_pd(v);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(dst + i), vv));
  for (; i < n; ++i) dst[i] *= v;
}

void max_into(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_max_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i)));
  }
  for (; i < n; ++i) dst[i] = dst[i] > src[i] ? dst[i] : src[i];
}

void merge(double* dst, const double* src, std::size_t n, MergeMode mode, double unobserved) {
  const __m256d sentinel = _mm256_set1_pd(unobserved);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d old = _mm256_loadu_pd(dst + i);
    const __m256d now = _mm256_loadu_pd(src + i);
    __m256d out = now;
    if (mode == MergeMode::Max) {
      out = _mm256_max_pd(old, now);
    } else if (mode == MergeMode::Average) {
      out = _mm256_mul_pd(_mm256_add_pd(old, now), half);
    }
    const __m256d unseen = _mm256_cmp_pd(old, sentinel, _CMP_EQ_OQ);
    _mm256_storeu_pd(dst + i, _mm256_blendv_pd(out, now, unseen));
  }
  for (; i < n; ++i) {
    const double old = dst[i];
    const double now = src[i];
    double out = now;
    if (mode == MergeMode::Max) {
      out = old > now ? old : now;
    } else if (mode == MergeMode::Average) {
      out = (old + now) * 0.5;
    }
    dst[i] = old == unobserved ? now : out;
  }
}

constexpr Table kAvx2{Isa::Avx2, "avx2", dot, add_scalar, max_scalar, scale, max_into, merge};

}  // namespace

namespace detail {
const Table& avx2_impl() noexcept { return kAvx2; }
}  // namespace detail

}  // namespace ganav::kernels
