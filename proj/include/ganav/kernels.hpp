#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by scoring and map fusion.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds,
// an AVX2 variant. The variant is picked once at startup from CPUID; setting
// GANAV_ISA=scalar in the environment (or calling force_isa) pins the scalar
// path. Elementwise kernels are bit-identical across variants; `dot` differs
// only by summation order.
namespace ganav::kernels {

enum class Isa { Scalar, Avx2 };

// Mirrors mapping::UpdateMode; kept numeric here so the kernels stay leaf code.
enum class MergeMode : int { Max = 0, Average = 1, Replacement = 2 };

struct Table {
  Isa isa;
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*add_scalar)(double* dst, std::size_t n, double v);
  // dst[i] = dst[i] > v ? dst[i] : v
  void (*max_scalar)(double* dst, std::size_t n, double v);
  void (*scale)(double* dst, std::size_t n, double v);
  // dst[i] = dst[i] > src[i] ? dst[i] : src[i]
  void (*max_into)(double* dst, const double* src, std::size_t n);
  // dst[i] = rule(dst[i], src[i]); dst[i] == unobserved takes src[i] unchanged.
  void (*merge)(double* dst, const double* src, std::size_t n, MergeMode mode, double unobserved);
};

const Table& scalar_table() noexcept;
// nullptr when the variant was not compiled in or the CPU lacks it.
const Table* table_for(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;

const Table& active() noexcept;
Isa active_isa() noexcept;
// Returns false (and leaves the selection unchanged) if `isa` is unavailable.
bool force_isa(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}
inline void add_scalar(std::span<double> dst, double v) noexcept { active().add_scalar(dst.data(), dst.size(), v); }
inline void max_scalar(std::span<double> dst, double v) noexcept { active().max_scalar(dst.data(), dst.size(), v); }
inline void scale(std::span<double> dst, double v) noexcept { active().scale(dst.data(), dst.size(), v); }
inline void max_into(std::span<double> dst, std::span<const double> src) noexcept {
  active().max_into(dst.data(), src.data(), dst.size());
}
inline void merge(std::span<double> dst, std::span<const double> src, MergeMode mode, double unobserved) noexcept {
  active().merge(dst.data(), src.data(), dst.size(), mode, unobserved);
}

namespace detail {
const Table& scalar_impl() noexcept;
#if defined(GANAV_HAS_AVX2)
const Table& avx2_impl() noexcept;
#endif
}  // namespace detail

}  // namespace ganav::kernels
