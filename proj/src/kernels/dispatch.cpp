#include <atomic>
#include <cstdlib>
#include <string_view>

#include "ganav/kernels.hpp"

namespace ganav::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(GANAV_HAS_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Table* initial_table() noexcept {
  const char* env = std::getenv("GANAV_ISA");
  if (env != nullptr && std::string_view(env) == "scalar") return &detail::scalar_impl();
  if (const Table* t = table_for(Isa::Avx2)) return t;
  return &detail::scalar_impl();
}

std::atomic<const Table*>& selected() noexcept {
  static std::atomic<const Table*> table{initial_table()};
  return table;
}

}  // namespace

const Table& scalar_table() noexcept { return detail::scalar_impl(); }

const Table* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return &detail::scalar_impl();
    case Isa::Avx2:
#if defined(GANAV_HAS_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_impl();
#endif
      return nullptr;
  }
  return nullptr;
}

bool isa_available(Isa isa) noexcept { return table_for(isa) != nullptr; }

const Table& active() noexcept { return *selected().load(std::memory_order_relaxed); }

Isa active_isa() noexcept { return active().isa; }

bool force_isa(Isa isa) noexcept {
  const Table* t = table_for(isa);
  if (t == nullptr) return false;
  selected().store(t, std::memory_order_relaxed);
  return true;
}

}  // namespace ganav::kernels
