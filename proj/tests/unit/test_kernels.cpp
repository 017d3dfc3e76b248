#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ganav/gamap.hpp"
#include "ganav/kernels.hpp"

using namespace ganav;
using namespace ganav::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar table is always present") {
    CHECK(scalar_table().isa == Isa::Scalar);
    CHECK(table_for(Isa::Scalar) == &scalar_table());
    CHECK(isa_available(Isa::Scalar));
  }

  TEST_CASE("scalar kernels match plain loops") {
    std::mt19937_64 rng(41);
    const Table& t = scalar_table();
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u}) {
      auto a = random_vec(rng, n);
      auto b = random_vec(rng, n);
      double ref = 0.0;
      for (std::size_t i = 0; i < n; ++i) ref += a[i] * b[i];
      CHECK(t.dot(a.data(), b.data(), n) == doctest::Approx(ref).epsilon(1e-14));

      auto c = a;
      t.max_into(c.data(), b.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(c[i] == std::max(a[i], b[i]));
      c = a;
      t.max_scalar(c.data(), n, 0.1);
      for (std::size_t i = 0; i < n; ++i) CHECK(c[i] == std::max(a[i], 0.1));
      c = a;
      t.add_scalar(c.data(), n, 0.25);
      for (std::size_t i = 0; i < n; ++i) CHECK(c[i] == a[i] + 0.25);
      c = a;
      t.scale(c.data(), n, 1.0 / 3.0);
      for (std::size_t i = 0; i < n; ++i) CHECK(c[i] == a[i] * (1.0 / 3.0));
    }
  }

  TEST_CASE("merge applies the update rules") {
    const double u = mapping::kUnobserved;
    for (auto mode : {MergeMode::Max, MergeMode::Average, MergeMode::Replacement}) {
      std::vector<double> dst{0.8, u, -0.3, 0.1, 0.2};
      const std::vector<double> src{0.5, 0.4, -0.1, 0.9, 0.2};
      scalar_table().merge(dst.data(), src.data(), dst.size(), mode, u);
      const auto um = static_cast<mapping::UpdateMode>(static_cast<int>(mode));
      const std::vector<double> old{0.8, u, -0.3, 0.1, 0.2};
      for (std::size_t i = 0; i < dst.size(); ++i) CHECK(dst[i] == mapping::update_rule(old[i], src[i], um));
    }
  }

  TEST_CASE("AVX2 kernels agree with scalar") {
    const Table* avx = table_for(Isa::Avx2);
    if (avx == nullptr) {
      MESSAGE("AVX2 variant unavailable on this machine; equivalence not exercised");
      return;
    }
    CHECK(avx->isa == Isa::Avx2);
    const Table& s = scalar_table();
    std::mt19937_64 rng(43);
    const double u = mapping::kUnobserved;
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = static_cast<std::size_t>(trial % 37);
      auto a = random_vec(rng, n);
      auto b = random_vec(rng, n);
      for (std::size_t i = 0; i < n; i += 3) a[i] = u;

      auto x = a;
      auto y = a;
      s.max_into(x.data(), b.data(), n);
      avx->max_into(y.data(), b.data(), n);
      CHECK(x == y);

      for (auto mode : {MergeMode::Max, MergeMode::Average, MergeMode::Replacement}) {
        x = a;
        y = a;
        s.merge(x.data(), b.data(), n, mode, u);
        avx->merge(y.data(), b.data(), n, mode, u);
        CHECK(x == y);
      }

      x = b;
      y = b;
      s.add_scalar(x.data(), n, 0.37);
      avx->add_scalar(y.data(), n, 0.37);
      CHECK(x == y);
      s.max_scalar(x.data(), n, 0.2);
      avx->max_scalar(y.data(), n, 0.2);
      CHECK(x == y);
      s.scale(x.data(), n, 1.0 / 3.0);
      avx->scale(y.data(), n, 1.0 / 3.0);
      CHECK(x == y);

      const double ds = s.dot(b.data(), b.data(), n);
      const double dv = avx->dot(b.data(), b.data(), n);
      CHECK(std::abs(ds - dv) <= 1e-12 * std::max(1.0, std::abs(ds)));
    }
  }

  TEST_CASE("force_isa switches the active table") {
    const Isa before = active_isa();
    CHECK(force_isa(Isa::Scalar));
    CHECK(active_isa() == Isa::Scalar);
    CHECK(&active() == &scalar_table());
    if (isa_available(Isa::Avx2)) {
      CHECK(force_isa(Isa::Avx2));
      CHECK(active_isa() == Isa::Avx2);
    } else {
      CHECK_FALSE(force_isa(Isa::Avx2));
      CHECK(active_isa() == Isa::Scalar);
    }
    force_isa(before);
  }
}
