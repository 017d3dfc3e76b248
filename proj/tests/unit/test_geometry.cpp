#include <doctest.h>

#include <cmath>
#include <random>

#include "ganav/geometry.hpp"

using namespace ganav;
using namespace ganav::geometry;

namespace {

CameraIntrinsics k100() { return CameraIntrinsics{100.0, 100.0, 32.0, 24.0, 64, 48}; }

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("back_project identity intrinsics") {
    const CameraIntrinsics k{1.0, 1.0, 0.0, 0.0, 1, 1};
    const DepthImage d(1, 1, 1.0);
    const auto p = back_project(k, d, 0, 0);
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
    CHECK(p.z == 1.0);
  }

  TEST_CASE("back_project at the principal point lies on the optical axis") {
    const DepthImage d(48, 64, 2.0);
    const auto p = back_project(k100(), d, 24, 32);
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
    CHECK(p.z == 2.0);
  }

  TEST_CASE("back_project matches hand matrix product") {
    const DepthImage d(48, 96, 2.0);
    const auto p = back_project(k100(), d, 24, 82);
    CHECK(p.x == doctest::Approx((82 - 32) / 100.0 * 2.0).epsilon(1e-12));
    CHECK(p.x == doctest::Approx(1.0));
    CHECK(p.y == 0.0);
    CHECK(p.z == 2.0);
    // Rows drive y.
    const auto below = back_project(k100(), d, 44, 32);
    CHECK(below.y == doctest::Approx(0.4));
  }

  TEST_CASE("back_project rejects bad depth and pixels") {
    DepthImage d(48, 64, 1.0);
    d(0, 0) = 0.0;
    d(0, 1) = -1.0;
    d(0, 2) = std::nan("");
    d(0, 3) = std::numeric_limits<double>::infinity();
    for (int q = 0; q < 4; ++q) {
      try {
        back_project(k100(), d, 0, q);
        FAIL("expected InvalidDepth");
      } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidDepth);
      }
    }
    try {
      back_project(k100(), d, 48, 0);
      FAIL("expected OutOfBounds");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::OutOfBounds);
    }
    CHECK_FALSE(try_back_project(k100(), d, 0, 0, 10.0));
    CHECK_FALSE(try_back_project(k100(), d, 5, 5, 1.0));  // at max_depth counts as no return
    CHECK(try_back_project(k100(), d, 5, 5, 1.5));
  }

  TEST_CASE("intrinsics validation") {
    CHECK_THROWS_AS(CameraIntrinsics({0.0, 1.0, 0.0, 0.0, 4, 4}).validate(), Error);
    CHECK_THROWS_AS(CameraIntrinsics({1.0, 1.0, 4.0, 0.0, 4, 4}).validate(), Error);
    CHECK_NOTHROW(CameraIntrinsics({1.0, 1.0, 3.9, 0.0, 4, 4}).validate());
    const auto k = CameraIntrinsics::from_hfov(64, 64, kPi / 2.0);
    CHECK(k.fx == doctest::Approx(32.0));
    CHECK(k.cx == 32.0);
  }

  TEST_CASE("to_world identity pose puts optical axis along +x") {
    const auto w = to_world(CameraPoint{1.0, 0.0, 2.0}, Pose{}, 0.0);
    CHECK(w.x == doctest::Approx(2.0));
    // Camera right is world -y at heading 0.
    CHECK(w.y == doctest::Approx(-1.0));
    CHECK(w.z == doctest::Approx(0.0));
  }

  TEST_CASE("to_world quarter turn rotates ground components") {
    const auto w = to_world(CameraPoint{1.0, 0.0, 2.0}, Pose{0.0, 0.0, kPi / 2.0}, 0.0);
    CHECK(w.x == doctest::Approx(1.0));
    CHECK(w.y == doctest::Approx(2.0));
  }

  TEST_CASE("to_world matches hand rigid transform") {
    const Pose pose{3.0, 4.0, kPi / 4.0};
    const auto w = to_world(CameraPoint{1.0, -0.5, 2.0}, pose, 1.2);
    // forward = 2, right = 1 in the body frame; body right is (sin t, -cos t).
    const double c = std::sqrt(0.5);
    CHECK(w.x == doctest::Approx(3.0 + 2.0 * c + 1.0 * c).epsilon(1e-12));
    CHECK(w.y == doctest::Approx(4.0 + 2.0 * c - 1.0 * c).epsilon(1e-12));
    CHECK(w.z == doctest::Approx(1.7));
  }

  TEST_CASE("world_to_cell floor arithmetic") {
    const GridSpec spec{0.05, 100, 100, 0.0, 0.0};
    CHECK(world_to_cell(0.0, 0.0, spec) == CellIndex{0, 0});
    // x = 0.26 -> col 5, y = 0.12 -> row 2.
    CHECK(world_to_cell(0.26, 0.12, spec) == CellIndex{2, 5});
    CHECK_FALSE(world_to_cell(5.0, 0.0, spec));
    CHECK_FALSE(world_to_cell(-0.001, 0.0, spec));
    CHECK(world_to_cell(4.999, 4.999, spec) == CellIndex{99, 99});
  }

  TEST_CASE("height bands") {
    CHECK(classify_height(0.0) == HeightClass::Floor);
    CHECK(classify_height(0.1999) == HeightClass::Floor);
    CHECK(classify_height(0.2) == HeightClass::Obstacle);
    CHECK(classify_height(1.5) == HeightClass::Obstacle);
    CHECK(classify_height(1.51) == HeightClass::Ignored);
  }

  TEST_CASE("normalize_angle wraps into [-pi, pi)") {
    CHECK(normalize_angle(kPi) == doctest::Approx(-kPi));
    CHECK(normalize_angle(-kPi) == doctest::Approx(-kPi));
    CHECK(normalize_angle(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
      const double t = normalize_angle(u(rng));
      CHECK(t >= -kPi);
      CHECK(t < kPi);
    }
  }

  TEST_CASE("property: back_project round trip returns the depth") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> depth(0.01, 9.9);
    DepthImage d(48, 64);
    for (auto& v : d.pixels()) v = depth(rng);
    for (int p = 0; p < 48; ++p) {
      for (int q = 0; q < 64; ++q) CHECK(back_project(k100(), d, p, q).z == d(p, q));
    }
  }

  TEST_CASE("property: world_to_cell is monotone in steps of one cell") {
    const GridSpec spec{0.05, 200, 200, -5.0, -5.0};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-4.5, 4.4);
    for (int i = 0; i < 500; ++i) {
      // Cell centres keep the floor away from boundaries.
      const auto base = world_to_cell(u(rng), u(rng), spec);
      REQUIRE(base);
      const double x = spec.center_x(*base);
      const double y = spec.center_y(*base);
      const auto right = world_to_cell(x + spec.resolution, y, spec);
      const auto up = world_to_cell(x, y + spec.resolution, spec);
      REQUIRE(right);
      REQUIRE(up);
      CHECK(right->col == base->col + 1);
      CHECK(right->row == base->row);
      CHECK(up->row == base->row + 1);
    }
  }

  TEST_CASE("property: to_world preserves distances") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 500; ++i) {
      const Pose pose{u(rng), u(rng), u(rng)};
      const CameraPoint a{u(rng), u(rng), u(rng)};
      const CameraPoint b{u(rng), u(rng), u(rng)};
      const auto wa = to_world(a, pose, 0.88);
      const auto wb = to_world(b, pose, 0.88);
      const double dc = std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
      const double dw = std::hypot(wa.x - wb.x, wa.y - wb.y, wa.z - wb.z);
      CHECK(std::abs(dc - dw) <= 1e-9 * dc);
    }
  }

  TEST_CASE("property: full-image projection equals per-pixel oracle") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> depth(0.2, 6.0);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    const GridSpec spec{0.05, 400, 400, -10.0, -10.0};
    for (int size : {8, 16, 32, 64}) {
      const auto k = CameraIntrinsics::from_hfov(size, size, 1.2);
      DepthImage d(size, size);
      for (auto& v : d.pixels()) v = depth(rng);
      const Pose pose{0.3, -0.7, angle(rng)};
      for (int p = 0; p < size; ++p) {
        for (int q = 0; q < size; ++q) {
          const auto cell = world_to_cell(to_world(back_project(k, d, p, q), pose, 0.88), spec);
          const double dd = d(p, q);
          const double right = (q - k.cx) / k.fx * dd;
          const double wx = pose.x + dd * std::cos(pose.theta) + right * std::sin(pose.theta);
          const double wy = pose.y + dd * std::sin(pose.theta) - right * std::cos(pose.theta);
          const int col = static_cast<int>(std::floor((wx + 10.0) / 0.05));
          const int row = static_cast<int>(std::floor((wy + 10.0) / 0.05));
          REQUIRE(cell);
          CHECK(*cell == CellIndex{row, col});
        }
      }
    }
  }
}
