#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ganav/pyramid.hpp"
#include "ganav/synthetic_provider.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ganav;
using namespace ganav::scoring;

namespace {

// Whole-image patches embed at cosine 0.2 with the text axis, anything
// smaller at 0.6.
class TwoLevelStub final : public EmbeddingProvider {
 public:
  explicit TwoLevelStub(int full) : full_(full) {}
  std::size_t dimension() override { return 2; }
  std::vector<Embedding> embed_images(std::span<const RgbView> patches) override {
    std::vector<Embedding> out;
    for (const auto& p : patches) {
      const double s = p.rows() == full_ ? 0.2 : 0.6;
      out.push_back({s, std::sqrt(1.0 - s * s)});
    }
    return out;
  }
  std::vector<Embedding> embed_texts(std::span<const std::string> texts) override {
    return std::vector<Embedding>(texts.size(), Embedding{1.0, 0.0});
  }

 private:
  int full_;
};

class Failing final : public EmbeddingProvider {
 public:
  std::size_t dimension() override { return 2; }
  std::vector<Embedding> embed_images(std::span<const RgbView>) override {
    fail(Errc::RemoteUnavailable, "down");
  }
  std::vector<Embedding> embed_texts(std::span<const std::string> t) override {
    return std::vector<Embedding>(t.size(), Embedding{1.0, 0.0});
  }
};

attributes::AttributeEmbeddings text_of(EmbeddingProvider& p, std::vector<std::string> names) {
  attributes::AttributeEmbeddings a;
  a.vectors = p.embed_texts(names);
  a.names = std::move(names);
  return a;
}

}  // namespace

TEST_SUITE("pyramid") {
  TEST_CASE("partition counts and tiling") {
    const RgbImage img(64, 64);
    const auto one = partition(img, 1);
    REQUIRE(one.patches.size() == 1);
    CHECK(one.patches[0].rows == 64);
    const auto three = partition(img, 3);
    CHECK(three.patches.size() == 1 + 4 + 16);
    for (std::size_t i = three.level_offset(3); i < three.patches.size(); ++i) {
      CHECK(three.patches[i].rows == 16);
      CHECK(three.patches[i].cols == 16);
    }
    // Each level covers every pixel exactly once.
    for (int k = 1; k <= 3; ++k) {
      Image<int> cover(64, 64, 0);
      for (std::size_t i = three.level_offset(k); i < three.level_offset(k) + three.count(k); ++i) {
        const auto& r = three.patches[i];
        CHECK(r.level == k);
        for (int p = r.row0; p < r.row0 + r.rows; ++p) {
          for (int q = r.col0; q < r.col0 + r.cols; ++q) ++cover(p, q);
        }
      }
      for (int v : cover.pixels()) CHECK(v == 1);
    }
    try {
      partition(RgbImage(63, 63), 3);
      FAIL("expected IndivisibleImage");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::IndivisibleImage);
    }
    CHECK_THROWS_AS(partition(img, 5), Error);
    CHECK(partition(img, 2, 8).resized.size() == 5);
    CHECK(partition(img, 2, 8).resized[0].rows() == 8);
  }

  TEST_CASE("patch_index") {
    CHECK(patch_index(40, 20, 3, 64, 64) == std::pair{3, 2});
    CHECK(patch_index(63, 63, 1, 64, 64) == std::pair{1, 1});
    for (int k = 1; k <= 4; ++k) CHECK(patch_index(0, 0, k, 64, 64) == std::pair{1, 1});
    CHECK(patch_index(63, 63, 4, 64, 64) == std::pair{8, 8});
    try {
      patch_index(64, 0, 2, 64, 64);
      FAIL("expected OutOfBounds");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::OutOfBounds);
    }
  }

  TEST_CASE("similarity") {
    const std::vector<double> a{1.0, 2.0, 2.0};
    const std::vector<double> b{2.0, 1.0, 2.0};
    CHECK(similarity(a, a) == doctest::Approx(1.0));
    CHECK(similarity(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 3.0}) == 0.0);
    CHECK(similarity(a, b) == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
    try {
      similarity(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.0});
      FAIL("expected ZeroVector");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ZeroVector);
    }
    CHECK_THROWS_AS(similarity(std::vector<double>{1.0}, std::vector<double>{1.0, 0.0}), Error);
  }

  TEST_CASE("oracle: similarity equals hand cosine on random vectors") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    for (int i = 0; i < 500; ++i) {
      std::vector<double> a(1 + i % 40);
      std::vector<double> b(a.size());
      for (auto& x : a) x = g(rng);
      for (auto& x : b) x = g(rng);
      CHECK(oracle::close(similarity(a, b), oracle::cosine(a, b)));
    }
  }

  TEST_CASE("single level broadcasts the whole-image score") {
    std::mt19937_64 rng(1);
    testing::MeanColourProvider provider;
    const auto img = testing::random_image(rng, 32, 32);
    const auto attrs = text_of(provider, {"a", "b"});
    const auto s = score_observation(img, attrs, provider, {.levels = 1});
    for (std::size_t e = 0; e < 2; ++e) {
      for (double v : s.plane(e)) CHECK(v == s(0, 0, e));
    }
  }

  TEST_CASE("identical patch embeddings give a constant image") {
    RgbImage img(32, 32, Rgb{10, 200, 30});
    testing::MeanColourProvider provider;
    const auto attrs = text_of(provider, {"x"});
    const auto s = score_observation(img, attrs, provider, {.levels = 3});
    for (double v : s.plane(0)) CHECK(v == doctest::Approx(s(0, 0, 0)).epsilon(1e-15));
  }

  TEST_CASE("two-level hand computation") {
    TwoLevelStub provider(32);
    const auto attrs = text_of(provider, {"e"});
    const auto s = score_observation(RgbImage(32, 32), attrs, provider, {.levels = 2});
    for (double v : s.plane(0)) CHECK(v == doctest::Approx(0.4).epsilon(1e-12));
    const auto m = score_observation(RgbImage(32, 32), attrs, provider, {.levels = 2, .aggregation = LevelAggregation::Max});
    for (double v : m.plane(0)) CHECK(v == doctest::Approx(0.6).epsilon(1e-12));
  }

  TEST_CASE("provider failures name the patch") {
    Failing provider;
    const auto attrs = text_of(provider, {"e"});
    try {
      score_observation(RgbImage(16, 16), attrs, provider, {.levels = 2});
      FAIL("expected ProviderFailure");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ProviderFailure);
      CHECK(std::string(e.what()).find("level 1 patch (1, 1)") != std::string::npos);
    }
  }

  TEST_CASE("oracle: score_observation equals the per-pixel loop") {
    std::mt19937_64 rng(23);
    int instances = 0;
    for (int trial = 0; trial < 60; ++trial) {
      for (int levels = 1; levels <= 3; ++levels) {
        const int base = 1 << (levels - 1);
        const int rows = base * static_cast<int>(1 + rng() % (32 / base));
        const int cols = base * static_cast<int>(1 + rng() % (32 / base));
        const auto img = testing::random_image(rng, rows, cols);
        testing::MeanColourProvider provider;
        const auto attrs = text_of(provider, {"p" + std::to_string(trial), "q", "r"});
        const auto got = score_observation(img, attrs, provider, {.levels = levels});
        const auto want = oracle::score_per_pixel(img, attrs.vectors, provider, levels);
        for (std::size_t e = 0; e < 3; ++e) {
          for (int p = 0; p < rows; ++p) {
            for (int q = 0; q < cols; ++q) REQUIRE(oracle::close(got(p, q, e), want(p, q, e)));
          }
        }
        ++instances;
      }
    }
    CHECK(instances >= 180);
  }

  TEST_CASE("property: range, pixel constancy and level order") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
      const auto img = testing::random_image(rng, 32, 32);
      testing::MeanColourProvider provider;
      const auto attrs = text_of(provider, {"u", "v"});
      const auto s = score_observation(img, attrs, provider, {.levels = 3});
      for (double v : s.values()) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
      }
      // Pixels sharing a finest patch share every coarser one too.
      for (int p = 0; p < 32; ++p) {
        for (int q = 0; q < 32; ++q) {
          for (std::size_t e = 0; e < 2; ++e) CHECK(s(p, q, e) == s(p / 8 * 8, q / 8 * 8, e));
        }
      }
      for (const std::vector<int>& order : {std::vector<int>{3, 2, 1}, {2, 3, 1}, {1, 3, 2}}) {
        const auto other = score_observation(img, attrs, provider, {.levels = 3, .level_order = order});
        CHECK(other == s);
      }
      CHECK_THROWS_AS(score_observation(img, attrs, provider, {.levels = 3, .level_order = {1, 1, 2}}), Error);
    }
  }

  TEST_CASE("property: batch size does not change scores") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
      const auto img = testing::random_image(rng, 64, 64);
      testing::MeanColourProvider provider;
      const auto attrs = text_of(provider, {"u", "v", "w"});
      const auto batched = score_observation(img, attrs, provider, {.levels = 4, .batch_size = 64});
      testing::MeanColourProvider single;
      const auto one = score_observation(img, attrs, single, {.levels = 4, .batch_size = 1});
      CHECK(one == batched);
      CHECK(single.calls == 1 + 4 + 16 + 64);
    }
  }

  TEST_CASE("synthetic provider planted structure") {
    const Rgb red{200, 0, 0};
    const Rgb blue{0, 0, 200};
    sim::SyntheticProvider provider({"e1", "e2"}, {{red, {1.0, 0.0}}, {blue, {0.0, 1.0}}});
    const auto text = provider.embed_texts(std::vector<std::string>{"e1", "e2", "other"});
    CHECK(text[0] == Embedding{1.0, 0.0, 0.0});
    CHECK(text[2] == Embedding{0.0, 0.0, 1.0});

    const RgbImage full(8, 8, red);
    const auto v = provider.embed_images(std::vector<RgbView>{full.view()});
    CHECK(similarity(v[0], text[0]) == doctest::Approx(1.0));

    const RgbImage blank(8, 8, Rgb{1, 2, 3});
    const auto b = provider.embed_images(std::vector<RgbView>{blank.view()});
    CHECK(similarity(b[0], text[0]) == 0.0);
    CHECK(similarity(b[0], text[1]) == 0.0);

    RgbImage half(8, 8, red);
    for (int r = 0; r < 8; ++r) {
      for (int c = 4; c < 8; ++c) half(r, c) = blue;
    }
    const auto h = provider.embed_images(std::vector<RgbView>{half.view()});
    CHECK(similarity(h[0], text[0]) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("property: synthetic embedding is deterministic and monotone in salient area") {
    const Rgb red{200, 0, 0};
    sim::SyntheticProvider provider({"e1"}, {{red, {0.8}}});
    const auto text = provider.embed_texts(std::vector<std::string>{"e1"});
    double last = -1.0;
    for (int n = 0; n <= 64; ++n) {
      RgbImage img(8, 8, Rgb{90, 90, 90});
      for (int i = 0; i < n; ++i) img(i / 8, i % 8) = red;
      const auto a = provider.embed_images(std::vector<RgbView>{img.view()});
      const auto b = provider.embed_images(std::vector<RgbView>{img.view()});
      CHECK(a == b);
      const double s = similarity(a[0], text[0]);
      CHECK(s > last);
      last = s;
    }
  }
}
