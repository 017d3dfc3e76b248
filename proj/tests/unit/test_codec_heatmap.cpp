#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <zlib.h>

#include "ganav/codec.hpp"
#include "ganav/gamap.hpp"
#include "ganav/heatmap.hpp"

using namespace ganav;

namespace {

std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

// Minimal independent PNG reader: checks chunk CRCs, inflates IDAT and
// strips filter-0 bytes.
std::vector<std::uint8_t> png_pixels(const codec::Bytes& png, int row_bytes, int rows) {
  REQUIRE(png.size() > 8);
  const std::uint8_t magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  CHECK(std::equal(magic, magic + 8, png.begin()));
  std::vector<std::uint8_t> idat;
  std::size_t at = 8;
  bool saw_end = false;
  while (at + 12 <= png.size()) {
    const std::uint32_t len = be32(&png[at]);
    const std::string type(png.begin() + at + 4, png.begin() + at + 8);
    const std::uint32_t crc = be32(&png[at + 8 + len]);
    CHECK(crc == crc32(0, &png[at + 4], 4 + len));
    if (type == "IDAT") idat.insert(idat.end(), png.begin() + at + 8, png.begin() + at + 8 + len);
    if (type == "IEND") saw_end = true;
    at += 12 + len;
  }
  CHECK(saw_end);
  std::vector<std::uint8_t> raw(static_cast<std::size_t>((row_bytes + 1) * rows));
  uLongf n = raw.size();
  REQUIRE(uncompress(raw.data(), &n, idat.data(), idat.size()) == Z_OK);
  REQUIRE(n == raw.size());
  std::vector<std::uint8_t> out;
  for (int r = 0; r < rows; ++r) {
    CHECK(raw[r * (row_bytes + 1)] == 0);
    out.insert(out.end(), raw.begin() + r * (row_bytes + 1) + 1, raw.begin() + (r + 1) * (row_bytes + 1));
  }
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ganav_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("codec") {
  TEST_CASE("rgb png round trip through zlib") {
    std::mt19937 rng(5);
    RgbImage im(7, 5);
    for (auto& p : im.pixels()) p = Rgb{static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
                                        static_cast<std::uint8_t>(rng())};
    const auto png = codec::encode_png_rgb(im.view());
    const auto h = codec::read_png_header(png);
    CHECK(h.width == 5);
    CHECK(h.height == 7);
    CHECK(h.bit_depth == 8);
    CHECK(h.color_type == 2);
    const auto px = png_pixels(png, 5 * 3, 7);
    for (int r = 0; r < 7; ++r) {
      for (int c = 0; c < 5; ++c) {
        const auto* p = &px[(r * 5 + c) * 3];
        CHECK(Rgb{p[0], p[1], p[2]} == im(r, c));
      }
    }
  }

  TEST_CASE("gray16 png is big-endian") {
    const std::vector<std::uint16_t> s{0x0102, 0xA0B0, 0, 65535, 7, 300};
    const auto png = codec::encode_png_gray16(s, 2, 3);
    const auto h = codec::read_png_header(png);
    CHECK(h.bit_depth == 16);
    CHECK(h.color_type == 0);
    const auto px = png_pixels(png, 6, 2);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(((px[2 * i] << 8) | px[2 * i + 1]) == s[i]);
    CHECK_THROWS_AS(codec::encode_png_gray16(s, 4, 4), Error);
  }

  TEST_CASE("png header rejects garbage") {
    const codec::Bytes junk{1, 2, 3};
    CHECK_THROWS_AS(codec::read_png_header(junk), Error);
  }

  TEST_CASE("base64") {
    auto enc = [](std::string_view s) {
      return codec::base64_encode({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
    };
    CHECK(enc("") == "");
    CHECK(enc("f") == "Zg==");
    CHECK(enc("fo") == "Zm8=");
    CHECK(enc("foo") == "Zm9v");
    CHECK(enc("foobar") == "Zm9vYmFy");
    std::mt19937 rng(9);
    for (int n = 0; n < 64; ++n) {
      codec::Bytes b(static_cast<std::size_t>(n));
      for (auto& x : b) x = static_cast<std::uint8_t>(rng());
      CHECK(codec::base64_decode(codec::base64_encode(b)) == b);
    }
    CHECK_THROWS_AS(codec::base64_decode("Zm9v!"), Error);
  }
}

TEST_SUITE("heatmap") {
  TEST_CASE("score encoding") {
    CHECK(heatmap::encode_score(mapping::kUnobserved) == 0);
    CHECK(heatmap::encode_score(-1.0) == 1);
    CHECK(heatmap::encode_score(1.0) == 65535);
    CHECK(heatmap::encode_score(5.0) == 65535);
    // One quantisation step: sample 0 is taken, so -1 rounds up to 1.
    for (double s = -1.0; s <= 1.0; s += 0.01) {
      CHECK(std::abs(heatmap::decode_score(heatmap::encode_score(s)) - s) <= 2.0 / 65535.0 + 1e-12);
    }
  }

  TEST_CASE("pgm16 round trip and header") {
    const auto dir = scratch("pgm");
    heatmap::Grid16 g{3, 4, {}};
    for (int i = 0; i < 12; ++i) g.samples.push_back(static_cast<std::uint16_t>(i * 5000 + 1));
    heatmap::write_pgm16(dir / "a.pgm", g);
    const auto back = heatmap::read_pgm16(dir / "a.pgm");
    CHECK(back.rows == 3);
    CHECK(back.cols == 4);
    CHECK(back.samples == g.samples);
    std::ifstream in(dir / "a.pgm", std::ios::binary);
    std::string magic;
    int w = 0, h = 0, maxv = 0;
    in >> magic >> w >> h >> maxv;
    CHECK(magic == "P5");
    CHECK(w == 4);
    CHECK(h == 3);
    CHECK(maxv == 65535);
    in.get();
    CHECK(in.get() == 0);
    CHECK(in.get() == 1);
    CHECK_THROWS_AS(heatmap::read_pgm16(dir / "missing.pgm"), Error);
  }

  TEST_CASE("export, sidecar and render") {
    const auto dir = scratch("export");
    mapping::GaMap map(geometry::GridSpec{0.1, 4, 5, 1.0, 2.0}, {"seat", "leg"});
    const geometry::CellIndex c{1, 3};
    map.scores(c)[0] = 0.5;
    map.scores(c)[1] = -0.25;
    const auto side = heatmap::export_heatmaps(map, dir, "m", 12);
    const auto s = heatmap::read_sidecar(side);
    CHECK(s.step == 12);
    CHECK(s.channels == std::vector<std::string>{"seat", "leg"});
    CHECK(s.spec.rows == 4);
    CHECK(s.spec.cols == 5);
    CHECK(s.spec.resolution == 0.1);
    CHECK(s.files.size() == 3);
    const auto mean = heatmap::read_pgm16(dir / std::find_if(s.files.begin(), s.files.end(), [](const auto& f) {
                                                  return f.first == "mean";
                                                })->second);
    CHECK(mean.samples[1 * 5 + 3] == heatmap::encode_score(0.125));
    CHECK(mean.samples[0] == 0);
    heatmap::render_png(side, "seat", dir / "seat.png");
    const auto h = codec::read_png_header([&] {
      std::ifstream in(dir / "seat.png", std::ios::binary);
      return codec::Bytes(std::istreambuf_iterator<char>(in), {});
    }());
    CHECK(h.width == 5);
    CHECK(h.height == 4);
    CHECK_THROWS_AS(heatmap::render_png(side, "nope", dir / "x.png"), Error);
  }
}
