#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ganav/image.hpp"

namespace ganav::codec {

using Bytes = std::vector<std::uint8_t>;

Bytes encode_png_rgb(const RgbView& image);
// 16-bit samples are written big-endian, as PNG requires.
Bytes encode_png_gray16(std::span<const std::uint16_t> samples, int rows, int cols);

struct PngHeader {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int color_type = 0;
};
// Reads only the IHDR chunk. Throws ParseError.
PngHeader read_png_header(std::span<const std::uint8_t> png);

std::string base64_encode(std::span<const std::uint8_t> bytes);
Bytes base64_decode(std::string_view text);

}  // namespace ganav::codec
