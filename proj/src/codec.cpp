#include "ganav/codec.hpp"

#include <array>
#include <cstring>

#include <zlib.h>

namespace ganav::codec {
namespace {

constexpr std::array<std::uint8_t, 8> kPngSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

void put_u32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  return (std::uint32_t{in[at]} << 24) | (std::uint32_t{in[at + 1]} << 16) | (std::uint32_t{in[at + 2]} << 8) |
         std::uint32_t{in[at + 3]};
}

void put_chunk(Bytes& out, const char (&type)[5], const Bytes& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + type_at, static_cast<uInt>(4 + data.size()));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

// `raw` holds scanlines already prefixed with filter byte 0.
Bytes assemble_png(int width, int height, int bit_depth, int color_type, const Bytes& raw) {
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  Bytes packed(packed_size);
  if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), Z_BEST_SPEED) != Z_OK) {
    fail(Errc::IoError, "zlib compression failed");
  }
  packed.resize(packed_size);

  Bytes out(kPngSignature.begin(), kPngSignature.end());
  Bytes ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(width));
  put_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(static_cast<std::uint8_t>(bit_depth));
  ihdr.push_back(static_cast<std::uint8_t>(color_type));
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", packed);
  put_chunk(out, "IEND", {});
  return out;
}

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

Bytes encode_png_rgb(const RgbView& image) {
  if (image.rows() <= 0 || image.cols() <= 0) fail(Errc::InvalidArgument, "cannot encode an empty image");
  Bytes raw;
  raw.reserve(static_cast<std::size_t>(image.rows()) * (1 + 3 * image.cols()));
  for (int r = 0; r < image.rows(); ++r) {
    raw.push_back(0);
    for (const Rgb& px : image.row(r)) {
      raw.push_back(px.r);
      raw.push_back(px.g);
      raw.push_back(px.b);
    }
  }
  return assemble_png(image.cols(), image.rows(), 8, 2, raw);
}

Bytes encode_png_gray16(std::span<const std::uint16_t> samples, int rows, int cols) {
  if (rows <= 0 || cols <= 0 || samples.size() != static_cast<std::size_t>(rows) * cols) {
    fail(Errc::InvalidArgument, "gray16 sample count does not match dimensions");
  }
  Bytes raw;
  raw.reserve(static_cast<std::size_t>(rows) * (1 + 2 * cols));
  for (int r = 0; r < rows; ++r) {
    raw.push_back(0);
    for (int c = 0; c < cols; ++c) {
      const std::uint16_t v = samples[static_cast<std::size_t>(r) * cols + c];
      raw.push_back(static_cast<std::uint8_t>(v >> 8));
      raw.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
  }
  return assemble_png(cols, rows, 16, 0, raw);
}

PngHeader read_png_header(std::span<const std::uint8_t> png) {
  if (png.size() < 33 || std::memcmp(png.data(), kPngSignature.data(), kPngSignature.size()) != 0) {
    fail(Errc::ParseError, "not a PNG stream");
  }
  if (std::memcmp(png.data() + 12, "IHDR", 4) != 0) fail(Errc::ParseError, "PNG does not start with IHDR");
  return PngHeader{static_cast<int>(get_u32(png, 16)), static_cast<int>(get_u32(png, 20)), png[24], png[25]};
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t n = (std::uint32_t{bytes[i]} << 16) | (std::uint32_t{bytes[i + 1]} << 8) | bytes[i + 2];
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t n = std::uint32_t{bytes[i]} << 16;
    if (rest == 2) n |= std::uint32_t{bytes[i + 1]} << 8;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += rest == 2 ? kAlphabet[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

Bytes base64_decode(std::string_view text) {
  std::array<int, 256> lookup{};
  lookup.fill(-1);
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) lookup[static_cast<unsigned char>(kAlphabet[i])] = static_cast<int>(i);

  Bytes out;
  std::uint32_t buffer = 0;
  int bits = 0;
  for (char ch : text) {
    if (ch == '=') break;
    if (ch == '\n' || ch == '\r') continue;
    const int v = lookup[static_cast<unsigned char>(ch)];
    if (v < 0) fail(Errc::ParseError, "invalid base64 character");
    buffer = (buffer << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((buffer >> bits) & 0xFF));
    }
  }
  return out;
}

}  // namespace ganav::codec
