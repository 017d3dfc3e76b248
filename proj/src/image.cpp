#include "ganav/image.hpp"

#include <algorithm>
#include <cmath>

namespace ganav {

RgbImage resize_bilinear(const RgbView& src, int rows, int cols) {
  if (rows <= 0 || cols <= 0) fail(Errc::InvalidArgument, "resize target must be positive");
  if (src.rows() <= 0 || src.cols() <= 0) fail(Errc::InvalidArgument, "resize source is empty");

  RgbImage out(rows, cols);
  const double sy = static_cast<double>(src.rows()) / rows;
  const double sx = static_cast<double>(src.cols()) / cols;
  for (int r = 0; r < rows; ++r) {
    const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, static_cast<double>(src.rows() - 1));
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, src.rows() - 1);
    const double wy = fy - y0;
    for (int c = 0; c < cols; ++c) {
      const double fx = std::clamp((c + 0.5) * sx - 0.5, 0.0, static_cast<double>(src.cols() - 1));
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, src.cols() - 1);
      const double wx = fx - x0;
      auto lerp = [&](auto channel) {
        const double top = channel(src(y0, x0)) * (1.0 - wx) + channel(src(y0, x1)) * wx;
        const double bottom = channel(src(y1, x0)) * (1.0 - wx) + channel(src(y1, x1)) * wx;
        const double v = top * (1.0 - wy) + bottom * wy;
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      };
      out(r, c) = Rgb{lerp([](const Rgb& p) { return static_cast<double>(p.r); }),
                      lerp([](const Rgb& p) { return static_cast<double>(p.g); }),
                      lerp([](const Rgb& p) { return static_cast<double>(p.b); })};
    }
  }
  return out;
}

RgbImage copy_view(const RgbView& src) {
  RgbImage out(src.rows(), src.cols());
  for (int r = 0; r < src.rows(); ++r) {
    for (int c = 0; c < src.cols(); ++c) out(r, c) = src(r, c);
  }
  return out;
}

CropWindow centered_divisible_window(int rows, int cols, int divisor) {
  if (divisor <= 0) fail(Errc::InvalidArgument, "divisor must be positive");
  const int fit_rows = rows - rows % divisor;
  const int fit_cols = cols - cols % divisor;
  if (fit_rows <= 0 || fit_cols <= 0) {
    fail(Errc::IndivisibleImage, "image smaller than one finest-level patch");
  }
  return CropWindow{(rows - fit_rows) / 2, (cols - fit_cols) / 2, fit_rows, fit_cols};
}

}  // namespace ganav
