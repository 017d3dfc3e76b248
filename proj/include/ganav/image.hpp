#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ganav/error.hpp"

namespace ganav {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  auto operator<=>(const Rgb&) const = default;
};

// Non-owning, row-strided window into an image.
template <typename T>
class ImageView {
 public:
  ImageView() = default;
  ImageView(const T* data, int rows, int cols, std::ptrdiff_t stride)
      : data_(data), rows_(rows), cols_(cols), stride_(stride) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::ptrdiff_t stride() const noexcept { return stride_; }

  const T& operator()(int r, int c) const noexcept { return data_[r * stride_ + c]; }
  std::span<const T> row(int r) const noexcept {
    return {data_ + r * stride_, static_cast<std::size_t>(cols_)};
  }

  ImageView sub(int row0, int col0, int rows, int cols) const {
    if (row0 < 0 || col0 < 0 || rows < 0 || cols < 0 || row0 + rows > rows_ ||
        col0 + cols > cols_) {
      fail(Errc::OutOfBounds, "sub-view exceeds parent image");
    }
    return ImageView(data_ + row0 * stride_ + col0, rows, cols, stride_);
  }

 private:
  const T* data_ = nullptr;
  int rows_ = 0;
  int cols_ = 0;
  std::ptrdiff_t stride_ = 0;
};

// Dense row-major image.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(checked_size(rows, cols), fill) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool in_bounds(int r, int c) const noexcept { return r >= 0 && c >= 0 && r < rows_ && c < cols_; }

  T& operator()(int r, int c) noexcept { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const noexcept {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  const T& at(int r, int c) const {
    if (!in_bounds(r, c)) fail(Errc::OutOfBounds, "pixel outside image");
    return (*this)(r, c);
  }
  T& at(int r, int c) {
    if (!in_bounds(r, c)) fail(Errc::OutOfBounds, "pixel outside image");
    return (*this)(r, c);
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  ImageView<T> view() const noexcept { return ImageView<T>(data_.data(), rows_, cols_, cols_); }

  bool operator==(const Image&) const = default;

 private:
  static std::size_t checked_size(int rows, int cols) {
    if (rows < 0 || cols < 0) fail(Errc::InvalidArgument, "negative image size");
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using RgbImage = Image<Rgb>;
using RgbView = ImageView<Rgb>;
// Depth along the camera optical axis, meters.
using DepthImage = Image<double>;

// Half-pixel-centre bilinear resampling with edge clamping.
RgbImage resize_bilinear(const RgbView& src, int rows, int cols);

RgbImage copy_view(const RgbView& src);

struct CropWindow {
  int row0 = 0;
  int col0 = 0;
  int rows = 0;
  int cols = 0;
};

// Largest centred window whose sides are divisible by `divisor`.
CropWindow centered_divisible_window(int rows, int cols, int divisor);

template <typename T>
Image<T> crop(const Image<T>& src, const CropWindow& w) {
  if (w.row0 < 0 || w.col0 < 0 || w.row0 + w.rows > src.rows() || w.col0 + w.cols > src.cols()) {
    fail(Errc::OutOfBounds, "crop window exceeds image");
  }
  Image<T> out(w.rows, w.cols);
  for (int r = 0; r < w.rows; ++r) {
    for (int c = 0; c < w.cols; ++c) out(r, c) = src(w.row0 + r, w.col0 + c);
  }
  return out;
}

}  // namespace ganav
