#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace alprs {

/// Axis-aligned pixel rectangle [x, x+width) x [y, y+height).
struct Box {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  int right() const noexcept { return x + width; }
  int bottom() const noexcept { return y + height; }
  bool empty() const noexcept { return width <= 0 || height <= 0; }

  friend bool operator==(const Box&, const Box&) = default;
};

/// Intersection of two boxes; empty when disjoint.
Box intersect(const Box& a, const Box& b);

/// Row-major raster of intensities in [0, 1].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int x, int y) { return data_[index(x, y)]; }
  double at(int x, int y) const { return data_[index(x, y)]; }

  /// Edge-clamped read; coordinates outside the raster take the nearest border pixel.
  double clamped(int x, int y) const;

  /// Bilinear sample at a real-valued position, edge-clamped.
  double bilinear(double x, double y) const;

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  /// Copy of the sub-rectangle [x, x+w) x [y, y+h); the rectangle must lie inside.
  GrayImage crop(int x, int y, int w, int h) const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Row-major {0,1} raster, 1 = character ink.
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height, std::uint8_t fill = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::uint8_t& at(int x, int y) { return data_[index(x, y)]; }
  std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }

  const std::vector<std::uint8_t>& data() const noexcept { return data_; }
  std::vector<std::uint8_t>& data() noexcept { return data_; }

  std::size_t count_foreground() const;

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Signed raster produced by differencing two gray images; values in [-1, 1].
struct SignedImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  double at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }
};

// Separable Gaussian, radius ceil(3 sigma), kernel renormalized to 1, clamped borders.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

// Keeps every second pixel starting at (0, 0).
GrayImage downsample_half(const GrayImage& img);

SignedImage subtract(const GrayImage& a, const GrayImage& b);

}  // namespace alprs
