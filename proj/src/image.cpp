#include "alprs/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "alprs/error.hpp"

namespace alprs {

Box intersect(const Box& a, const Box& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.right(), b.right());
  const int y1 = std::min(a.bottom(), b.bottom());
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
  }
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
  }
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::kDimensionMismatch, "pixel count does not match width x height");
  }
}

double GrayImage::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return data_[index(x, y)];
}

double GrayImage::bilinear(double x, double y) const {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double ax = x - fx;
  const double ay = y - fy;
  const double top = (1.0 - ax) * clamped(x0, y0) + ax * clamped(x0 + 1, y0);
  const double bottom = (1.0 - ax) * clamped(x0, y0 + 1) + ax * clamped(x0 + 1, y0 + 1);
  return (1.0 - ay) * top + ay * bottom;
}

GrayImage GrayImage::crop(int x, int y, int w, int h) const {
  if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > width_ || y + h > height_) {
    throw Error(ErrorCode::kInvalidArgument, "crop rectangle outside image");
  }
  GrayImage out(w, h);
  for (int r = 0; r < h; ++r) {
    const auto* src = &data_[index(x, y + r)];
    std::copy(src, src + w, &out.at(0, r));
  }
  return out;
}

BinaryImage::BinaryImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
  }
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

std::size_t BinaryImage::count_foreground() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  // The 1/(2 pi sigma^2) prefactor cancels in the renormalization.
  for (int i = -radius; i <= radius; ++i) {
    k[static_cast<std::size_t>(i + radius)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  }
  const double sum = std::accumulate(k.begin(), k.end(), 0.0);
  for (auto& v : k) v /= sum;
  return k;
}

}  // namespace

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gaussian_blur: sigma must be > 0");
  }
  const auto kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = img.width();
  const int h = img.height();

  GrayImage tmp(w, h);
  std::vector<double> row(static_cast<std::size_t>(w + 2 * radius));
  for (int y = 0; y < h; ++y) {
    for (int i = 0; i < w + 2 * radius; ++i) row[static_cast<std::size_t>(i)] = img.clamped(i - radius, y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      const double* src = &row[static_cast<std::size_t>(x)];
      for (std::size_t k = 0; k < kernel.size(); ++k) acc += kernel[k] * src[k];
      tmp.at(x, y) = acc;
    }
  }

  GrayImage out(w, h);
  std::vector<double> col(static_cast<std::size_t>(h + 2 * radius));
  for (int x = 0; x < w; ++x) {
    for (int i = 0; i < h + 2 * radius; ++i) col[static_cast<std::size_t>(i)] = tmp.clamped(x, i - radius);
    for (int y = 0; y < h; ++y) {
      double acc = 0.0;
      const double* src = &col[static_cast<std::size_t>(y)];
      for (std::size_t k = 0; k < kernel.size(); ++k) acc += kernel[k] * src[k];
      out.at(x, y) = std::clamp(acc, 0.0, 1.0);
    }
  }
  return out;
}

GrayImage downsample_half(const GrayImage& img) {
  if (img.width() < 2 || img.height() < 2) {
    throw Error(ErrorCode::kImageTooSmall, "downsample_half: image must be at least 2x2");
  }
  GrayImage out(img.width() / 2, img.height() / 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out.at(x, y) = img.at(2 * x, 2 * y);
  }
  return out;
}

SignedImage subtract(const GrayImage& a, const GrayImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "subtract: " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                    " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
  SignedImage out{a.width(), a.height(), std::vector<double>(a.data().size())};
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = a.data()[i] - b.data()[i];
  return out;
}

}  // namespace alprs
