#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "alprs/image.hpp"
#include "alprs/locator.hpp"

namespace fixtures {

// Eleven template/image keypoint pairs for digit '3'.
// Orientations in radians.
inline std::vector<alprs::MatchPair> digit3_pairs() {
  struct Row {
    int t;
    double tx, ty, tt;
    int i;
    double ix, iy, it;
  };
  const Row rows[] = {
      {1, 15, 5, -1.6244128, 1, 395, 108, -1.7278086},
      {2, 16, 9, 2.3460571, 2, 396, 112, 2.3459965},
      {3, 16, 14, -2.3614827, 3, 379, 24, 1.2154149},
      {4, 20, 3, 1.0139291, 4, 399, 106, 1.1906057},
      {4, 20, 3, 1.0139291, 5, 425, 105, 1.3271831},
      {5, 23, 10, 0.6453162, 6, 403, 113, 0.6453041},
      {6, 23, 10, -0.5482631, 7, 403, 113, -0.5482711},
      {6, 23, 10, -0.5482631, 8, 486, 114, -0.4185706},
      {7, 25, 15, -0.3427376, 9, 89, 217, -1.7855562},
      {7, 25, 15, -0.3427376, 10, 205, 159, -1.7662604},
      {7, 25, 15, -0.3427376, 11, 405, 118, -0.3422799},
  };
  std::vector<alprs::MatchPair> out;
  for (const Row& r : rows) {
    alprs::MatchPair p;
    p.template_char = '3';
    p.template_xy = {r.tx, r.ty};
    p.template_theta = r.tt;
    p.image_xy = {r.ix, r.iy};
    p.image_theta = r.it;
    p.template_index = static_cast<std::size_t>(r.t);
    p.image_index = static_cast<std::size_t>(r.i);
    out.push_back(p);
  }
  return out;
}

inline std::vector<std::pair<int, int>> id_pairs(const std::vector<alprs::MatchPair>& pairs) {
  std::vector<std::pair<int, int>> out;
  for (const auto& p : pairs) out.emplace_back(static_cast<int>(p.template_index), static_cast<int>(p.image_index));
  return out;
}

// Four 4x3 glyphs: two of class 'A', two of class 'C'. Between path positions 2 and 3
// the 'A' pair shows 01 and 11, the 'C' pair only 10. The 'A' samples differ in three
// isolated pixels (six transitions), the 'C' samples in a run of four (five transitions).
inline alprs::BinaryImage grid_image(const std::vector<std::string>& rows) {
  alprs::BinaryImage img(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) img.at(x, y) = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '1';
  }
  return img;
}

inline alprs::BinaryImage glyph_a1() { return grid_image({"1001", "1101", "0101"}); }
inline alprs::BinaryImage glyph_a2() { return grid_image({"1011", "1001", "0001"}); }
inline alprs::BinaryImage glyph_c1() { return grid_image({"0110", "0011", "1110"}); }
inline alprs::BinaryImage glyph_c2() { return grid_image({"0110", "1111", "0010"}); }

inline alprs::GrayImage random_image(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  alprs::GrayImage img(w, h);
  for (double& v : img.data()) v = u(rng);
  return img;
}

// Smooth random texture: a sum of Gaussian blobs on a mid-grey field.
inline alprs::GrayImage blob_texture(int w, int h, int blobs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h), us(1.5, 4.0), ua(0.2, 0.45);
  std::bernoulli_distribution sign(0.5);
  alprs::GrayImage img(w, h, 0.5);
  for (int b = 0; b < blobs; ++b) {
    const double cx = ux(rng), cy = uy(rng), s = us(rng), a = sign(rng) ? ua(rng) : -ua(rng);
    const int r = static_cast<int>(3 * s) + 1;
    for (int y = std::max(0, static_cast<int>(cy) - r); y < std::min(h, static_cast<int>(cy) + r + 1); ++y) {
      for (int x = std::max(0, static_cast<int>(cx) - r); x < std::min(w, static_cast<int>(cx) + r + 1); ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        img.at(x, y) += a * std::exp(-d2 / (2 * s * s));
      }
    }
  }
  for (double& v : img.data()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

// Integer shift with edge replication: out(x, y) = in(x - dx, y - dy).
inline alprs::GrayImage shifted(const alprs::GrayImage& in, int dx, int dy) {
  alprs::GrayImage out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) out.at(x, y) = in.clamped(x - dx, y - dy);
  }
  return out;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path = std::filesystem::temp_directory_path() / ("alprs_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace fixtures
