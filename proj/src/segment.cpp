#include "alprs/segment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "alprs/error.hpp"

namespace alprs {
namespace {

using Wide = unsigned __int128;

// Above this pixel count the exact 128-bit comparison could overflow.
constexpr std::int64_t kExactPixelLimit = 500000;

int horizontal_overlap(const Box& a, const Box& b) {
  return std::max(0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
}

int vertical_overlap(const Box& a, const Box& b) {
  return std::max(0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
}

CharBox to_char_box(const Component& c, int source_width) {
  CharBox cb{c.bbox, BinaryImage(c.bbox.width, c.bbox.height)};
  for (int idx : c.pixels) {
    const int x = idx % source_width;
    const int y = idx / source_width;
    cb.image.at(x - c.bbox.x, y - c.bbox.y) = 1;
  }
  return cb;
}

}  // namespace

int histogram_bin(double v) {
  return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * (kHistogramBins - 1)));
}

OtsuResult otsu_threshold(const GrayImage& region) {
  std::array<std::int64_t, kHistogramBins> hist{};
  for (double v : region.data()) ++hist[static_cast<std::size_t>(histogram_bin(v))];
  const auto total = static_cast<std::int64_t>(region.data().size());
  std::int64_t total_sum = 0;
  std::int64_t occupied = 0;
  for (int b = 0; b < kHistogramBins; ++b) {
    total_sum += b * hist[static_cast<std::size_t>(b)];
    occupied += hist[static_cast<std::size_t>(b)] > 0 ? 1 : 0;
  }
  if (occupied < 2) throw Error(ErrorCode::kDegenerateHistogram, "otsu: degenerate histogram");

  // In bin units, sigma_B^2 = (n0 * S - N * s0)^2 / (N^2 * n0 * n1); the N^2 is common
  // to every cut, so candidates compare as a^2 / (n0 n1) without rounding.
  const bool exact = total <= kExactPixelLimit;
  int best_cut = -1;
  Wide best_num = 0;
  Wide best_den = 1;
  long double best_value = -1.0L;
  std::int64_t n0 = 0;
  std::int64_t s0 = 0;
  for (int t = 0; t < kHistogramBins - 1; ++t) {
    n0 += hist[static_cast<std::size_t>(t)];
    s0 += t * hist[static_cast<std::size_t>(t)];
    const std::int64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const std::int64_t a = n0 * total_sum - total * s0;
    const Wide a_abs = static_cast<Wide>(a < 0 ? -a : a);
    const Wide num = a_abs * a_abs;
    const Wide den = static_cast<Wide>(n0) * static_cast<Wide>(n1);
    if (exact) {
      if (best_cut < 0 || num * best_den > best_num * den) {
        best_cut = t;
        best_num = num;
        best_den = den;
      }
    } else {
      const long double value = static_cast<long double>(a) * static_cast<long double>(a) /
                                (static_cast<long double>(n0) * static_cast<long double>(n1));
      if (value > best_value) {
        best_cut = t;
        best_value = value;
      }
    }
  }

  OtsuResult r;
  r.cut = best_cut;
  r.threshold = (best_cut + 0.5) / (kHistogramBins - 1);

  const double scale = 1.0 / (kHistogramBins - 1);
  double c0 = 0.0, c1 = 0.0, m0 = 0.0, m1 = 0.0, mean = 0.0;
  for (int b = 0; b < kHistogramBins; ++b) {
    const double p = static_cast<double>(hist[static_cast<std::size_t>(b)]) / static_cast<double>(total);
    const double v = b * scale;
    mean += p * v;
    if (b <= best_cut) {
      c0 += p;
      m0 += p * v;
    } else {
      c1 += p;
      m1 += p * v;
    }
  }
  double var = 0.0;
  for (int b = 0; b < kHistogramBins; ++b) {
    const double p = static_cast<double>(hist[static_cast<std::size_t>(b)]) / static_cast<double>(total);
    const double d = b * scale - mean;
    var += p * d * d;
  }
  const double mu0 = m0 / c0;
  const double mu1 = m1 / c1;
  r.between_class_variance = c0 * c1 * (mu0 - mu1) * (mu0 - mu1);
  r.total_variance = var;
  // Guard against last-bit rounding when all variance is between classes.
  r.between_class_variance = std::min(r.between_class_variance, r.total_variance);
  return r;
}

BinaryImage binarize(const GrayImage& region, double t, Polarity polarity) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "binarize: t outside [0, 1]");
  if (polarity == Polarity::kAuto) {
    std::size_t dark = 0;
    for (double v : region.data()) dark += v < t ? 1 : 0;
    polarity = dark <= region.data().size() - dark ? Polarity::kDarkInk : Polarity::kLightInk;
  }
  BinaryImage out(region.width(), region.height());
  for (std::size_t i = 0; i < region.data().size(); ++i) {
    const bool below = region.data()[i] < t;
    out.data()[i] = (polarity == Polarity::kDarkInk) == below ? 1 : 0;
  }
  return out;
}

std::vector<Component> connected_components(const BinaryImage& bin) {
  const int w = bin.width();
  const int h = bin.height();
  std::vector<int> label(bin.data().size(), -1);
  std::vector<Component> out;
  std::vector<int> stack;
  for (int start = 0; start < w * h; ++start) {
    if (!bin.data()[static_cast<std::size_t>(start)] || label[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(out.size());
    Component comp;
    int x0 = w, y0 = h, x1 = -1, y1 = -1;
    stack.push_back(start);
    label[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      comp.pixels.push_back(idx);
      const int x = idx % w;
      const int y = idx / w;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const int n = ny * w + nx;
          if (bin.data()[static_cast<std::size_t>(n)] && label[static_cast<std::size_t>(n)] < 0) {
            label[static_cast<std::size_t>(n)] = id;
            stack.push_back(n);
          }
        }
      }
    }
    std::sort(comp.pixels.begin(), comp.pixels.end());
    comp.area = comp.pixels.size();
    comp.bbox = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<CharBox> clip_characters(const BinaryImage& bin, const Box& seed_box,
                                     const ClipConfig& cfg) {
  const auto components = connected_components(bin);

  const int grow_x = static_cast<int>(std::ceil(0.1 * seed_box.width));
  const int grow_y = static_cast<int>(std::ceil(0.1 * seed_box.height));
  const Box search{seed_box.x - grow_x, seed_box.y - grow_y, seed_box.width + 2 * grow_x,
                   seed_box.height + 2 * grow_y};
  int seed = -1;
  for (int i = 0; i < static_cast<int>(components.size()); ++i) {
    const Component& c = components[static_cast<std::size_t>(i)];
    if (intersect(c.bbox, search) != c.bbox) continue;
    if (seed < 0 || c.area > components[static_cast<std::size_t>(seed)].area) seed = i;
  }
  if (seed < 0) throw Error(ErrorCode::kSegmentationFailed, "segmentation failed: no glyph at the seed");
  const Box ref = components[static_cast<std::size_t>(seed)].bbox;

  std::vector<int> accepted;
  for (int i = 0; i < static_cast<int>(components.size()); ++i) {
    const Box& b = components[static_cast<std::size_t>(i)].bbox;
    if (i != seed) {
      if (b.height < cfg.min_height_ratio * ref.height || b.height > cfg.max_height_ratio * ref.height) continue;
      if (b.width < cfg.min_width_ratio * ref.width || b.width > cfg.max_width_ratio * ref.width) continue;
      if (vertical_overlap(b, ref) < cfg.min_row_overlap * b.height) continue;
    }
    accepted.push_back(i);
  }
  std::sort(accepted.begin(), accepted.end(), [&](int a, int b) {
    const Box& ba = components[static_cast<std::size_t>(a)].bbox;
    const Box& bb = components[static_cast<std::size_t>(b)].bbox;
    return ba.x < bb.x || (ba.x == bb.x && a < b);
  });

  // Resolve boxes that overlap horizontally by keeping the bigger one (the seed always wins).
  std::vector<int> kept;
  const double max_overlap = cfg.max_x_overlap_ratio * ref.width;
  for (int idx : accepted) {
    const Component& c = components[static_cast<std::size_t>(idx)];
    if (!kept.empty()) {
      const Component& prev = components[static_cast<std::size_t>(kept.back())];
      if (horizontal_overlap(prev.bbox, c.bbox) > max_overlap) {
        const bool replace = idx == seed || (kept.back() != seed && c.area > prev.area);
        if (replace) kept.back() = idx;
        continue;
      }
    }
    kept.push_back(idx);
  }

  const auto seed_pos = static_cast<std::size_t>(std::find(kept.begin(), kept.end(), seed) - kept.begin());
  const double max_gap = cfg.max_gap_ratio * ref.height;
  std::size_t first = seed_pos;
  while (first > 0) {
    const Box& left = components[static_cast<std::size_t>(kept[first - 1])].bbox;
    const Box& cur = components[static_cast<std::size_t>(kept[first])].bbox;
    if (cur.x - left.right() > max_gap) break;
    --first;
  }
  std::size_t last = seed_pos;
  while (last + 1 < kept.size()) {
    const Box& cur = components[static_cast<std::size_t>(kept[last])].bbox;
    const Box& right = components[static_cast<std::size_t>(kept[last + 1])].bbox;
    if (right.x - cur.right() > max_gap) break;
    ++last;
  }

  std::vector<CharBox> out;
  for (std::size_t i = first; i <= last; ++i) {
    out.push_back(to_char_box(components[static_cast<std::size_t>(kept[i])], bin.width()));
  }
  if (out.size() < 2) throw Error(ErrorCode::kSegmentationFailed, "segmentation failed: fewer than two characters");
  return out;
}

BinaryImage normalize_character(const BinaryImage& img, int grid_w, int grid_h) {
  if (grid_w < 1 || grid_h < 1) throw Error(ErrorCode::kInvalidArgument, "normalize_character: bad grid");
  int x0 = img.width(), y0 = img.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img.at(x, y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw Error(ErrorCode::kEmptyForeground, "normalize_character: empty foreground");
  const int bw = x1 - x0 + 1;
  const int bh = y1 - y0 + 1;
  BinaryImage out(grid_w, grid_h);
  for (int gy = 0; gy < grid_h; ++gy) {
    const int sy = y0 + std::min(bh - 1, static_cast<int>((gy + 0.5) * bh / grid_h));
    for (int gx = 0; gx < grid_w; ++gx) {
      const int sx = x0 + std::min(bw - 1, static_cast<int>((gx + 0.5) * bw / grid_w));
      out.at(gx, gy) = img.at(sx, sy);
    }
  }
  return out;
}

}  // namespace alprs
