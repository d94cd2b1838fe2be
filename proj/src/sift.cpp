#include "alprs/sift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "alprs/error.hpp"

namespace alprs {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMinOctaveSize = 16;
constexpr double kOrientationWindowFactor = 1.5;
constexpr double kOrientationPeakRatio = 0.8;

// Descriptor geometry: 16x16 samples, 4x4 cells of 4x4 samples, 8 orientation bins.
constexpr int kDescriptorSamples = 16;
constexpr int kDescriptorCells = 4;
constexpr int kDescriptorBins = 8;
constexpr double kDescriptorWeightSigma = 8.0;
constexpr double kDescriptorClamp = 0.2;
constexpr int kRefineSteps = 5;

int auto_octave_count(int width, int height) {
  int count = 0;
  int w = width;
  int h = height;
  while (std::min(w, h) >= kMinOctaveSize) {
    ++count;
    w /= 2;
    h /= 2;
  }
  return count;
}

bool is_extremum(const Octave& oct, int level, int x, int y) {
  const double v = oct.dogs[static_cast<std::size_t>(level)].at(x, y);
  const bool maybe_max = v > 0.0;
  for (int dl = -1; dl <= 1; ++dl) {
    const SignedImage& d = oct.dogs[static_cast<std::size_t>(level + dl)];
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dl == 0 && dx == 0 && dy == 0) continue;
        const double n = d.at(x + dx, y + dy);
        if (maybe_max ? !(v > n) : !(v < n)) return false;
      }
    }
  }
  return true;
}

bool passes_edge_test(const SignedImage& d, int x, int y, double edge_ratio) {
  const double v = d.at(x, y);
  const double dxx = d.at(x + 1, y) + d.at(x - 1, y) - 2.0 * v;
  const double dyy = d.at(x, y + 1) + d.at(x, y - 1) - 2.0 * v;
  const double dxy = (d.at(x + 1, y + 1) - d.at(x + 1, y - 1) - d.at(x - 1, y + 1) +
                      d.at(x - 1, y - 1)) / 4.0;
  const double trace = dxx + dyy;
  const double det = dxx * dyy - dxy * dxy;
  if (det <= 0.0) return false;
  return trace * trace * edge_ratio < (edge_ratio + 1.0) * (edge_ratio + 1.0) * det;
}

// Newton steps on the quadratic model of D around a discrete extremum. Updates the
// candidate in place; returns false when the fit wanders off or loses contrast.
bool refine(const Octave& oct, Candidate& c, double contrast_threshold) {
  const int levels = static_cast<int>(oct.dogs.size());
  const int w = oct.dogs.front().width;
  const int h = oct.dogs.front().height;
  int x = c.x;
  int y = c.y;
  int l = c.level;
  double off[3] = {0.0, 0.0, 0.0};
  for (int step = 0; step < kRefineSteps; ++step) {
    const SignedImage& d0 = oct.dogs[static_cast<std::size_t>(l - 1)];
    const SignedImage& d1 = oct.dogs[static_cast<std::size_t>(l)];
    const SignedImage& d2 = oct.dogs[static_cast<std::size_t>(l + 1)];
    const double v = d1.at(x, y);
    const double g[3] = {(d1.at(x + 1, y) - d1.at(x - 1, y)) / 2.0,
                         (d1.at(x, y + 1) - d1.at(x, y - 1)) / 2.0,
                         (d2.at(x, y) - d0.at(x, y)) / 2.0};
    const double hxx = d1.at(x + 1, y) + d1.at(x - 1, y) - 2.0 * v;
    const double hyy = d1.at(x, y + 1) + d1.at(x, y - 1) - 2.0 * v;
    const double hss = d2.at(x, y) + d0.at(x, y) - 2.0 * v;
    const double hxy = (d1.at(x + 1, y + 1) - d1.at(x + 1, y - 1) - d1.at(x - 1, y + 1) +
                        d1.at(x - 1, y - 1)) / 4.0;
    const double hxs = (d2.at(x + 1, y) - d2.at(x - 1, y) - d0.at(x + 1, y) + d0.at(x - 1, y)) / 4.0;
    const double hys = (d2.at(x, y + 1) - d2.at(x, y - 1) - d0.at(x, y + 1) + d0.at(x, y - 1)) / 4.0;
    const double H[3][3] = {{hxx, hxy, hxs}, {hxy, hyy, hys}, {hxs, hys, hss}};
    const double det = H[0][0] * (H[1][1] * H[2][2] - H[1][2] * H[2][1]) -
                       H[0][1] * (H[1][0] * H[2][2] - H[1][2] * H[2][0]) +
                       H[0][2] * (H[1][0] * H[2][1] - H[1][1] * H[2][0]);
    if (std::abs(det) < 1e-12) return false;
    // Cramer's rule for H * off = -g.
    for (int col = 0; col < 3; ++col) {
      double m[3][3];
      for (int r = 0; r < 3; ++r) {
        for (int k = 0; k < 3; ++k) m[r][k] = (k == col) ? -g[r] : H[r][k];
      }
      off[col] = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                  m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                  m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) / det;
    }
    if (std::abs(off[0]) < 0.5 && std::abs(off[1]) < 0.5 && std::abs(off[2]) < 0.5) {
      const double value = v + 0.5 * (g[0] * off[0] + g[1] * off[1] + g[2] * off[2]);
      if (std::abs(value) < contrast_threshold) return false;
      c.x = x;
      c.y = y;
      c.level = l;
      c.sub_x = x + off[0];
      c.sub_y = y + off[1];
      c.sub_level = l + off[2];
      c.value = value;
      return true;
    }
    x += static_cast<int>(std::lround(off[0]));
    y += static_cast<int>(std::lround(off[1]));
    l += static_cast<int>(std::lround(off[2]));
    if (l < 1 || l > levels - 2 || x < 1 || x > w - 2 || y < 1 || y > h - 2) return false;
  }
  return false;
}

}  // namespace

void validate(const SiftConfig& cfg) {
  if (cfg.intervals < 1) throw Error(ErrorCode::kInvalidArgument, "sift: intervals must be >= 1");
  if (cfg.num_octaves < 0) throw Error(ErrorCode::kInvalidArgument, "sift: num_octaves must be >= 0");
  if (!(cfg.sigma0 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sift: sigma0 must be > 0");
  if (!(cfg.contrast_threshold > 0.0) || !(cfg.edge_ratio > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sift: thresholds must be > 0");
  }
}

double scale_step(const SiftConfig& cfg) { return std::pow(2.0, 1.0 / cfg.intervals); }

double ScaleSpace::absolute_sigma(int octave, double level) const {
  return config.sigma0 * std::pow(scale_step(config), level) * std::ldexp(1.0, octave);
}

double wrap_angle(double theta) {
  theta = std::fmod(theta, kTwoPi);
  if (theta <= -kPi) theta += kTwoPi;
  if (theta > kPi) theta -= kTwoPi;
  return theta;
}

Gradient gradient_at(const GrayImage& level, int x, int y) {
  const double dx = level.at(x + 1, y) - level.at(x - 1, y);
  const double dy = level.at(x, y + 1) - level.at(x, y - 1);
  return {std::sqrt(dx * dx + dy * dy), std::atan2(dy, dx)};
}

std::array<double, kOrientationBins> orientation_histogram(const GrayImage& level, int x, int y,
                                                           double scale) {
  std::array<double, kOrientationBins> hist{};
  const double sigma_w = kOrientationWindowFactor * scale;
  const int radius = static_cast<int>(std::lround(3.0 * sigma_w));
  const double denom = 2.0 * sigma_w * sigma_w;
  const double bin_width = kTwoPi / kOrientationBins;
  for (int dy = -radius; dy <= radius; ++dy) {
    const int py = y + dy;
    if (py < 1 || py > level.height() - 2) continue;
    for (int dx = -radius; dx <= radius; ++dx) {
      const int px = x + dx;
      if (px < 1 || px > level.width() - 2) continue;
      if (dx * dx + dy * dy > radius * radius) continue;
      const Gradient g = gradient_at(level, px, py);
      if (g.magnitude == 0.0) continue;
      const double weight = std::exp(-(dx * dx + dy * dy) / denom);
      int bin = static_cast<int>(std::lround(g.theta / bin_width)) % kOrientationBins;
      if (bin < 0) bin += kOrientationBins;
      hist[static_cast<std::size_t>(bin)] += weight * g.magnitude;
    }
  }
  return hist;
}

std::vector<double> dominant_orientations(const std::array<double, kOrientationBins>& hist) {
  const double peak = *std::max_element(hist.begin(), hist.end());
  std::vector<double> out;
  if (peak <= 0.0) return out;
  const double bin_width = kTwoPi / kOrientationBins;
  for (int b = 0; b < kOrientationBins; ++b) {
    const double c = hist[static_cast<std::size_t>(b)];
    const double l = hist[static_cast<std::size_t>((b + kOrientationBins - 1) % kOrientationBins)];
    const double r = hist[static_cast<std::size_t>((b + 1) % kOrientationBins)];
    if (c < kOrientationPeakRatio * peak || !(c > l) || !(c >= r)) continue;
    const double curvature = l - 2.0 * c + r;
    const double offset = curvature != 0.0 ? 0.5 * (l - r) / curvature : 0.0;
    out.push_back(wrap_angle((b + offset) * bin_width));
  }
  return out;
}

ScaleSpace build_scale_space(const GrayImage& img, const SiftConfig& cfg) {
  validate(cfg);
  if (img.width() < kMinOctaveSize || img.height() < kMinOctaveSize) {
    throw Error(ErrorCode::kImageTooSmall, "build_scale_space: image must be at least 16x16");
  }
  const int auto_count = auto_octave_count(img.width(), img.height());
  const int octave_count = cfg.num_octaves > 0 ? std::min(cfg.num_octaves, auto_count) : auto_count;
  const int levels = cfg.intervals + 3;
  const double k = scale_step(cfg);

  ScaleSpace ss;
  ss.config = cfg;
  ss.input_width = img.width();
  ss.input_height = img.height();
  ss.octaves.resize(static_cast<std::size_t>(octave_count));

  std::vector<double> sigmas(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) sigmas[static_cast<std::size_t>(i)] = cfg.sigma0 * std::pow(k, i);

  for (int o = 0; o < octave_count; ++o) {
    Octave& oct = ss.octaves[static_cast<std::size_t>(o)];
    oct.sigmas = sigmas;
    oct.gaussians.reserve(static_cast<std::size_t>(levels));
    if (o == 0) {
      oct.gaussians.push_back(gaussian_blur(img, cfg.sigma0));
    } else {
      // Level s of the previous octave sits at scale 2 * sigma0.
      const Octave& prev = ss.octaves[static_cast<std::size_t>(o - 1)];
      oct.gaussians.push_back(downsample_half(prev.gaussians[static_cast<std::size_t>(cfg.intervals)]));
    }
    for (int i = 1; i < levels; ++i) {
      const double s_prev = sigmas[static_cast<std::size_t>(i - 1)];
      const double s_cur = sigmas[static_cast<std::size_t>(i)];
      oct.gaussians.push_back(
          gaussian_blur(oct.gaussians.back(), std::sqrt(s_cur * s_cur - s_prev * s_prev)));
    }
    oct.dogs.reserve(static_cast<std::size_t>(levels - 1));
    for (int i = 0; i + 1 < levels; ++i) {
      oct.dogs.push_back(subtract(oct.gaussians[static_cast<std::size_t>(i + 1)],
                                  oct.gaussians[static_cast<std::size_t>(i)]));
    }
  }
  return ss;
}

std::vector<Candidate> detect_extrema(const ScaleSpace& ss, const SiftConfig& cfg) {
  std::vector<Candidate> out;
  for (int o = 0; o < static_cast<int>(ss.octaves.size()); ++o) {
    const Octave& oct = ss.octaves[static_cast<std::size_t>(o)];
    const int dog_levels = static_cast<int>(oct.dogs.size());
    for (int l = 1; l + 1 < dog_levels; ++l) {
      const SignedImage& d = oct.dogs[static_cast<std::size_t>(l)];
      for (int y = 1; y + 1 < d.height; ++y) {
        for (int x = 1; x + 1 < d.width; ++x) {
          const double v = d.at(x, y);
          if (std::abs(v) < cfg.contrast_threshold) continue;
          if (!is_extremum(oct, l, x, y)) continue;
          if (!passes_edge_test(d, x, y, cfg.edge_ratio)) continue;
          Candidate c{o, l, x, y, static_cast<double>(x), static_cast<double>(y),
                      static_cast<double>(l), v};
          if (cfg.refine_subpixel && !refine(oct, c, cfg.contrast_threshold)) continue;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

std::vector<OrientedCandidate> assign_orientations(const ScaleSpace& ss,
                                                   std::span<const Candidate> candidates) {
  std::vector<OrientedCandidate> out;
  out.reserve(candidates.size());
  const double k = scale_step(ss.config);
  for (const Candidate& c : candidates) {
    const Octave& oct = ss.octaves[static_cast<std::size_t>(c.octave)];
    const int level = std::clamp(static_cast<int>(std::lround(c.sub_level)), 0,
                                 static_cast<int>(oct.gaussians.size()) - 1);
    const double scale = ss.config.sigma0 * std::pow(k, c.sub_level);
    const auto hist = orientation_histogram(oct.gaussians[static_cast<std::size_t>(level)],
                                            static_cast<int>(std::lround(c.sub_x)),
                                            static_cast<int>(std::lround(c.sub_y)), scale);
    for (double theta : dominant_orientations(hist)) out.push_back({c, theta});
  }
  return out;
}

std::vector<Keypoint> compute_descriptors(const ScaleSpace& ss,
                                          std::span<const OrientedCandidate> candidates) {
  std::vector<Keypoint> out;
  out.reserve(candidates.size());
  const double k = scale_step(ss.config);
  const double half = (kDescriptorSamples - 1) / 2.0;  // 7.5
  const double cell = static_cast<double>(kDescriptorSamples) / kDescriptorCells;

  for (const OrientedCandidate& oc : candidates) {
    const Candidate& c = oc.candidate;
    const Octave& oct = ss.octaves[static_cast<std::size_t>(c.octave)];
    const int level = std::clamp(static_cast<int>(std::lround(c.sub_level)), 0,
                                 static_cast<int>(oct.gaussians.size()) - 1);
    const GrayImage& L = oct.gaussians[static_cast<std::size_t>(level)];
    const double spacing = std::pow(k, c.sub_level);  // octave sigma / sigma0

    // Farthest sample sits 7.5 * sqrt(2) spacings away; +1 for the central differences.
    const double reach = half * std::numbers::sqrt2 * spacing + 1.0;
    if (c.sub_x - reach < 0.0 || c.sub_y - reach < 0.0 || c.sub_x + reach > L.width() - 1 ||
        c.sub_y + reach > L.height() - 1) {
      continue;
    }

    const double cos_t = std::cos(oc.theta);
    const double sin_t = std::sin(oc.theta);
    std::array<double, kDescriptorSize> hist{};
    for (int i = 0; i < kDescriptorSamples; ++i) {
      const double v = i - half;
      for (int j = 0; j < kDescriptorSamples; ++j) {
        const double u = j - half;
        const double px = c.sub_x + spacing * (u * cos_t - v * sin_t);
        const double py = c.sub_y + spacing * (u * sin_t + v * cos_t);
        const double gx = L.bilinear(px + 1.0, py) - L.bilinear(px - 1.0, py);
        const double gy = L.bilinear(px, py + 1.0) - L.bilinear(px, py - 1.0);
        const double mag = std::sqrt(gx * gx + gy * gy);
        if (mag == 0.0) continue;
        double angle = std::atan2(gy, gx) - oc.theta;
        angle = std::fmod(angle, kTwoPi);
        if (angle < 0.0) angle += kTwoPi;
        const double weight =
            std::exp(-(u * u + v * v) / (2.0 * kDescriptorWeightSigma * kDescriptorWeightSigma));
        const double contrib = weight * mag;

        const double cx = (j + 0.5) / cell - 0.5;
        const double cy = (i + 0.5) / cell - 0.5;
        const double ob = angle / kTwoPi * kDescriptorBins;
        const int x0 = static_cast<int>(std::floor(cx));
        const int y0 = static_cast<int>(std::floor(cy));
        const int o0 = static_cast<int>(std::floor(ob));
        const double fx = cx - x0;
        const double fy = cy - y0;
        const double fo = ob - o0;
        for (int dyc = 0; dyc <= 1; ++dyc) {
          const int yc = y0 + dyc;
          if (yc < 0 || yc >= kDescriptorCells) continue;
          const double wy = dyc ? fy : 1.0 - fy;
          for (int dxc = 0; dxc <= 1; ++dxc) {
            const int xc = x0 + dxc;
            if (xc < 0 || xc >= kDescriptorCells) continue;
            const double wx = dxc ? fx : 1.0 - fx;
            for (int doc = 0; doc <= 1; ++doc) {
              const int ob_idx = (o0 + doc) % kDescriptorBins;
              const double wo = doc ? fo : 1.0 - fo;
              hist[static_cast<std::size_t>((yc * kDescriptorCells + xc) * kDescriptorBins + ob_idx)] +=
                  contrib * wx * wy * wo;
            }
          }
        }
      }
    }

    double norm = 0.0;
    for (double h : hist) norm += h * h;
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    double norm2 = 0.0;
    for (double& h : hist) {
      h = std::min(h / norm, kDescriptorClamp);
      norm2 += h * h;
    }
    norm2 = std::sqrt(norm2);

    Keypoint kp;
    const double octave_scale = std::ldexp(1.0, c.octave);
    kp.x = std::clamp(c.sub_x * octave_scale, 0.0, std::nextafter(static_cast<double>(ss.input_width), 0.0));
    kp.y = std::clamp(c.sub_y * octave_scale, 0.0, std::nextafter(static_cast<double>(ss.input_height), 0.0));
    kp.sigma = ss.absolute_sigma(c.octave, c.sub_level);
    kp.theta = oc.theta;
    for (std::size_t n = 0; n < hist.size(); ++n) kp.descriptor[n] = static_cast<float>(hist[n] / norm2);
    out.push_back(kp);
  }
  return out;
}

std::vector<Keypoint> extract_keypoints(const GrayImage& img, const SiftConfig& cfg) {
  const ScaleSpace ss = build_scale_space(img, cfg);
  const auto candidates = detect_extrema(ss, cfg);
  const auto oriented = assign_orientations(ss, candidates);
  return compute_descriptors(ss, oriented);
}

}  // namespace alprs
