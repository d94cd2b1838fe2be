#pragma once

#include <array>
#include <span>
#include <vector>

#include "alprs/image.hpp"

namespace alprs {

inline constexpr int kDescriptorSize = 128;
using Descriptor = std::array<float, kDescriptorSize>;

struct SiftConfig {
  int intervals = 3;               // s; each octave holds s+3 Gaussian levels
  int num_octaves = 0;             // 0: keep halving while min(w, h) >= 16
  double sigma0 = 1.6;
  double contrast_threshold = 0.03;
  double edge_ratio = 10.0;
  bool refine_subpixel = false;    // 3-D quadratic fit of extrema
};

void validate(const SiftConfig& cfg);

/// Multiplicative scale step between adjacent levels, 2^(1/s).
double scale_step(const SiftConfig& cfg);

struct Octave {
  std::vector<GrayImage> gaussians;  // s+3 levels
  std::vector<SignedImage> dogs;     // s+2 levels, dogs[i] = gaussians[i+1] - gaussians[i]
  std::vector<double> sigmas;        // per Gaussian level, in this octave's pixel units
};

struct ScaleSpace {
  SiftConfig config;
  int input_width = 0;
  int input_height = 0;
  std::vector<Octave> octaves;

  /// Absolute scale of a level in input-image pixels.
  double absolute_sigma(int octave, double level) const;
};

/// Discrete (optionally refined) DoG extremum.
struct Candidate {
  int octave = 0;
  int level = 0;       // DoG level, 1..s
  int x = 0;           // octave pixel coordinates
  int y = 0;
  double sub_x = 0.0;  // refined position, octave pixel coordinates
  double sub_y = 0.0;
  double sub_level = 0.0;
  double value = 0.0;  // D at the extremum
};

struct OrientedCandidate {
  Candidate candidate;
  double theta = 0.0;  // radians in (-pi, pi]
};

struct Keypoint {
  double x = 0.0;      // input-image coordinates
  double y = 0.0;
  double sigma = 0.0;  // absolute scale
  double theta = 0.0;  // radians in (-pi, pi]
  Descriptor descriptor{};

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct Gradient {
  double magnitude = 0.0;
  double theta = 0.0;  // full-quadrant atan2(dy, dx)
};

/// Central-difference gradient of L at an interior pixel.
Gradient gradient_at(const GrayImage& level, int x, int y);

inline constexpr int kOrientationBins = 36;

/// Gaussian-weighted (sigma 1.5 * scale) gradient-orientation histogram around (x, y).
/// Bin b is centred on b * 2pi/36.
std::array<double, kOrientationBins> orientation_histogram(const GrayImage& level, int x, int y,
                                                           double scale);

/// Orientations of all histogram peaks >= 0.8 * max, parabolically interpolated.
std::vector<double> dominant_orientations(const std::array<double, kOrientationBins>& hist);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double theta);

ScaleSpace build_scale_space(const GrayImage& img, const SiftConfig& cfg);
std::vector<Candidate> detect_extrema(const ScaleSpace& ss, const SiftConfig& cfg);
std::vector<OrientedCandidate> assign_orientations(const ScaleSpace& ss,
                                                   std::span<const Candidate> candidates);
std::vector<Keypoint> compute_descriptors(const ScaleSpace& ss,
                                          std::span<const OrientedCandidate> candidates);
std::vector<Keypoint> extract_keypoints(const GrayImage& img, const SiftConfig& cfg = {});

}  // namespace alprs
