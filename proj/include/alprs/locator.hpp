#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "alprs/image.hpp"
#include "alprs/kdtree.hpp"
#include "alprs/matchdb.hpp"
#include "alprs/sift.hpp"

namespace alprs {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// One template keypoint paired with one image keypoint.
struct MatchPair {
  char template_char = '0';
  Point2 template_xy;
  double template_theta = 0.0;
  Point2 image_xy;
  double image_theta = 0.0;
  std::size_t template_index = 0;
  std::size_t image_index = 0;

  Point2 offset() const { return {image_xy.x - template_xy.x, image_xy.y - template_xy.y}; }
};

/// The largest template/image rotation tolerated, 2pi/36 (10 degrees). Fixed.
inline constexpr double kMaxRotation = 2.0 * 3.14159265358979323846 / 36.0;

/// Minimum inliers for a single template to count as a glyph hit.
inline constexpr std::size_t kMinInliers = 3;

/// Square-wave kernel: a neighbour contributes 1 inside radius h, 0 outside.
struct DensityConfig {
  double h = 10.0;
};

struct PlateWindow {
  double width_ratio = 9.0;   // multiples of the seed template width
  double height_ratio = 1.6;  // multiples of the seed template height
};

struct LocatorConfig {
  double tau_match = kDefaultTauMatch;
  int max_checks = kDefaultMaxChecks;
  DensityConfig density;
  PlateWindow window;
};

struct PlateRegion {
  Box bbox;               // plate window in image coordinates, clipped to the image
  char seed_char = '0';
  Box seed_bbox;          // seed template box mapped into the image
  Point2 translation;     // component-wise median of inlier offsets
  std::vector<MatchPair> inliers;
  bool fallback = false;  // true when no template reached kMinInliers
  std::array<std::size_t, 10> inlier_counts{};  // per digit, single-template path
};

/// Keeps pairs whose circular orientation difference is <= 2pi/36.
std::vector<MatchPair> filter_by_orientation(std::span<const MatchPair> pairs);

struct DensityResult {
  std::vector<MatchPair> inliers;
  std::size_t anchor_index = 0;  // pair whose offset has maximal density
  Point2 anchor;
  std::size_t density = 0;       // neighbours (self included) within h of the anchor
};

/// Offset-space density peak. Each pair maps to offset = image_xy - template_xy; the
/// densest offset (ties: lowest index) anchors the cluster and every pair within h of
/// it is an inlier. Empty input gives an empty result.
DensityResult offset_density(std::span<const MatchPair> pairs, const DensityConfig& cfg);

std::vector<MatchPair> offset_density_inliers(std::span<const MatchPair> pairs,
                                              const DensityConfig& cfg);

std::vector<MatchPair> to_match_pairs(std::span<const Match> matches, const TemplateEntry& entry,
                                      std::span<const Keypoint> image_kps);

/// Finds the seed glyph among the digit templates and derives the plate window.
/// Holds one k-d index per template; immutable and safe to share across threads.
class PlateLocator {
 public:
  PlateLocator(const TemplateFeatureDB& db, LocatorConfig cfg);

  /// Throws kPlateNotFound when no match survives.
  PlateRegion locate(std::span<const Keypoint> image_kps, int image_width, int image_height) const;

  const LocatorConfig& config() const noexcept { return cfg_; }

 private:
  TemplateFeatureDB db_;
  LocatorConfig cfg_;
  std::vector<std::optional<KdIndex>> indices_;  // per digit; empty when it has no keypoints
};

PlateRegion locate_plate(std::span<const Keypoint> image_kps, const TemplateFeatureDB& db,
                         const LocatorConfig& cfg, int image_width, int image_height);

}  // namespace alprs
