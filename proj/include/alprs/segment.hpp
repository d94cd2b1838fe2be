#pragma once

#include <vector>

#include "alprs/image.hpp"

namespace alprs {

inline constexpr int kHistogramBins = 256;

struct OtsuResult {
  double threshold = 0.0;               // pixels below are class 0, the rest class 1
  int cut = 0;                          // last histogram bin of class 0
  double between_class_variance = 0.0;  // sigma_B^2
  double total_variance = 0.0;          // sigma_T^2

  /// sigma_B^2 / sigma_T^2, the separability Otsu's method maximizes.
  double separability() const { return total_variance > 0.0 ? between_class_variance / total_variance : 0.0; }
};

/// Histogram bin of an intensity: round(v * 255).
int histogram_bin(double v);

/// Exhaustive search over the 255 cuts of a 256-bin histogram for maximal sigma_B^2
/// (equivalently sigma_B^2 / sigma_T^2); ties go to the lowest cut. The returned
/// threshold sits halfway between the cut bin and the next. Throws kDegenerateHistogram
/// when every pixel falls in one bin.
OtsuResult otsu_threshold(const GrayImage& region);

enum class Polarity { kDarkInk, kLightInk, kAuto };

/// Dark ink: v < t is foreground. Light ink: v >= t. Auto picks whichever side is the
/// minority (dark on a tie).
BinaryImage binarize(const GrayImage& region, double t, Polarity polarity);

struct CharBox {
  Box bbox;           // in the coordinates of the binary image it was clipped from
  BinaryImage image;  // bbox-sized mask of the component's own pixels
};

struct Component {
  Box bbox;
  std::size_t area = 0;
  std::vector<int> pixels;  // linear indices into the source image
};

/// 8-connected foreground components in raster order of their first pixel.
std::vector<Component> connected_components(const BinaryImage& bin);

struct ClipConfig {
  double min_height_ratio = 0.6;
  double max_height_ratio = 1.4;
  double min_width_ratio = 0.3;
  double max_width_ratio = 1.6;
  double min_row_overlap = 0.5;     // fraction of the component's height shared with the seed row
  double max_gap_ratio = 1.0;       // largest horizontal gap between neighbours, in seed heights
  double max_x_overlap_ratio = 0.1; // in seed widths
};

/// Character boxes left to right. The seed glyph is the largest component lying inside
/// seed_box (grown by 10%); size and row gates are relative to that glyph, and the scan
/// chains neighbours outward from it in both directions. Throws kSegmentationFailed
/// with fewer than two boxes.
std::vector<CharBox> clip_characters(const BinaryImage& bin, const Box& seed_box,
                                     const ClipConfig& cfg = {});

/// Nearest-neighbour resampling of the tight foreground box onto grid_w x grid_h.
BinaryImage normalize_character(const BinaryImage& img, int grid_w, int grid_h);

}  // namespace alprs
