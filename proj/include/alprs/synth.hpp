#pragma once

// Stroke font and scene renderer for building template sets, OCR training sets and
// synthetic plate corpora.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "alprs/image.hpp"

namespace alprs::synth {

/// Glyph width as a fraction of glyph height.
inline constexpr double kGlyphAspect = 0.6;

bool has_glyph(char c);

/// Composites an anti-aliased glyph whose box has its top-left corner at (x, y).
void draw_glyph(GrayImage& canvas, char c, double x, double y, double height, double ink);

void draw_disc(GrayImage& canvas, double cx, double cy, double radius, double ink);
void fill_rect(GrayImage& canvas, double x, double y, double w, double h, double value);
void add_gaussian_noise(GrayImage& img, double sigma, std::mt19937_64& rng);

struct TemplateStyle {
  double glyph_height = 48.0;
  int margin = 24;
  double background = 0.88;
  double ink = 0.12;
  double blur = 0.7;
};

GrayImage render_template(char c, const TemplateStyle& style = {});

struct SampleStyle {
  double min_height = 44.0;
  double max_height = 52.0;
  int margin = 6;
  double noise_sigma = 0.02;
  double blur = 0.7;
};

/// One jittered training rendering of a character.
GrayImage render_sample(char c, std::mt19937_64& rng, const SampleStyle& style = {});

struct SceneOptions {
  int width = 640;
  int height = 240;
  double glyph_height = 48.0;
  double scale_jitter = 0.10;  // glyph height drawn from glyph_height * (1 +/- jitter)
  double noise_sigma = 0.02;
  double blur = 0.7;
  int screw_holes = 2;
  int clutter = 8;             // distractor shapes on the vehicle body
};

struct PlateScene {
  GrayImage image;
  std::string text;                  // plate characters without the separator
  Box plate;
  std::vector<Box> char_boxes;       // per character, image coordinates
  std::vector<Box> screw_holes;
  double glyph_height = 0.0;
};

/// Three letters, a separator and four digits on a light plate over a cluttered body.
PlateScene render_plate_scene(std::string_view text, const SceneOptions& opts, std::uint64_t seed);

/// Random "LLLNNNN" text.
std::string random_plate_text(std::mt19937_64& rng);

}  // namespace alprs::synth
