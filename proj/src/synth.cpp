#include "alprs/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "alprs/error.hpp"

namespace alprs::synth {
namespace {

// Glyphs live in a 6 x 10 unit box, y pointing down.
constexpr double kL = 0.7;
constexpr double kR = 5.3;
constexpr double kT = 0.7;
constexpr double kB = 9.3;
constexpr double kHalfStroke = 0.65;
constexpr double kUnits = 10.0;

struct Vec {
  double x;
  double y;
};
struct Segment {
  Vec a;
  Vec b;
};
using Strokes = std::vector<Segment>;

void line(Strokes& s, std::initializer_list<Vec> pts) {
  const Vec* prev = nullptr;
  for (const Vec& p : pts) {
    if (prev) s.push_back({*prev, p});
    prev = &p;
  }
}

void arc(Strokes& s, double cx, double cy, double rx, double ry, double a0, double a1) {
  const int steps = std::max(4, static_cast<int>(std::abs(a1 - a0) / 10.0));
  Vec prev{cx + rx * std::cos(a0 * std::numbers::pi / 180.0), cy + ry * std::sin(a0 * std::numbers::pi / 180.0)};
  for (int i = 1; i <= steps; ++i) {
    const double a = (a0 + (a1 - a0) * i / steps) * std::numbers::pi / 180.0;
    const Vec p{cx + rx * std::cos(a), cy + ry * std::sin(a)};
    s.push_back({prev, p});
    prev = p;
  }
}

std::map<char, Strokes> build_font() {
  std::map<char, Strokes> f;
  auto& zero = f['0'];
  arc(zero, 3, 5, 2.3, 4.3, 0, 360);
  line(zero, {{4.3, 2.2}, {1.7, 7.8}});

  line(f['1'], {{1.4, 2.4}, {3, kT}, {3, kB}});
  line(f['1'], {{1.2, kB}, {4.8, kB}});

  arc(f['2'], 3, 3.0, 2.3, 2.3, 180, 390);
  line(f['2'], {{3 + 2.3 * std::cos(30 * std::numbers::pi / 180), 3.0 + 2.3 * std::sin(30 * std::numbers::pi / 180)},
                {kL, kB}, {kR, kB}});

  arc(f['3'], 3, 2.8, 2.2, 2.1, 200, 450);
  arc(f['3'], 3, 7.1, 2.3, 2.2, 270, 520);

  line(f['4'], {{4, kB}, {4, kT}, {kL, 6.6}, {kR, 6.6}});

  line(f['5'], {{kR, kT}, {1.2, kT}, {1.2, 4.5}, {1.53, 4.2}});
  arc(f['5'], 2.9, 6.5, 2.4, 2.8, 235, 505);

  arc(f['6'], 3, 6.7, 2.3, 2.6, 0, 360);
  arc(f['6'], 3.8, 5.5, 3.1, 4.8, 180, 290);

  line(f['7'], {{kL, kT}, {kR, kT}, {2.2, kB}});

  arc(f['8'], 3, 2.85, 2.0, 2.15, 0, 360);
  arc(f['8'], 3, 7.1, 2.3, 2.2, 0, 360);

  arc(f['9'], 3, 3.3, 2.3, 2.6, 0, 360);
  arc(f['9'], 2.2, 4.5, 3.1, 4.8, 0, 110);

  line(f['A'], {{kL, kB}, {3, kT}, {kR, kB}});
  line(f['A'], {{1.7, 6.3}, {4.3, 6.3}});

  line(f['B'], {{3.6, kT}, {kL, kT}, {kL, kB}, {3.8, kB}});
  line(f['B'], {{kL, 5}, {3.8, 5}});
  arc(f['B'], 3.6, 2.85, 1.5, 2.15, -90, 90);
  arc(f['B'], 3.8, 7.15, 1.5, 2.15, -90, 90);

  arc(f['C'], 3.2, 5, 2.5, 4.3, 40, 320);

  line(f['D'], {{2.6, kT}, {kL, kT}, {kL, kB}, {2.6, kB}});
  arc(f['D'], 2.6, 5, 2.7, 4.3, -90, 90);

  line(f['E'], {{kR, kT}, {kL, kT}, {kL, kB}, {kR, kB}});
  line(f['E'], {{kL, 5}, {4.6, 5}});

  line(f['F'], {{kR, kT}, {kL, kT}, {kL, kB}});
  line(f['F'], {{kL, 5}, {4.6, 5}});

  arc(f['G'], 3.2, 5, 2.5, 4.3, 20, 320);
  line(f['G'], {{3.2, 5.6}, {5.55, 5.6}, {5.55, 6.47}});

  line(f['H'], {{kL, kT}, {kL, kB}});
  line(f['H'], {{kR, kT}, {kR, kB}});
  line(f['H'], {{kL, 5}, {kR, 5}});

  line(f['I'], {{3, kT}, {3, kB}});
  line(f['I'], {{1.6, kT}, {4.4, kT}});
  line(f['I'], {{1.6, kB}, {4.4, kB}});

  line(f['J'], {{2.2, kT}, {4.3, kT}, {4.3, 6.8}});
  arc(f['J'], 2.6, 6.8, 1.7, 2.5, 0, 180);

  line(f['K'], {{kL, kT}, {kL, kB}});
  line(f['K'], {{kR, kT}, {kL, 5.6}});
  line(f['K'], {{2.2, 4.3}, {kR, kB}});

  line(f['L'], {{kL, kT}, {kL, kB}, {kR, kB}});

  line(f['M'], {{kL, kB}, {kL, kT}, {3, 6.5}, {kR, kT}, {kR, kB}});

  line(f['N'], {{kL, kB}, {kL, kT}, {kR, kB}, {kR, kT}});

  arc(f['O'], 3, 5, 2.3, 4.3, 0, 360);

  line(f['P'], {{kL, kB}, {kL, kT}, {3.4, kT}});
  line(f['P'], {{kL, 5.3}, {3.4, 5.3}});
  arc(f['P'], 3.4, 3.0, 1.9, 2.3, -90, 90);

  arc(f['Q'], 3, 5, 2.3, 4.3, 0, 360);
  line(f['Q'], {{3.4, 6.8}, {kR, kB}});

  line(f['R'], {{kL, kB}, {kL, kT}, {3.4, kT}});
  line(f['R'], {{kL, 5.3}, {3.4, 5.3}});
  arc(f['R'], 3.4, 3.0, 1.9, 2.3, -90, 90);
  line(f['R'], {{2.8, 5.3}, {kR, kB}});

  arc(f['S'], 3, 2.9, 2.2, 2.2, -20, -270);
  arc(f['S'], 3, 7.1, 2.3, 2.2, -90, 160);

  line(f['T'], {{kL, kT}, {kR, kT}});
  line(f['T'], {{3, kT}, {3, kB}});

  line(f['U'], {{kL, kT}, {kL, 6.5}});
  line(f['U'], {{kR, kT}, {kR, 6.5}});
  arc(f['U'], 3, 6.5, 2.3, 2.8, 180, 0);

  line(f['V'], {{kL, kT}, {3, kB}, {kR, kT}});

  line(f['W'], {{kL, kT}, {1.8, kB}, {3, 4}, {4.2, kB}, {kR, kT}});

  line(f['X'], {{kL, kT}, {kR, kB}});
  line(f['X'], {{kR, kT}, {kL, kB}});

  line(f['Y'], {{kL, kT}, {3, 5}, {kR, kT}});
  line(f['Y'], {{3, 5}, {3, kB}});

  line(f['Z'], {{kL, kT}, {kR, kT}, {kL, kB}, {kR, kB}});

  line(f['-'], {{1.5, 5}, {4.5, 5}});
  return f;
}

const std::map<char, Strokes>& font() {
  static const std::map<char, Strokes> f = build_font();
  return f;
}

double segment_distance(const Vec& p, const Segment& s) {
  const double vx = s.b.x - s.a.x;
  const double vy = s.b.y - s.a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - s.a.x) * vx + (p.y - s.a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = p.x - (s.a.x + t * vx);
  const double dy = p.y - (s.a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

void composite(GrayImage& canvas, int x, int y, double coverage, double ink) {
  if (x < 0 || y < 0 || x >= canvas.width() || y >= canvas.height() || coverage <= 0.0) return;
  double& px = canvas.at(x, y);
  px = px * (1.0 - coverage) + ink * coverage;
}

Box glyph_box(double x, double y, double height) {
  // Ink extent of the unit box inset, in pixels.
  const double s = height / kUnits;
  const double inset = (kL - kHalfStroke) * s;
  return {static_cast<int>(std::floor(x + inset)), static_cast<int>(std::floor(y + inset)),
          static_cast<int>(std::ceil(6.0 * s - 2 * inset)), static_cast<int>(std::ceil(height - 2 * inset))};
}

}  // namespace

bool has_glyph(char c) { return font().contains(c); }

void draw_glyph(GrayImage& canvas, char c, double x, double y, double height, double ink) {
  const auto it = font().find(c);
  if (it == font().end()) throw Error(ErrorCode::kInvalidArgument, std::string("no glyph for '") + c + "'");
  const double s = height / kUnits;
  const int px0 = static_cast<int>(std::floor(x)) - 1;
  const int py0 = static_cast<int>(std::floor(y)) - 1;
  const int px1 = static_cast<int>(std::ceil(x + 6.0 * s)) + 1;
  const int py1 = static_cast<int>(std::ceil(y + height)) + 1;
  for (int py = py0; py <= py1; ++py) {
    for (int px = px0; px <= px1; ++px) {
      const Vec p{(px + 0.5 - x) / s, (py + 0.5 - y) / s};
      double d = 1e9;
      for (const Segment& seg : it->second) d = std::min(d, segment_distance(p, seg));
      composite(canvas, px, py, std::clamp((kHalfStroke - d) * s + 0.5, 0.0, 1.0), ink);
    }
  }
}

void draw_disc(GrayImage& canvas, double cx, double cy, double radius, double ink) {
  for (int py = static_cast<int>(cy - radius) - 1; py <= static_cast<int>(cy + radius) + 1; ++py) {
    for (int px = static_cast<int>(cx - radius) - 1; px <= static_cast<int>(cx + radius) + 1; ++px) {
      const double d = std::hypot(px + 0.5 - cx, py + 0.5 - cy);
      composite(canvas, px, py, std::clamp(radius - d + 0.5, 0.0, 1.0), ink);
    }
  }
}

void fill_rect(GrayImage& canvas, double x, double y, double w, double h, double value) {
  const int x0 = std::max(0, static_cast<int>(std::lround(x)));
  const int y0 = std::max(0, static_cast<int>(std::lround(y)));
  const int x1 = std::min(canvas.width(), static_cast<int>(std::lround(x + w)));
  const int y1 = std::min(canvas.height(), static_cast<int>(std::lround(y + h)));
  for (int py = y0; py < y1; ++py) {
    for (int px = x0; px < x1; ++px) canvas.at(px, py) = value;
  }
}

void add_gaussian_noise(GrayImage& img, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : img.data()) v = std::clamp(v + noise(rng), 0.0, 1.0);
}

GrayImage render_template(char c, const TemplateStyle& style) {
  const int w = static_cast<int>(std::lround(kGlyphAspect * style.glyph_height)) + 2 * style.margin;
  const int h = static_cast<int>(std::lround(style.glyph_height)) + 2 * style.margin;
  GrayImage img(w, h, style.background);
  draw_glyph(img, c, style.margin, style.margin, style.glyph_height, style.ink);
  return style.blur > 0.0 ? gaussian_blur(img, style.blur) : img;
}

GrayImage render_sample(char c, std::mt19937_64& rng, const SampleStyle& style) {
  std::uniform_real_distribution<double> height(style.min_height, style.max_height);
  std::uniform_real_distribution<double> sub(0.0, 1.0);
  std::uniform_real_distribution<double> bg(0.78, 0.95);
  std::uniform_real_distribution<double> ink(0.05, 0.22);
  const double gh = height(rng);
  const int w = static_cast<int>(std::ceil(kGlyphAspect * gh)) + 2 * style.margin + 1;
  const int h = static_cast<int>(std::ceil(gh)) + 2 * style.margin + 1;
  GrayImage img(w, h, bg(rng));
  draw_glyph(img, c, style.margin + sub(rng), style.margin + sub(rng), gh, ink(rng));
  if (style.blur > 0.0) img = gaussian_blur(img, style.blur);
  add_gaussian_noise(img, style.noise_sigma, rng);
  return img;
}

std::string random_plate_text(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> letter(0, 25);
  std::uniform_int_distribution<int> digit(0, 9);
  std::string s;
  for (int i = 0; i < 3; ++i) s.push_back(static_cast<char>('A' + letter(rng)));
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>('0' + digit(rng)));
  return s;
}

PlateScene render_plate_scene(std::string_view text, const SceneOptions& opts, std::uint64_t seed) {
  if (text.size() != 7) throw Error(ErrorCode::kInvalidArgument, "plate text must have 7 characters");
  for (char c : text) {
    if (!has_glyph(c)) throw Error(ErrorCode::kInvalidArgument, std::string("no glyph for '") + c + "'");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  PlateScene scene;
  scene.text = std::string(text);
  const double gh = opts.glyph_height * uniform(1.0 - opts.scale_jitter, 1.0 + opts.scale_jitter);
  scene.glyph_height = gh;
  const double gw = kGlyphAspect * gh;
  const double gap = 0.15 * gh;
  const double dash = 0.4 * gh;
  const double text_w = 7 * gw + 6 * gap + dash + gap;
  const double pad_x = 0.45 * gh;
  const double plate_w = text_w + 2 * pad_x;
  const double plate_h = 2.0 * gh;

  const double px = uniform(20.0, std::max(20.0, opts.width - plate_w - 20.0));
  const double py = uniform(20.0, std::max(20.0, opts.height - plate_h - 20.0));
  scene.plate = {static_cast<int>(std::lround(px)), static_cast<int>(std::lround(py)),
                 static_cast<int>(std::lround(plate_w)), static_cast<int>(std::lround(plate_h))};

  // Vehicle body: shaded background with rectangular clutter kept off the plate.
  const double body = uniform(0.35, 0.6);
  const double slope = uniform(-0.15, 0.15);
  GrayImage img(opts.width, opts.height);
  for (int y = 0; y < opts.height; ++y) {
    for (int x = 0; x < opts.width; ++x) {
      img.at(x, y) = std::clamp(body + slope * (x - opts.width / 2.0) / opts.width, 0.0, 1.0);
    }
  }
  const Box keep_out{scene.plate.x - 12, scene.plate.y - 12, scene.plate.width + 24, scene.plate.height + 24};
  for (int i = 0, attempts = 0; i < opts.clutter && attempts < 200; ++attempts) {
    const double w = uniform(15.0, 90.0);
    const double h = uniform(6.0, 40.0);
    const double x = uniform(0.0, opts.width - w);
    const double y = uniform(0.0, opts.height - h);
    const Box b{static_cast<int>(x), static_cast<int>(y), static_cast<int>(w) + 2, static_cast<int>(h) + 2};
    if (!intersect(b, keep_out).empty()) continue;
    fill_rect(img, x, y, w, h, uniform(0.15, 0.85));
    ++i;
  }

  fill_rect(img, px, py, plate_w, plate_h, 0.25);
  fill_rect(img, px + 3, py + 3, plate_w - 6, plate_h - 6, 0.88);

  const double ink = 0.12;
  const double ty = py + 0.7 * gh;
  double x = px + pad_x;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i == 3) {
      draw_glyph(img, '-', x + (dash - gw) / 2.0, ty, gh, ink);
      x += dash + gap;
    }
    draw_glyph(img, text[i], x, ty, gh, ink);
    scene.char_boxes.push_back(glyph_box(x, ty, gh));
    x += gw + gap;
  }

  for (int i = 0; i < opts.screw_holes; ++i) {
    const double cx = px + plate_w * (opts.screw_holes == 1 ? 0.5 : 0.2 + 0.6 * i / (opts.screw_holes - 1));
    const double cy = py + 0.35 * gh;
    const double r = 0.225 * gh;
    draw_disc(img, cx, cy, r, 0.15);
    scene.screw_holes.push_back({static_cast<int>(cx - r), static_cast<int>(cy - r),
                                 static_cast<int>(2 * r) + 1, static_cast<int>(2 * r) + 1});
  }

  if (opts.blur > 0.0) img = gaussian_blur(img, opts.blur);
  add_gaussian_noise(img, opts.noise_sigma, rng);
  scene.image = std::move(img);
  return scene;
}

}  // namespace alprs::synth
