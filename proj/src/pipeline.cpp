#include "alprs/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "alprs/error.hpp"

namespace alprs {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void parse_error(std::string_view what, std::string_view text) {
  throw Error(ErrorCode::kParseError, std::string(what) + ": '" + std::string(text) + "'");
}

double to_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) parse_error(std::string("bad number for ") + std::string(key), text);
  return v;
}

int to_int(std::string_view key, std::string_view text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) parse_error(std::string("bad integer for ") + std::string(key), text);
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  parse_error(std::string("bad boolean for ") + std::string(key), text);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::string letters() { return "ABCDEFGHIJKLMNOPQRSTUVWXYZ"; }
std::string digits() { return "0123456789"; }

}  // namespace

void validate(const PipelineConfig& cfg) {
  validate(cfg.sift);
  validate(cfg.grid);
  if (!(cfg.locator.tau_match > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau_match must be positive");
  if (cfg.locator.max_checks < 1) throw Error(ErrorCode::kInvalidArgument, "max_checks must be at least 1");
  if (!(cfg.locator.density.h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "density h must be positive");
  if (!(cfg.locator.window.width_ratio > 0.0) || !(cfg.locator.window.height_ratio > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "plate window ratios must be positive");
  }
  if (cfg.noise_fraction < 0.0 || cfg.noise_fraction > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "noise_fraction must lie in [0, 1]");
  }
  pattern_classes(cfg.plate_pattern);
}

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "sift.intervals") cfg.sift.intervals = to_int(key, value);
  else if (key == "sift.num_octaves") cfg.sift.num_octaves = to_int(key, value);
  else if (key == "sift.sigma0") cfg.sift.sigma0 = to_double(key, value);
  else if (key == "sift.contrast_threshold") cfg.sift.contrast_threshold = to_double(key, value);
  else if (key == "sift.edge_ratio") cfg.sift.edge_ratio = to_double(key, value);
  else if (key == "sift.refine_subpixel") cfg.sift.refine_subpixel = to_bool(key, value);
  else if (key == "tau_match") cfg.locator.tau_match = to_double(key, value);
  else if (key == "max_checks") cfg.locator.max_checks = to_int(key, value);
  else if (key == "density_h") cfg.locator.density.h = to_double(key, value);
  else if (key == "window.width_ratio") cfg.locator.window.width_ratio = to_double(key, value);
  else if (key == "window.height_ratio") cfg.locator.window.height_ratio = to_double(key, value);
  else if (key == "clip.min_height_ratio") cfg.clip.min_height_ratio = to_double(key, value);
  else if (key == "clip.max_height_ratio") cfg.clip.max_height_ratio = to_double(key, value);
  else if (key == "clip.min_width_ratio") cfg.clip.min_width_ratio = to_double(key, value);
  else if (key == "clip.max_width_ratio") cfg.clip.max_width_ratio = to_double(key, value);
  else if (key == "clip.min_row_overlap") cfg.clip.min_row_overlap = to_double(key, value);
  else if (key == "clip.max_gap_ratio") cfg.clip.max_gap_ratio = to_double(key, value);
  else if (key == "clip.max_x_overlap_ratio") cfg.clip.max_x_overlap_ratio = to_double(key, value);
  else if (key == "grid") cfg.grid = parse_grid(value, cfg.grid.order);
  else if (key == "order") cfg.grid.order = to_int(key, value);
  else if (key == "noise_fraction") cfg.noise_fraction = to_double(key, value);
  else if (key == "plate_pattern") cfg.plate_pattern = std::string(value);
  else if (key == "polarity") {
    if (value == "dark") cfg.polarity = Polarity::kDarkInk;
    else if (value == "light") cfg.polarity = Polarity::kLightInk;
    else if (value == "auto") cfg.polarity = Polarity::kAuto;
    else parse_error("bad polarity", value);
  } else {
    parse_error("unknown config key", key);
  }
}

void apply_config_text(PipelineConfig& cfg, std::string_view text) {
  for (std::string_view raw : split(text, '\n')) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error("expected key = value", line);
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

PipelineConfig config_from_environment() {
  PipelineConfig cfg;
  if (const char* path = std::getenv(std::string(kConfigEnvVar).c_str()); path && *path) {
    apply_config_file(cfg, path);
  }
  return cfg;
}

GridSpec parse_grid(std::string_view text, int order) {
  const auto x = text.find_first_of("xX");
  if (x == std::string_view::npos) parse_error("grid must look like 65x60", text);
  GridSpec g{to_int("grid width", trim(text.substr(0, x))), to_int("grid height", trim(text.substr(x + 1))), order};
  validate(g);
  return g;
}

std::vector<std::string> pattern_classes(std::string_view pattern) {
  std::vector<std::string> out;
  for (char c : pattern) {
    switch (c) {
      case 'L': out.push_back(letters()); break;
      case 'N': out.push_back(digits()); break;
      case '?': out.push_back(digits() + letters()); break;
      case '-': break;
      default: throw Error(ErrorCode::kParseError, std::string("bad plate pattern symbol '") + c + "'");
    }
  }
  return out;
}

BinaryImage prepare_glyph(const GrayImage& glyph, const GridSpec& grid, Polarity polarity) {
  const OtsuResult otsu = otsu_threshold(glyph);
  const BinaryImage bin = binarize(glyph, otsu.threshold, polarity);
  const std::vector<Component> comps = connected_components(bin);
  if (comps.empty()) throw Error(ErrorCode::kEmptyForeground, "glyph has no foreground");
  const auto largest = std::max_element(comps.begin(), comps.end(),
                                        [](const Component& a, const Component& b) { return a.area < b.area; });
  BinaryImage only(bin.width(), bin.height());
  for (int idx : largest->pixels) only.data()[static_cast<std::size_t>(idx)] = 1;
  return normalize_character(only, grid.width, grid.height);
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kOk: return "OK";
    case Status::kPlateNotFound: return "PLATE_NOT_FOUND";
    case Status::kSegmentationFailed: return "SEGMENTATION_FAILED";
    case Status::kPartial: return "PARTIAL";
  }
  return "?";
}

Status parse_status(std::string_view text) {
  for (Status s : {Status::kOk, Status::kPlateNotFound, Status::kSegmentationFailed, Status::kPartial}) {
    if (to_string(s) == text) return s;
  }
  parse_error("unknown status", text);
}

RecognitionReport recognize(const GrayImage& image, const PlateLocator& locator,
                            const ClassifierModel& model, const PipelineConfig& cfg) {
  RecognitionReport report;
  auto t0 = std::chrono::steady_clock::now();
  const std::vector<Keypoint> kps = extract_keypoints(image, cfg.sift);
  try {
    report.region = locator.locate(kps, image.width(), image.height());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kPlateNotFound) throw;
    report.timings.sift_match_ms = elapsed_ms(t0);
    report.status = Status::kPlateNotFound;
    return report;
  }
  report.timings.sift_match_ms = elapsed_ms(t0);

  t0 = std::chrono::steady_clock::now();
  const PlateRegion& region = *report.region;
  std::vector<CharBox> boxes;
  try {
    if (region.bbox.empty()) throw Error(ErrorCode::kSegmentationFailed, "empty plate window");
    const GrayImage plate = image.crop(region.bbox.x, region.bbox.y, region.bbox.width, region.bbox.height);
    const OtsuResult otsu = otsu_threshold(plate);
    const BinaryImage bin = binarize(plate, otsu.threshold, cfg.polarity);
    const Box seed{region.seed_bbox.x - region.bbox.x, region.seed_bbox.y - region.bbox.y,
                   region.seed_bbox.width, region.seed_bbox.height};
    boxes = clip_characters(bin, seed, cfg.clip);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSegmentationFailed && e.code() != ErrorCode::kDegenerateHistogram) throw;
    report.timings.segment_ms = elapsed_ms(t0);
    report.status = Status::kSegmentationFailed;
    return report;
  }
  report.timings.segment_ms = elapsed_ms(t0);

  t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> masks = pattern_classes(cfg.plate_pattern);
  const bool masked = !masks.empty() && masks.size() == boxes.size();
  bool noise = false;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const BinaryImage glyph = normalize_character(boxes[i].image, model.grid.width, model.grid.height);
    const Classification c = classify(glyph, model, masked ? std::string_view(masks[i]) : std::string_view());
    const Box& b = boxes[i].bbox;
    report.chars.push_back({{b.x + region.bbox.x, b.y + region.bbox.y, b.width, b.height}, c.label, c.rule});
    report.plate.push_back(c.label);
    noise = noise || c.rule == DecisionRule::kNoise;
  }
  report.timings.ocr_ms = elapsed_ms(t0);
  report.status = noise ? Status::kPartial : Status::kOk;
  return report;
}

std::string format_report_line(const RecognitionReport& report, bool with_timings) {
  std::string line = report.path;
  line += '\t';
  line += to_string(report.status);
  line += '\t';
  line += report.plate.empty() ? "-" : report.plate;
  line += '\t';
  if (with_timings) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "sift_match_ms=%.3f,segment_ms=%.3f,ocr_ms=%.3f", report.timings.sift_match_ms,
                  report.timings.segment_ms, report.timings.ocr_ms);
    line += buf;
  } else {
    line += '-';
  }
  return line;
}

RecognitionReport parse_report_line(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  const auto fields = split(line, '\t');
  if (fields.size() < 4) parse_error("report line needs 4 tab-separated fields", line);
  RecognitionReport r;
  r.path = std::string(fields[0]);
  r.status = parse_status(fields[1]);
  if (fields[2] != "-") r.plate = std::string(fields[2]);
  if (fields[3] != "-") {
    for (std::string_view kv : split(fields[3], ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) parse_error("bad timing", kv);
      const std::string_view key = kv.substr(0, eq);
      const double v = to_double(key, kv.substr(eq + 1));
      if (key == "sift_match_ms") r.timings.sift_match_ms = v;
      else if (key == "segment_ms") r.timings.segment_ms = v;
      else if (key == "ocr_ms") r.timings.ocr_ms = v;
      else parse_error("unknown timing", key);
    }
  }
  return r;
}

std::string normalize_plate(std::string_view plate) {
  std::string out;
  for (char c : plate) {
    if (c != '-' && c != ' ') out.push_back(c);
  }
  return out;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<ManifestEntry> out;
  std::size_t lineno = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (trim(raw).empty() || trim(raw).front() == '#') continue;
    const auto fields = split(raw, '\t');
    if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty()) {
      throw Error(ErrorCode::kParseError, "manifest line " + std::to_string(lineno) + ": expected path<TAB>plate");
    }
    std::filesystem::path p{std::string(trim(fields[0]))};
    if (p.is_relative()) p = base_dir / p;
    out.push_back({p, normalize_plate(trim(fields[1]))});
  }
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

CharScore score_plate(std::string_view recognized, std::string_view truth) {
  struct Cell {
    std::size_t correct = 0;
    std::size_t paired = 0;
    bool operator<(const Cell& o) const { return correct != o.correct ? correct < o.correct : paired < o.paired; }
  };
  const std::size_t n = recognized.size();
  const std::size_t m = truth.size();
  std::vector<Cell> dp((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> Cell& { return dp[i * (m + 1) + j]; };
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      Cell diag = at(i - 1, j - 1);
      diag.paired += 1;
      diag.correct += recognized[i - 1] == truth[j - 1] ? 1 : 0;
      at(i, j) = std::max({at(i - 1, j), at(i, j - 1), diag});
    }
  }
  return {m, at(n, m).paired, at(n, m).correct};
}

double EvalSummary::plate_rate() const { return images ? static_cast<double>(plates_ok) / images : 0.0; }
double EvalSummary::located_rate() const {
  return chars.truth ? static_cast<double>(chars.located) / chars.truth : 0.0;
}
double EvalSummary::recognition_rate() const {
  return chars.truth ? static_cast<double>(chars.recognized) / chars.truth : 0.0;
}

EvalSummary summarize(const std::vector<EvalRecord>& records) {
  EvalSummary s;
  s.images = records.size();
  for (const EvalRecord& r : records) {
    const CharScore c = score_plate(r.report.plate, r.truth);
    s.chars.truth += c.truth;
    s.chars.located += c.located;
    s.chars.recognized += c.recognized;
    if (r.report.plate == r.truth) ++s.plates_ok;
    s.mean.sift_match_ms += r.report.timings.sift_match_ms;
    s.mean.segment_ms += r.report.timings.segment_ms;
    s.mean.ocr_ms += r.report.timings.ocr_ms;
  }
  if (s.images > 0) {
    const double n = static_cast<double>(s.images);
    s.mean.sift_match_ms /= n;
    s.mean.segment_ms /= n;
    s.mean.ocr_ms /= n;
  }
  return s;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
  return buf;
}

std::vector<std::string> format_summary(const EvalSummary& s) {
  char buf[256];
  std::vector<std::string> out;
  std::snprintf(buf, sizeof buf, "summary\timages=%zu\tplates_ok=%zu\tplate_success=%s", s.images, s.plates_ok,
                format_percent(s.plate_rate()).c_str());
  out.emplace_back(buf);
  std::snprintf(buf, sizeof buf, "summary\tchars=%zu\tlocated=%zu\tlocated_rate=%s\trecognized=%zu\trecognition_rate=%s",
                s.chars.truth, s.chars.located, format_percent(s.located_rate()).c_str(), s.chars.recognized,
                format_percent(s.recognition_rate()).c_str());
  out.emplace_back(buf);
  std::snprintf(buf, sizeof buf, "summary\tmean_sift_match_ms=%.3f\tmean_segment_ms=%.3f\tmean_ocr_ms=%.3f\tmean_total_ms=%.3f",
                s.mean.sift_match_ms, s.mean.segment_ms, s.mean.ocr_ms, s.mean.total());
  out.emplace_back(buf);
  return out;
}

}  // namespace alprs
