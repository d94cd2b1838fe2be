#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alprs/image.hpp"
#include "alprs/locator.hpp"
#include "alprs/ocr.hpp"
#include "alprs/segment.hpp"
#include "alprs/sift.hpp"

namespace alprs {

inline constexpr std::string_view kConfigEnvVar = "ALPRS_CONFIG";

struct PipelineConfig {
  SiftConfig sift;
  LocatorConfig locator;
  ClipConfig clip;
  GridSpec grid;                      // used when training
  double noise_fraction = kDefaultNoiseFraction;
  Polarity polarity = Polarity::kDarkInk;
  std::string plate_pattern;          // 'L' letter, 'N' digit, '?' any; '-' ignored; empty = off
};

void validate(const PipelineConfig& cfg);

/// Applies one `key = value` setting. Throws kParseError for unknown keys or bad values.
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Reads `key = value` lines; blank lines and lines starting with '#' are skipped.
void apply_config_text(PipelineConfig& cfg, std::string_view text);
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

/// Defaults overridden by the file named in ALPRS_CONFIG, if set.
PipelineConfig config_from_environment();

/// Grid syntax "65x60".
GridSpec parse_grid(std::string_view text, int order = 2);

/// Allowed labels per plate position, empty when the pattern is off.
std::vector<std::string> pattern_classes(std::string_view pattern);

/// Otsu, binarization, largest component, grid normalization: the training-side
/// preparation of a single cropped glyph.
BinaryImage prepare_glyph(const GrayImage& glyph, const GridSpec& grid, Polarity polarity);

enum class Status { kOk, kPlateNotFound, kSegmentationFailed, kPartial };

std::string_view to_string(Status status);
Status parse_status(std::string_view text);

struct Timings {
  double sift_match_ms = 0.0;
  double segment_ms = 0.0;
  double ocr_ms = 0.0;
  double total() const { return sift_match_ms + segment_ms + ocr_ms; }
};

struct CharResult {
  Box bbox;  // image coordinates
  char label = kNoiseLabel;
  DecisionRule rule = DecisionRule::kNoise;
};

struct RecognitionReport {
  std::string path;
  Status status = Status::kPlateNotFound;
  std::string plate;             // one character per accepted box, '?' for noise
  std::vector<CharResult> chars;
  std::optional<PlateRegion> region;
  Timings timings;
};

/// Runs locate, Otsu/binarize, clip, normalize and classify on one image.
/// The locator and model are only read, so one pair can serve many threads.
RecognitionReport recognize(const GrayImage& image, const PlateLocator& locator,
                            const ClassifierModel& model, const PipelineConfig& cfg);

/// `path<TAB>status<TAB>plate<TAB>timings`; an empty plate prints as "-". Timings are
/// `sift_match_ms=X,segment_ms=Y,ocr_ms=Z` with three decimals, or "-" when omitted.
std::string format_report_line(const RecognitionReport& report, bool with_timings = true);
RecognitionReport parse_report_line(std::string_view line);

// Evaluation.

struct ManifestEntry {
  std::filesystem::path path;
  std::string truth;  // separators removed
};

/// Rows `path<TAB>plate`; relative paths resolve against base_dir. Blank lines and
/// '#' comments are skipped. Throws kParseError on malformed rows.
std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::filesystem::path& base_dir);
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

/// Strips '-' and spaces from a ground-truth plate.
std::string normalize_plate(std::string_view plate);

struct CharScore {
  std::size_t truth = 0;       // ground-truth characters
  std::size_t located = 0;     // truth characters paired with a box
  std::size_t recognized = 0;  // paired and labelled correctly
};

/// Order-preserving alignment of the recognized string against the truth maximizing
/// correct labels, then paired boxes.
CharScore score_plate(std::string_view recognized, std::string_view truth);

struct EvalSummary {
  std::size_t images = 0;
  std::size_t plates_ok = 0;
  CharScore chars;
  Timings mean;

  double plate_rate() const;
  double located_rate() const;
  double recognition_rate() const;
};

struct EvalRecord {
  RecognitionReport report;
  std::string truth;
};

EvalSummary summarize(const std::vector<EvalRecord>& records);

/// Percentage with two decimals, e.g. "88.33%".
std::string format_percent(double fraction);

std::vector<std::string> format_summary(const EvalSummary& summary);

}  // namespace alprs
