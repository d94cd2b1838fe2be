#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alprs/image.hpp"

namespace alprs {

inline constexpr std::string_view kOcrModelMagic = "ALPRSOCR1";
inline constexpr double kDefaultNoiseFraction = 0.30;
inline constexpr char kNoiseLabel = '?';

/// Sampling grid of the transition classifier. order 2 compares pixel pairs, order 3 triples.
struct GridSpec {
  int width = 65;
  int height = 60;
  int order = 2;

  int positions() const noexcept { return width * height; }
  int alphabet_size() const noexcept { return 1 << order; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

void validate(const GridSpec& grid);

/// Formats a pattern as its bit string, most significant (earliest pixel) first: 2 -> "10".
std::string pattern_string(std::uint8_t pattern, int order);

/// Pixel visiting order: row 0 left to right, row 1 right to left, and so on.
std::vector<int> serpentine_path(int width, int height);

/// values[p] packs the pixels at path positions p, p+1 (, p+2), wrapping cyclically,
/// so a w x h grid gives exactly w*h values.
struct TransitionVector {
  GridSpec grid;
  std::vector<std::uint8_t> values;
};

TransitionVector transition_vector(const BinaryImage& img, const GridSpec& grid);

/// Patterns never observed per position for one class; bit k of forbidden[p] set means
/// pattern k is forbidden at p.
struct ClassRuleSet {
  char label = '0';
  std::vector<std::uint8_t> forbidden;
  std::size_t restriction_count = 0;

  bool is_forbidden(std::size_t position, std::uint8_t pattern) const {
    return (forbidden[position] >> pattern) & 1U;
  }

  friend bool operator==(const ClassRuleSet&, const ClassRuleSet&) = default;
};

struct ClassifierModel {
  GridSpec grid;
  std::vector<ClassRuleSet> classes;  // ascending by label
  double noise_fraction = kDefaultNoiseFraction;

  const ClassRuleSet* find(char label) const;

  friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;
};

struct LabeledSample {
  char label = '0';
  BinaryImage image;
};

/// The 36 labels '0'..'9', 'A'..'Z'.
std::string all_plate_labels();

/// Builds one rule set per label present in the samples. Every label listed in
/// required_labels must have at least one sample (kMissingClass otherwise).
ClassifierModel train(std::span<const LabeledSample> samples, const GridSpec& grid,
                      std::string_view required_labels = {},
                      double noise_fraction = kDefaultNoiseFraction);

/// Positions whose pattern is forbidden by the rule set.
std::size_t count_violations(const TransitionVector& tv, const ClassRuleSet& rules);

enum class DecisionRule { kR1Unique, kR2MostRestrictive, kR3LeastViolated, kNoise };

struct Classification {
  char label = kNoiseLabel;
  DecisionRule rule = DecisionRule::kNoise;
  double violation_ratio = 0.0;  // of the chosen class, or the minimum ratio for noise
};

/// R1: classes with zero violations are candidates. R2: among several, the one with the
/// most restrictions wins (ties: smallest label). R3: otherwise the class with the lowest
/// violations/restrictions ratio, unless fewer than noise_fraction of its restrictions
/// hold, in which case the glyph is noise. allowed_labels restricts the classes
/// considered; empty means all.
Classification classify(const BinaryImage& img, const ClassifierModel& model,
                        std::string_view allowed_labels = {});
Classification classify(const TransitionVector& tv, const ClassifierModel& model,
                        std::string_view allowed_labels = {});

// ALPRSOCR1 layout, little-endian:
//   "ALPRSOCR1" | u32 grid_w | u32 grid_h | u8 order | f64 noise_fraction | u32 class count
//   per class: u8 label | grid_w*grid_h bytes, low 2^order bits = forbidden flags
//   u32 CRC32 of all preceding bytes
std::string serialize_model(const ClassifierModel& model);
ClassifierModel deserialize_model(std::string_view bytes);
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

}  // namespace alprs
