#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alprs/image.hpp"
#include "alprs/kdtree.hpp"
#include "alprs/sift.hpp"

namespace alprs {

inline constexpr std::uint32_t kTemplateDbVersion = 1;
inline constexpr std::string_view kTemplateDbMagic = "ALPRSDB1";
inline constexpr double kDefaultTauMatch = 0.35;
inline constexpr int kDefaultMaxChecks = 200;

struct TemplateEntry {
  char label = '0';
  int width = 0;
  int height = 0;
  std::vector<Keypoint> keypoints;

  friend bool operator==(const TemplateEntry&, const TemplateEntry&) = default;
};

/// SIFT features of the ten digit templates, computed once and persisted.
struct TemplateFeatureDB {
  std::uint32_t format_version = kTemplateDbVersion;
  std::map<char, TemplateEntry> entries;

  friend bool operator==(const TemplateFeatureDB&, const TemplateFeatureDB&) = default;
};

/// Throws kMissingClass unless every digit '0'..'9' is present. Templates that yield no
/// keypoints are kept with an empty list; see templates_without_keypoints().
TemplateFeatureDB build_template_db(const std::map<char, GrayImage>& templates,
                                    const SiftConfig& cfg = {});

std::vector<char> templates_without_keypoints(const TemplateFeatureDB& db);

// ALPRSDB1 layout, little-endian:
//   "ALPRSDB1" | u32 version | u32 entry count
//   per entry: u8 label | u32 width | u32 height | u32 keypoint count
//     per keypoint: f64 x, y, sigma, theta | 128 x f32 descriptor
//   u32 CRC32 of all preceding bytes
std::string serialize_db(const TemplateFeatureDB& db);
TemplateFeatureDB deserialize_db(std::string_view bytes);
void save_db(const TemplateFeatureDB& db, const std::filesystem::path& path);
TemplateFeatureDB load_db(const std::filesystem::path& path);

struct Match {
  char template_char = '0';
  std::size_t template_index = 0;  // into the template's keypoint list
  std::size_t image_index = 0;     // into the image keypoint list
  double distance = 0.0;
};

/// Each image keypoint adopts its BBF-nearest template keypoint; the pair is kept when
/// the descriptor distance is <= tau_match. At most one Match per image keypoint.
std::vector<Match> match_template(const TemplateEntry& entry, const KdIndex& template_index,
                                  std::span<const Keypoint> image_kps, double tau_match,
                                  int max_checks = kDefaultMaxChecks);

std::vector<Match> match_template(const TemplateEntry& entry, std::span<const Keypoint> image_kps,
                                  double tau_match, int max_checks = kDefaultMaxChecks);

KdIndex index_template(const TemplateEntry& entry);

}  // namespace alprs
