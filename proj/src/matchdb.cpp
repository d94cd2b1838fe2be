#include "alprs/matchdb.hpp"

#include <cmath>

#include "alprs/error.hpp"
#include "binio.hpp"

namespace alprs {

TemplateFeatureDB build_template_db(const std::map<char, GrayImage>& templates,
                                    const SiftConfig& cfg) {
  TemplateFeatureDB db;
  for (char d = '0'; d <= '9'; ++d) {
    const auto it = templates.find(d);
    if (it == templates.end()) {
      throw Error(ErrorCode::kMissingClass, std::string("missing template for digit '") + d + "'");
    }
    TemplateEntry entry;
    entry.label = d;
    entry.width = it->second.width();
    entry.height = it->second.height();
    entry.keypoints = extract_keypoints(it->second, cfg);
    db.entries.emplace(d, std::move(entry));
  }
  return db;
}

std::vector<char> templates_without_keypoints(const TemplateFeatureDB& db) {
  std::vector<char> out;
  for (const auto& [label, entry] : db.entries) {
    if (entry.keypoints.empty()) out.push_back(label);
  }
  return out;
}

std::string serialize_db(const TemplateFeatureDB& db) {
  binio::Writer w;
  w.bytes(kTemplateDbMagic);
  w.u32(db.format_version);
  w.u32(static_cast<std::uint32_t>(db.entries.size()));
  for (const auto& [label, entry] : db.entries) {
    w.u8(static_cast<std::uint8_t>(label));
    w.u32(static_cast<std::uint32_t>(entry.width));
    w.u32(static_cast<std::uint32_t>(entry.height));
    w.u32(static_cast<std::uint32_t>(entry.keypoints.size()));
    for (const Keypoint& kp : entry.keypoints) {
      w.f64(kp.x);
      w.f64(kp.y);
      w.f64(kp.sigma);
      w.f64(kp.theta);
      for (float v : kp.descriptor) w.f32(v);
    }
  }
  return std::move(w).finish();
}

TemplateFeatureDB deserialize_db(std::string_view bytes) {
  if (bytes.size() < kTemplateDbMagic.size() || bytes.substr(0, kTemplateDbMagic.size()) != kTemplateDbMagic) {
    throw Error(ErrorCode::kNotTemplateDb, "not a template DB (bad magic bytes)");
  }
  binio::Reader r(bytes);
  r.bytes(kTemplateDbMagic.size());
  TemplateFeatureDB db;
  db.format_version = r.u32();
  if (db.format_version != kTemplateDbVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "template DB version " + std::to_string(db.format_version) + ", expected " +
                    std::to_string(kTemplateDbVersion));
  }
  const std::uint32_t count = r.u32();
  constexpr std::size_t kKeypointBytes = 4 * 8 + kDescriptorSize * 4;
  for (std::uint32_t e = 0; e < count; ++e) {
    TemplateEntry entry;
    entry.label = static_cast<char>(r.u8());
    entry.width = static_cast<int>(r.u32());
    entry.height = static_cast<int>(r.u32());
    const std::uint32_t n = r.u32();
    if (r.remaining() / kKeypointBytes < n) throw Error(ErrorCode::kCorruptFile, "template DB truncated");
    entry.keypoints.resize(n);
    for (Keypoint& kp : entry.keypoints) {
      kp.x = r.f64();
      kp.y = r.f64();
      kp.sigma = r.f64();
      kp.theta = r.f64();
      for (float& v : kp.descriptor) v = r.f32();
    }
    if (!db.entries.emplace(entry.label, std::move(entry)).second) {
      throw Error(ErrorCode::kCorruptFile, "template DB: duplicate entry");
    }
  }
  binio::verify_trailer(bytes, r);
  for (char d = '0'; d <= '9'; ++d) {
    if (!db.entries.contains(d)) {
      throw Error(ErrorCode::kCorruptFile, std::string("template DB lacks digit '") + d + "'");
    }
  }
  if (db.entries.size() != 10) throw Error(ErrorCode::kCorruptFile, "template DB: unexpected entries");
  return db;
}

void save_db(const TemplateFeatureDB& db, const std::filesystem::path& path) {
  binio::write_file(path, serialize_db(db));
}

TemplateFeatureDB load_db(const std::filesystem::path& path) {
  try {
    return deserialize_db(binio::read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

KdIndex index_template(const TemplateEntry& entry) {
  std::vector<Descriptor> descriptors;
  descriptors.reserve(entry.keypoints.size());
  for (const Keypoint& kp : entry.keypoints) descriptors.push_back(kp.descriptor);
  return KdIndex(std::move(descriptors));
}

std::vector<Match> match_template(const TemplateEntry& entry, const KdIndex& template_index,
                                  std::span<const Keypoint> image_kps, double tau_match,
                                  int max_checks) {
  std::vector<Match> out;
  for (std::size_t i = 0; i < image_kps.size(); ++i) {
    const NeighborResult nn = template_index.nearest(image_kps[i].descriptor, max_checks);
    if (nn.distance <= tau_match) out.push_back({entry.label, nn.id, i, nn.distance});
  }
  return out;
}

std::vector<Match> match_template(const TemplateEntry& entry, std::span<const Keypoint> image_kps,
                                  double tau_match, int max_checks) {
  if (entry.keypoints.empty() || image_kps.empty()) return {};
  return match_template(entry, index_template(entry), image_kps, tau_match, max_checks);
}

}  // namespace alprs
