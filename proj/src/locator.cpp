#include "alprs/locator.hpp"

#include <algorithm>
#include <cmath>

#include "alprs/error.hpp"

namespace alprs {
namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double circular_difference(double a, double b) { return std::abs(wrap_angle(a - b)); }

bool within(const Point2& a, const Point2& b, double h) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy <= h * h;
}

}  // namespace

std::vector<MatchPair> filter_by_orientation(std::span<const MatchPair> pairs) {
  std::vector<MatchPair> out;
  for (const MatchPair& p : pairs) {
    if (circular_difference(p.template_theta, p.image_theta) <= kMaxRotation) out.push_back(p);
  }
  return out;
}

DensityResult offset_density(std::span<const MatchPair> pairs, const DensityConfig& cfg) {
  if (!(cfg.h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "density bandwidth h must be > 0");
  DensityResult result;
  if (pairs.empty()) return result;

  std::vector<Point2> offsets;
  offsets.reserve(pairs.size());
  for (const MatchPair& p : pairs) offsets.push_back(p.offset());

  // Sum of square-wave influences; the 1/(m h^n) factor does not move the argmax.
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    std::size_t density = 0;
    for (const Point2& q : offsets) density += within(offsets[i], q, cfg.h) ? 1 : 0;
    if (density > result.density) {
      result.density = density;
      result.anchor_index = i;
    }
  }
  result.anchor = offsets[result.anchor_index];
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (within(offsets[i], result.anchor, cfg.h)) result.inliers.push_back(pairs[i]);
  }
  return result;
}

std::vector<MatchPair> offset_density_inliers(std::span<const MatchPair> pairs,
                                              const DensityConfig& cfg) {
  return offset_density(pairs, cfg).inliers;
}

std::vector<MatchPair> to_match_pairs(std::span<const Match> matches, const TemplateEntry& entry,
                                      std::span<const Keypoint> image_kps) {
  std::vector<MatchPair> out;
  out.reserve(matches.size());
  for (const Match& m : matches) {
    const Keypoint& t = entry.keypoints.at(m.template_index);
    const Keypoint& i = image_kps[m.image_index];
    out.push_back({entry.label, {t.x, t.y}, t.theta, {i.x, i.y}, i.theta, m.template_index,
                   m.image_index});
  }
  return out;
}

PlateLocator::PlateLocator(const TemplateFeatureDB& db, LocatorConfig cfg)
    : db_(db), cfg_(cfg) {
  if (!(cfg_.tau_match >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau_match must be >= 0");
  if (cfg_.max_checks < 1) throw Error(ErrorCode::kInvalidArgument, "max_checks must be >= 1");
  if (!(cfg_.density.h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "density h must be > 0");
  if (!(cfg_.window.width_ratio > 0.0) || !(cfg_.window.height_ratio > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "plate window ratios must be > 0");
  }
  for (char d = '0'; d <= '9'; ++d) {
    const auto it = db_.entries.find(d);
    if (it == db_.entries.end()) {
      throw Error(ErrorCode::kMissingClass, std::string("template DB lacks digit '") + d + "'");
    }
    if (it->second.keypoints.empty()) {
      indices_.emplace_back(std::nullopt);
    } else {
      indices_.emplace_back(index_template(it->second));
    }
  }
}

PlateRegion PlateLocator::locate(std::span<const Keypoint> image_kps, int image_width,
                                 int image_height) const {
  PlateRegion region;
  std::vector<MatchPair> pooled;
  std::size_t total_matches = 0;
  int best_digit = -1;
  std::vector<MatchPair> best_inliers;

  for (int d = 0; d < 10; ++d) {
    const auto& index = indices_[static_cast<std::size_t>(d)];
    if (!index || image_kps.empty()) continue;
    const TemplateEntry& entry = db_.entries.at(static_cast<char>('0' + d));
    const auto matches = match_template(entry, *index, image_kps, cfg_.tau_match, cfg_.max_checks);
    total_matches += matches.size();
    const auto candidates = filter_by_orientation(to_match_pairs(matches, entry, image_kps));
    auto inliers = offset_density_inliers(candidates, cfg_.density);
    region.inlier_counts[static_cast<std::size_t>(d)] = inliers.size();
    if (inliers.size() >= kMinInliers && inliers.size() > best_inliers.size()) {
      best_digit = d;
      best_inliers = std::move(inliers);
    }
    pooled.insert(pooled.end(), candidates.begin(), candidates.end());
  }

  if (total_matches == 0) throw Error(ErrorCode::kPlateNotFound, "plate not found: no template matches");

  if (best_digit >= 0) {
    region.seed_char = static_cast<char>('0' + best_digit);
    region.inliers = std::move(best_inliers);
  } else {
    if (pooled.empty()) {
      throw Error(ErrorCode::kPlateNotFound, "plate not found: no orientation-consistent matches");
    }
    region.fallback = true;
    region.inliers = offset_density_inliers(pooled, cfg_.density);
    std::array<std::size_t, 10> votes{};
    for (const MatchPair& p : region.inliers) ++votes[static_cast<std::size_t>(p.template_char - '0')];
    region.seed_char = static_cast<char>('0' + (std::max_element(votes.begin(), votes.end()) - votes.begin()));
  }

  std::vector<double> dx;
  std::vector<double> dy;
  for (const MatchPair& p : region.inliers) {
    dx.push_back(p.offset().x);
    dy.push_back(p.offset().y);
  }
  region.translation = {median(dx), median(dy)};

  const TemplateEntry& seed = db_.entries.at(region.seed_char);
  region.seed_bbox = {static_cast<int>(std::lround(region.translation.x)),
                      static_cast<int>(std::lround(region.translation.y)), seed.width, seed.height};

  const double cx = region.translation.x + seed.width / 2.0;
  const double cy = region.translation.y + seed.height / 2.0;
  const double ww = cfg_.window.width_ratio * seed.width;
  const double wh = cfg_.window.height_ratio * seed.height;
  const Box window{static_cast<int>(std::lround(cx - ww / 2.0)),
                   static_cast<int>(std::lround(cy - wh / 2.0)),
                   static_cast<int>(std::lround(ww)), static_cast<int>(std::lround(wh))};
  region.bbox = intersect(window, Box{0, 0, image_width, image_height});
  if (region.bbox.empty()) throw Error(ErrorCode::kPlateNotFound, "plate window falls outside the image");
  return region;
}

PlateRegion locate_plate(std::span<const Keypoint> image_kps, const TemplateFeatureDB& db,
                         const LocatorConfig& cfg, int image_width, int image_height) {
  return PlateLocator(db, cfg).locate(image_kps, image_width, image_height);
}

}  // namespace alprs
