#include "alprs/ocr.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>

#include "alprs/error.hpp"
#include "binio.hpp"

namespace alprs {

void validate(const GridSpec& grid) {
  if (grid.width < 2 || grid.height < 2) throw Error(ErrorCode::kInvalidArgument, "grid must be at least 2x2");
  if (grid.order != 2 && grid.order != 3) throw Error(ErrorCode::kInvalidArgument, "grid order must be 2 or 3");
}

std::string pattern_string(std::uint8_t pattern, int order) {
  std::string s(static_cast<std::size_t>(order), '0');
  for (int i = 0; i < order; ++i) {
    if ((pattern >> (order - 1 - i)) & 1U) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

std::vector<int> serpentine_path(int width, int height) {
  std::vector<int> path;
  path.reserve(static_cast<std::size_t>(width * height));
  for (int y = 0; y < height; ++y) {
    for (int i = 0; i < width; ++i) {
      const int x = (y % 2 == 0) ? i : width - 1 - i;
      path.push_back(y * width + x);
    }
  }
  return path;
}

TransitionVector transition_vector(const BinaryImage& img, const GridSpec& grid) {
  validate(grid);
  if (img.width() != grid.width || img.height() != grid.height) {
    throw Error(ErrorCode::kDimensionMismatch,
                "transition_vector: image " + std::to_string(img.width()) + "x" +
                    std::to_string(img.height()) + " vs grid " + std::to_string(grid.width) + "x" +
                    std::to_string(grid.height));
  }
  const auto path = serpentine_path(grid.width, grid.height);
  const std::size_t n = path.size();
  TransitionVector tv{grid, std::vector<std::uint8_t>(n)};
  for (std::size_t p = 0; p < n; ++p) {
    std::uint8_t pattern = 0;
    for (int k = 0; k < grid.order; ++k) {
      const int px = path[(p + static_cast<std::size_t>(k)) % n];
      pattern = static_cast<std::uint8_t>((pattern << 1) | (img.data()[static_cast<std::size_t>(px)] ? 1 : 0));
    }
    tv.values[p] = pattern;
  }
  return tv;
}

const ClassRuleSet* ClassifierModel::find(char label) const {
  for (const auto& c : classes) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

std::string all_plate_labels() {
  std::string s;
  for (char c = '0'; c <= '9'; ++c) s.push_back(c);
  for (char c = 'A'; c <= 'Z'; ++c) s.push_back(c);
  return s;
}

ClassifierModel train(std::span<const LabeledSample> samples, const GridSpec& grid,
                      std::string_view required_labels, double noise_fraction) {
  validate(grid);
  if (!(noise_fraction >= 0.0 && noise_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise_fraction must lie in [0, 1]");
  }
  const auto n = static_cast<std::size_t>(grid.positions());
  std::map<char, std::vector<std::uint8_t>> observed;
  for (const LabeledSample& s : samples) {
    const TransitionVector tv = transition_vector(s.image, grid);
    auto& seen = observed.try_emplace(s.label, n, std::uint8_t{0}).first->second;
    for (std::size_t p = 0; p < n; ++p) seen[p] |= static_cast<std::uint8_t>(1U << tv.values[p]);
  }
  for (char label : required_labels) {
    if (!observed.contains(label)) {
      throw Error(ErrorCode::kMissingClass, std::string("no training samples for class '") + label + "'");
    }
  }
  if (observed.empty()) throw Error(ErrorCode::kEmptyInput, "train: no samples");

  const auto all = static_cast<std::uint8_t>((1U << grid.alphabet_size()) - 1U);
  ClassifierModel model{grid, {}, noise_fraction};
  for (const auto& [label, seen] : observed) {
    ClassRuleSet rules{label, std::vector<std::uint8_t>(n), 0};
    for (std::size_t p = 0; p < n; ++p) {
      rules.forbidden[p] = static_cast<std::uint8_t>(all & ~seen[p]);
      rules.restriction_count += static_cast<std::size_t>(std::popcount(rules.forbidden[p]));
    }
    model.classes.push_back(std::move(rules));
  }
  return model;
}

std::size_t count_violations(const TransitionVector& tv, const ClassRuleSet& rules) {
  if (tv.values.size() != rules.forbidden.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "count_violations: length mismatch");
  }
  std::size_t count = 0;
  for (std::size_t p = 0; p < tv.values.size(); ++p) count += rules.is_forbidden(p, tv.values[p]) ? 1 : 0;
  return count;
}

Classification classify(const TransitionVector& tv, const ClassifierModel& model,
                        std::string_view allowed_labels) {
  const ClassRuleSet* r1_best = nullptr;
  const ClassRuleSet* r3_best = nullptr;
  double r3_ratio = std::numeric_limits<double>::infinity();
  std::size_t passing = 0;
  for (const ClassRuleSet& rules : model.classes) {
    if (!allowed_labels.empty() && allowed_labels.find(rules.label) == std::string_view::npos) continue;
    const std::size_t v = count_violations(tv, rules);
    if (v == 0) {
      ++passing;
      if (!r1_best || rules.restriction_count > r1_best->restriction_count) r1_best = &rules;
      continue;
    }
    const double ratio = static_cast<double>(v) / static_cast<double>(rules.restriction_count);
    if (ratio < r3_ratio) {
      r3_ratio = ratio;
      r3_best = &rules;
    }
  }
  if (r1_best) {
    return {r1_best->label, passing == 1 ? DecisionRule::kR1Unique : DecisionRule::kR2MostRestrictive, 0.0};
  }
  if (!r3_best || 1.0 - r3_ratio < model.noise_fraction) {
    return {kNoiseLabel, DecisionRule::kNoise, r3_ratio};
  }
  return {r3_best->label, DecisionRule::kR3LeastViolated, r3_ratio};
}

Classification classify(const BinaryImage& img, const ClassifierModel& model,
                        std::string_view allowed_labels) {
  return classify(transition_vector(img, model.grid), model, allowed_labels);
}

std::string serialize_model(const ClassifierModel& model) {
  binio::Writer w;
  w.bytes(kOcrModelMagic);
  w.u32(static_cast<std::uint32_t>(model.grid.width));
  w.u32(static_cast<std::uint32_t>(model.grid.height));
  w.u8(static_cast<std::uint8_t>(model.grid.order));
  w.f64(model.noise_fraction);
  w.u32(static_cast<std::uint32_t>(model.classes.size()));
  for (const ClassRuleSet& rules : model.classes) {
    w.u8(static_cast<std::uint8_t>(rules.label));
    w.bytes({reinterpret_cast<const char*>(rules.forbidden.data()), rules.forbidden.size()});
  }
  return std::move(w).finish();
}

ClassifierModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < kOcrModelMagic.size() || bytes.substr(0, kOcrModelMagic.size()) != kOcrModelMagic) {
    throw Error(ErrorCode::kNotOcrModel, "not an OCR model (bad magic bytes)");
  }
  binio::Reader r(bytes);
  r.bytes(kOcrModelMagic.size());
  ClassifierModel model;
  model.grid.width = static_cast<int>(r.u32());
  model.grid.height = static_cast<int>(r.u32());
  model.grid.order = r.u8();
  model.noise_fraction = r.f64();
  try {
    validate(model.grid);
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorruptFile, std::string("OCR model header: ") + e.what());
  }
  const std::uint32_t count = r.u32();
  const auto n = static_cast<std::size_t>(model.grid.positions());
  const auto all = static_cast<std::uint8_t>((1U << model.grid.alphabet_size()) - 1U);
  for (std::uint32_t c = 0; c < count; ++c) {
    ClassRuleSet rules;
    rules.label = static_cast<char>(r.u8());
    const auto raw = r.bytes(n);
    rules.forbidden.assign(raw.begin(), raw.end());
    for (std::uint8_t mask : rules.forbidden) {
      if (mask & ~all) throw Error(ErrorCode::kCorruptFile, "OCR model: pattern flag outside alphabet");
      rules.restriction_count += static_cast<std::size_t>(std::popcount(mask));
    }
    if (!model.classes.empty() && model.classes.back().label >= rules.label) {
      throw Error(ErrorCode::kCorruptFile, "OCR model: classes out of order");
    }
    model.classes.push_back(std::move(rules));
  }
  binio::verify_trailer(bytes, r);
  return model;
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
  binio::write_file(path, serialize_model(model));
}

ClassifierModel load_model(const std::filesystem::path& path) {
  try {
    return deserialize_model(binio::read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace alprs
