#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <random>
#include <set>

#include "alprs/error.hpp"
#include "alprs/ocr.hpp"
#include "alprs/segment.hpp"
#include "alprs/synth.hpp"
#include "fixtures.hpp"

using namespace alprs;
using fixtures::grid_image;

namespace {

const GridSpec kTinyGrid{4, 3, 2};

// Patterns as strings read straight off the pixel rows, walking the serpentine by hand.
std::vector<std::string> pattern_oracle(const std::vector<std::string>& rows, int order) {
  std::string walk;
  for (std::size_t y = 0; y < rows.size(); ++y) {
    std::string row = rows[y];
    if (y % 2 == 1) row.assign(row.rbegin(), row.rend());
    walk += row;
  }
  std::vector<std::string> out;
  for (std::size_t p = 0; p < walk.size(); ++p) {
    std::string s;
    for (int k = 0; k < order; ++k) s.push_back(walk[(p + static_cast<std::size_t>(k)) % walk.size()]);
    out.push_back(s);
  }
  return out;
}

std::set<std::string> seen_at(const ClassRuleSet& rules, std::size_t p, int order) {
  std::set<std::string> out;
  for (int k = 0; k < (1 << order); ++k) {
    if (!rules.is_forbidden(p, static_cast<std::uint8_t>(k))) out.insert(pattern_string(static_cast<std::uint8_t>(k), order));
  }
  return out;
}

ClassifierModel ac_model() {
  const std::vector<LabeledSample> samples{{'A', fixtures::glyph_a1()}, {'A', fixtures::glyph_a2()},
                                           {'C', fixtures::glyph_c1()}, {'C', fixtures::glyph_c2()}};
  return train(samples, kTinyGrid);
}

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

BinaryImage random_binary(int w, int h, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution b(p);
  BinaryImage img(w, h);
  for (auto& v : img.data()) v = b(rng) ? 1 : 0;
  return img;
}

BinaryImage glyph_sample(char c, std::mt19937_64& rng, const GridSpec& grid) {
  const GrayImage g = synth::render_sample(c, rng);
  const BinaryImage bin = binarize(g, otsu_threshold(g).threshold, Polarity::kDarkInk);
  std::size_t best = 0;
  const auto comps = connected_components(bin);
  for (std::size_t i = 1; i < comps.size(); ++i) {
    if (comps[i].area > comps[best].area) best = i;
  }
  BinaryImage only(bin.width(), bin.height());
  for (int idx : comps[best].pixels) only.data()[static_cast<std::size_t>(idx)] = 1;
  return normalize_character(only, grid.width, grid.height);
}

}  // namespace

TEST_CASE("pattern strings") {
  CHECK(pattern_string(0, 2) == "00");
  CHECK(pattern_string(1, 2) == "01");
  CHECK(pattern_string(2, 2) == "10");
  CHECK(pattern_string(3, 2) == "11");
  CHECK(pattern_string(6, 3) == "110");
}

TEST_CASE("serpentine path") {
  CHECK(serpentine_path(3, 2) == std::vector<int>{0, 1, 2, 5, 4, 3});
  CHECK(serpentine_path(2, 3) == std::vector<int>{0, 1, 3, 2, 4, 5});
}

TEST_CASE("transition vector on a 2x2 grid") {
  const TransitionVector tv = transition_vector(grid_image({"10", "01"}), {2, 2, 2});
  // walk 1,0,1,0 then wraps to the start
  CHECK(tv.values == std::vector<std::uint8_t>{2, 1, 2, 1});
  const TransitionVector t3 = transition_vector(grid_image({"11", "00"}), {2, 2, 3});
  // walk 1,1,0,0
  CHECK(t3.values == std::vector<std::uint8_t>{6, 4, 1, 3});
}

TEST_CASE("transition vector lengths") {
  CHECK(transition_vector(BinaryImage(65, 60), {65, 60, 2}).values.size() == 3900);
  CHECK(transition_vector(BinaryImage(50, 30), {50, 30, 3}).values.size() == 1500);
  GridSpec g3{65, 60, 3};
  CHECK(g3.alphabet_size() == 8);
  CHECK(error_of([] { transition_vector(BinaryImage(4, 4), {5, 4, 2}); }) == ErrorCode::kDimensionMismatch);
  CHECK(error_of([] { validate(GridSpec{4, 4, 4}); }) == ErrorCode::kInvalidArgument);
  CHECK(error_of([] { validate(GridSpec{1, 4, 2}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("property: transition vectors match the hand-walked oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> d(2, 9);
    const int w = d(rng), h = d(rng), order = 2 + trial % 2;
    const BinaryImage img = random_binary(w, h, 0.5, rng);
    std::vector<std::string> rows;
    for (int y = 0; y < h; ++y) {
      std::string r;
      for (int x = 0; x < w; ++x) r.push_back(img.at(x, y) ? '1' : '0');
      rows.push_back(r);
    }
    const auto expected = pattern_oracle(rows, order);
    const TransitionVector tv = transition_vector(img, {w, h, order});
    REQUIRE(tv.values.size() == expected.size());
    for (std::size_t p = 0; p < expected.size(); ++p) CHECK(pattern_string(tv.values[p], order) == expected[p]);
  }
}

TEST_CASE("A and C glyphs: observed transitions between the third and fourth pixels") {
  const ClassifierModel m = ac_model();
  CHECK(seen_at(*m.find('A'), 2, 2) == std::set<std::string>{"01", "11"});
  CHECK(seen_at(*m.find('C'), 2, 2) == std::set<std::string>{"10"});
  std::set<std::string> forbidden_a, forbidden_c;
  for (std::uint8_t k = 0; k < 4; ++k) {
    if (m.find('A')->is_forbidden(2, k)) forbidden_a.insert(pattern_string(k, 2));
    if (m.find('C')->is_forbidden(2, k)) forbidden_c.insert(pattern_string(k, 2));
  }
  CHECK(forbidden_a == std::set<std::string>{"00", "10"});
  CHECK(forbidden_c == std::set<std::string>{"00", "01", "11"});
}

TEST_CASE("A and C glyphs: restriction counts") {
  const ClassifierModel m = ac_model();
  CHECK(m.find('A')->restriction_count == 30);
  CHECK(m.find('C')->restriction_count == 31);
}

TEST_CASE("A and C glyphs: training samples classify as their own class") {
  const ClassifierModel m = ac_model();
  for (const auto& [label, img] : {std::pair{'A', fixtures::glyph_a1()}, std::pair{'A', fixtures::glyph_a2()},
                                   std::pair{'C', fixtures::glyph_c1()}, std::pair{'C', fixtures::glyph_c2()}}) {
    const Classification c = classify(img, m);
    CHECK(c.label == label);
    CHECK(c.rule == DecisionRule::kR1Unique);
  }
}

TEST_CASE("A and C glyphs: each class violates the other's rules") {
  const ClassifierModel m = ac_model();
  const TransitionVector a = transition_vector(fixtures::glyph_a1(), kTinyGrid);
  const TransitionVector c = transition_vector(fixtures::glyph_c1(), kTinyGrid);
  CHECK(count_violations(a, *m.find('C')) > 0);
  CHECK(count_violations(c, *m.find('A')) > 0);
  CHECK(count_violations(a, *m.find('A')) == 0);
  CHECK(count_violations(c, *m.find('C')) == 0);
}

TEST_CASE("A and C glyphs: no 4x3 image satisfies both classes") {
  // Position 2 allows {01, 11} for A and only {10} for C, so R2 can never choose between them.
  const ClassifierModel m = ac_model();
  int both = 0;
  for (int bits = 0; bits < (1 << 12); ++bits) {
    BinaryImage img(4, 3);
    for (int i = 0; i < 12; ++i) img.data()[static_cast<std::size_t>(i)] = (bits >> i) & 1;
    const TransitionVector tv = transition_vector(img, kTinyGrid);
    both += count_violations(tv, *m.find('A')) == 0 && count_violations(tv, *m.find('C')) == 0 ? 1 : 0;
  }
  CHECK(both == 0);
}

TEST_CASE("restriction counts equal the popcount of the forbidden masks") {
  const ClassifierModel m = ac_model();
  for (const ClassRuleSet& r : m.classes) {
    std::size_t n = 0;
    for (std::uint8_t f : r.forbidden) n += static_cast<std::size_t>(std::popcount(f));
    CHECK(n == r.restriction_count);
  }
}

TEST_CASE("a single sample forbids all but one pattern everywhere") {
  std::mt19937_64 rng(3);
  for (int order : {2, 3}) {
    const std::vector<LabeledSample> s{{'Q', random_binary(6, 5, 0.5, rng)}};
    const ClassifierModel m = train(s, {6, 5, order});
    CHECK(m.classes[0].restriction_count == 30u * static_cast<std::size_t>((1 << order) - 1));
  }
}

TEST_CASE("R2 picks the most restrictive of several passing classes") {
  ClassifierModel m;
  m.grid = {2, 2, 2};
  m.classes = {{'1', {0, 0, 0, 0}, 0}, {'7', {1, 1, 0, 0}, 2}, {'9', {1, 0, 0, 0}, 1}};
  const TransitionVector tv{m.grid, {2, 2, 3, 3}};
  const Classification c = classify(tv, m);
  CHECK(c.label == '7');
  CHECK(c.rule == DecisionRule::kR2MostRestrictive);
  CHECK(classify(tv, m, "19").label == '9');
  CHECK(classify(tv, m, "1").rule == DecisionRule::kR1Unique);

  // Equal restriction counts: the smaller label wins.
  m.classes = {{'2', {1, 0, 0, 0}, 1}, {'5', {0, 1, 0, 0}, 1}};
  CHECK(classify(tv, m).label == '2');
}

TEST_CASE("R3 picks the lowest violation ratio, or noise") {
  ClassifierModel m;
  m.grid = {2, 2, 2};
  m.noise_fraction = 0.3;
  // Class 'A' forbids the observed pattern at one of four restrictions; 'B' at two of three.
  m.classes = {{'A', {0x4, 0x1, 0x1, 0x1}, 4}, {'B', {0x4, 0x4, 0x1, 0x0}, 3}};
  const TransitionVector tv{m.grid, {2, 2, 2, 2}};
  CHECK(count_violations(tv, m.classes[0]) == 1);
  CHECK(count_violations(tv, m.classes[1]) == 2);
  Classification c = classify(tv, m);
  CHECK(c.label == 'A');
  CHECK(c.rule == DecisionRule::kR3LeastViolated);
  CHECK(c.violation_ratio == doctest::Approx(0.25));

  m.noise_fraction = 0.8;
  c = classify(tv, m);
  CHECK(c.label == kNoiseLabel);
  CHECK(c.rule == DecisionRule::kNoise);

  // Exactly the threshold still counts as recognized.
  m.noise_fraction = 0.75;
  CHECK(classify(tv, m).label == 'A');
  CHECK(classify(tv, m, "Z").label == kNoiseLabel);
}

TEST_CASE("rendered glyphs recognize and random noise does not") {
  const GridSpec grid{65, 60, 2};
  std::mt19937_64 rng(4);
  std::vector<LabeledSample> samples;
  const std::string labels = all_plate_labels();
  for (char c : labels) {
    for (int i = 0; i < 8; ++i) samples.push_back({c, glyph_sample(c, rng, grid)});
  }
  const ClassifierModel m = train(samples, grid, labels);
  CHECK(m.classes.size() == 36);

  int correct = 0, total = 0;
  for (char c : labels) {
    for (int i = 0; i < 3; ++i) {
      correct += classify(glyph_sample(c, rng, grid), m).label == c ? 1 : 0;
      ++total;
    }
  }
  CHECK(correct >= total * 9 / 10);

  // Uniform noise hits a forbidden pattern with probability |forbidden| / |alphabet|, so it
  // violates about a quarter of each class's restrictions.
  ClassifierModel strict = m;
  strict.noise_fraction = 0.9;
  for (int i = 0; i < 10; ++i) {
    const BinaryImage noise = random_binary(65, 60, 0.5, rng);
    const Classification c = classify(noise, m);
    CHECK((c.rule == DecisionRule::kR3LeastViolated || c.rule == DecisionRule::kNoise));
    CHECK(c.violation_ratio > 0.1);
    CHECK(classify(noise, strict).label == kNoiseLabel);
  }
}

TEST_CASE("images violating over 70% of every class's restrictions are noise") {
  std::mt19937_64 rng(7);
  const GridSpec grid{3, 2, 2};
  ClassifierModel m;
  m.grid = grid;
  // Both classes forbid the patterns of a hidden image; 'R' also forbids a second pattern once.
  const TransitionVector hidden = transition_vector(grid_image({"110", "010"}), grid);
  for (char label : {'P', 'R'}) {
    ClassRuleSet r{label, std::vector<std::uint8_t>(6), 6};
    for (std::size_t p = 0; p < 6; ++p) r.forbidden[p] = static_cast<std::uint8_t>(1U << hidden.values[p]);
    if (label == 'R') {
      r.forbidden[3] |= static_cast<std::uint8_t>(1U << ((hidden.values[3] + 1) % 4));
      r.restriction_count = 7;
    }
    m.classes.push_back(r);
  }
  int found = 0;
  for (int attempt = 0; attempt < 200000 && found < 5; ++attempt) {
    const BinaryImage img = random_binary(3, 2, 0.5, rng);
    std::vector<std::string> rows(2);
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 3; ++x) rows[static_cast<std::size_t>(y)].push_back(img.at(x, y) ? '1' : '0');
    }
    const auto patterns = pattern_oracle(rows, 2);
    bool all_high = true;
    for (const ClassRuleSet& r : m.classes) {
      int violated = 0;
      for (std::size_t p = 0; p < 6; ++p) violated += seen_at(r, p, 2).contains(patterns[p]) ? 0 : 1;
      all_high = all_high && violated > 0.7 * 6;
    }
    if (!all_high) continue;
    ++found;
    CHECK(classify(img, m).label == kNoiseLabel);
  }
  CHECK(found > 0);
}

TEST_CASE("property: more samples never add restrictions") {
  std::mt19937_64 rng(5);
  const GridSpec grid{7, 6, 3};
  std::vector<LabeledSample> samples;
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (int i = 0; i < 12; ++i) {
    samples.push_back({'K', random_binary(7, 6, 0.4, rng)});
    const ClassifierModel m = train(samples, grid);
    CHECK(m.classes[0].restriction_count <= prev);
    prev = m.classes[0].restriction_count;
    for (const LabeledSample& s : samples) CHECK(classify(s.image, m).rule != DecisionRule::kNoise);
  }
}

TEST_CASE("property: training is deterministic and order independent") {
  std::mt19937_64 rng(6);
  std::vector<LabeledSample> samples;
  for (int i = 0; i < 20; ++i) samples.push_back({static_cast<char>('A' + i % 3), random_binary(5, 5, 0.5, rng)});
  const ClassifierModel a = train(samples, {5, 5, 2});
  std::shuffle(samples.begin(), samples.end(), rng);
  CHECK(train(samples, {5, 5, 2}) == a);
  CHECK(serialize_model(train(samples, {5, 5, 2})) == serialize_model(a));
}

TEST_CASE("training errors") {
  const std::vector<LabeledSample> s{{'A', fixtures::glyph_a1()}};
  CHECK(error_of([&] { train(s, kTinyGrid, "AB"); }) == ErrorCode::kMissingClass);
  CHECK(error_of([] { train({}, kTinyGrid); }) == ErrorCode::kEmptyInput);
  CHECK(error_of([&] { train(s, kTinyGrid, {}, 1.5); }) == ErrorCode::kInvalidArgument);
  CHECK(error_of([&] { train(s, {5, 3, 2}); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("model round-trip and load errors") {
  const ClassifierModel m = ac_model();
  const std::string bytes = serialize_model(m);
  CHECK(bytes.substr(0, 9) == "ALPRSOCR1");
  CHECK(bytes.size() == 9 + 4 + 4 + 1 + 8 + 4 + 2 * (1 + 12) + 4);
  CHECK(deserialize_model(bytes) == m);

  fixtures::TempDir tmp("ocr");
  save_model(m, tmp.path / "m.ocr");
  CHECK(load_model(tmp.path / "m.ocr") == m);

  std::string bad = bytes;
  bad[0] = 'X';
  CHECK(error_of([&] { deserialize_model(bad); }) == ErrorCode::kNotOcrModel);
  CHECK(error_of([&] { deserialize_model(bytes.substr(0, 20)); }) == ErrorCode::kCorruptFile);
  bad = bytes;
  bad[30] ^= 0x01;
  CHECK(error_of([&] { deserialize_model(bad); }) == ErrorCode::kChecksumMismatch);
  CHECK(error_of([&] { load_model(tmp.path / "missing.ocr"); }) != ErrorCode::kNotOcrModel);
}
