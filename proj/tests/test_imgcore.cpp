#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "alprs/error.hpp"
#include "alprs/image.hpp"
#include "alprs/pnm.hpp"
#include "fixtures.hpp"

using namespace alprs;

namespace {

GrayImage read_string(const std::string& bytes) {
  std::istringstream in(bytes);
  return read_pnm(in);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an alprs::Error");
  return ErrorCode::kInvalidArgument;
}

// Direct 2-D convolution with a sampled, renormalized Gaussian and clamped borders.
GrayImage blur_oracle(const GrayImage& img, double sigma) {
  const int r = static_cast<int>(std::ceil(3 * sigma));
  GrayImage out(img.width(), img.height());
  double norm = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) norm += std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
  }
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          acc += std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma)) * img.clamped(x + dx, y + dy);
        }
      }
      out.at(x, y) = acc / norm;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("P2 file scales by maxval") {
  const GrayImage img = read_string("P2\n2 2\n255\n0 255\n255 0\n");
  REQUIRE(img.width() == 2);
  REQUIRE(img.height() == 2);
  CHECK(img.at(0, 0) == 0.0);
  CHECK(img.at(1, 0) == 1.0);
  CHECK(img.at(0, 1) == 1.0);
  CHECK(img.at(1, 1) == 0.0);
}

TEST_CASE("P6 white maps to one") {
  std::string bytes = "P6\n3 2\n255\n";
  bytes.append(3 * 2 * 3, static_cast<char>(255));
  const GrayImage img = read_string(bytes);
  for (double v : img.data()) CHECK(v == 1.0);
}

TEST_CASE("P3 red uses the luma weight") {
  const GrayImage img = read_string("P3\n1 1\n255\n255 0 0\n");
  CHECK(img.at(0, 0) == doctest::Approx(0.299).epsilon(1e-6));
}

TEST_CASE("header comments are skipped") {
  const GrayImage img = read_string("P2\n# made by hand\n2 # width\n1\n# max\n10\n5 10\n");
  CHECK(img.at(0, 0) == doctest::Approx(0.5));
  CHECK(img.at(1, 0) == 1.0);
}

TEST_CASE("16-bit P5 samples are big-endian") {
  std::string bytes = "P5\n1 1\n65535\n";
  bytes.push_back(static_cast<char>(0x80));
  bytes.push_back(static_cast<char>(0x00));
  CHECK(read_string(bytes).at(0, 0) == doctest::Approx(32768.0 / 65535.0));
}

TEST_CASE("load errors are distinct") {
  CHECK(code_of([] { load_image("/nonexistent/dir/none.pgm"); }) == ErrorCode::kFileNotFound);
  CHECK(code_of([] { read_string("P2\n2 x\n255\n"); }) == ErrorCode::kMalformedHeader);
  CHECK(code_of([] { read_string("P2\n2 2\n0\n"); }) == ErrorCode::kMalformedHeader);
  CHECK(code_of([] { read_string("P4\n1 1\n\x01"); }) == ErrorCode::kUnsupportedFormat);
  CHECK(code_of([] { read_string("GIF89a"); }) == ErrorCode::kUnsupportedFormat);
  CHECK(code_of([] { read_string("P5\n4 4\n255\nab"); }) == ErrorCode::kCorruptFile);
}

TEST_CASE("P5 load-save-load is bit exact") {
  fixtures::TempDir tmp("pnm");
  std::mt19937_64 rng(3);
  std::string bytes = "P5\n7 5\n255\n";
  for (int i = 0; i < 35; ++i) bytes.push_back(static_cast<char>(rng() & 0xFF));
  {
    std::ofstream f(tmp.path / "a.pgm", std::ios::binary);
    f << bytes;
  }
  const GrayImage first = load_image(tmp.path / "a.pgm");
  save_pgm(tmp.path / "b.pgm", first);
  const GrayImage second = load_image(tmp.path / "b.pgm");
  CHECK(first == second);
  std::ifstream f(tmp.path / "b.pgm", std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str().substr(ss.str().size() - 35) == bytes.substr(bytes.size() - 35));
}

TEST_CASE("blur keeps a constant image constant") {
  const GrayImage img(17, 9, 0.5);
  for (double sigma : {0.5, 1.0, 2.7}) {
    const GrayImage out = gaussian_blur(img, sigma);
    for (double v : out.data()) CHECK(v == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("blur of a single pixel is the pixel") {
  const GrayImage img(1, 1, 0.37);
  CHECK(gaussian_blur(img, 2.0).at(0, 0) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("blurred impulse peaks near 1/(2 pi)") {
  GrayImage img(21, 21, 0.0);
  img.at(10, 10) = 1.0;
  CHECK(std::abs(gaussian_blur(img, 1.0).at(10, 10) - 1.0 / (2 * std::numbers::pi)) <= 0.002);
}

TEST_CASE("separable blur equals the direct 2-D convolution") {
  std::mt19937_64 rng(11);
  const GrayImage img = fixtures::random_image(19, 13, rng);
  const GrayImage fast = gaussian_blur(img, 1.3);
  const GrayImage slow = blur_oracle(img, 1.3);
  for (std::size_t i = 0; i < fast.data().size(); ++i) CHECK(fast.data()[i] == doctest::Approx(slow.data()[i]).epsilon(1e-12));
}

TEST_CASE("blur rejects non-positive sigma") {
  const GrayImage img(4, 4, 0.1);
  CHECK(code_of([&] { gaussian_blur(img, 0.0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { gaussian_blur(img, -1.0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("property: blur cascade matches the combined sigma on the interior") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> us(0.6, 2.0);
    const double s1 = us(rng), s2 = us(rng);
    const GrayImage img = fixtures::blob_texture(64, 64, 40, seed);
    const GrayImage twice = gaussian_blur(gaussian_blur(img, s1), s2);
    const GrayImage once = gaussian_blur(img, std::hypot(s1, s2));
    const int margin = static_cast<int>(std::ceil(3 * std::max({s1, s2, std::hypot(s1, s2)})));
    double worst = 0.0;
    for (int y = margin; y < 64 - margin; ++y) {
      for (int x = margin; x < 64 - margin; ++x) worst = std::max(worst, std::abs(twice.at(x, y) - once.at(x, y)));
    }
    CHECK(worst <= 0.01);
  }
}

TEST_CASE("property: blur output stays in [0, 1]") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const GrayImage img = fixtures::random_image(15, 11, rng);
    const GrayImage out = gaussian_blur(img, 0.5 + trial * 0.3);
    for (double v : out.data()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("downsample keeps even pixels") {
  GrayImage checker(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) checker.at(x, y) = (x + y) % 2 == 0 ? 1.0 : 0.0;
  }
  const GrayImage half = downsample_half(checker);
  REQUIRE(half.width() == 2);
  REQUIRE(half.height() == 2);
  for (double v : half.data()) CHECK(v == 1.0);

  const GrayImage flat = downsample_half(GrayImage(8, 6, 0.25));
  CHECK(flat == GrayImage(4, 3, 0.25));

  const GrayImage odd = downsample_half(GrayImage(5, 3, 0.0));
  CHECK(odd.width() == 2);
  CHECK(odd.height() == 1);
  CHECK(code_of([] { downsample_half(GrayImage(1, 8)); }) == ErrorCode::kImageTooSmall);
}

TEST_CASE("subtract is per pixel") {
  const GrayImage a(3, 2, 0.4);
  const SignedImage zero = subtract(a, a);
  for (double v : zero.data) CHECK(v == 0.0);
  const SignedImage one = subtract(GrayImage(3, 2, 1.0), GrayImage(3, 2, 0.0));
  for (double v : one.data) CHECK(v == 1.0);
  CHECK(subtract(GrayImage(1, 1, 0.7), GrayImage(1, 1, 0.2)).at(0, 0) == doctest::Approx(0.5));
  CHECK(code_of([&] { subtract(a, GrayImage(2, 3)); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("box intersection") {
  CHECK(intersect({0, 0, 10, 10}, {5, 5, 10, 10}) == Box{5, 5, 5, 5});
  CHECK(intersect({0, 0, 4, 4}, {6, 6, 2, 2}).empty());
}
