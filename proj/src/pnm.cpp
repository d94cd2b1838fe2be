#include "alprs/pnm.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "alprs/error.hpp"

namespace alprs {
namespace {

void skip_whitespace_and_comments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_header_int(std::istream& in, const char* what) {
  skip_whitespace_and_comments(in);
  if (!std::isdigit(in.peek())) {
    throw Error(ErrorCode::kMalformedHeader, std::string("PNM header: expected ") + what);
  }
  long value = 0;
  while (std::isdigit(in.peek())) {
    value = value * 10 + (in.get() - '0');
    if (value > (1L << 30)) {
      throw Error(ErrorCode::kMalformedHeader, std::string("PNM header: ") + what + " too large");
    }
  }
  return static_cast<int>(value);
}

int read_ascii_sample(std::istream& in, int maxval) {
  skip_whitespace_and_comments(in);
  if (in.peek() == EOF) throw Error(ErrorCode::kCorruptFile, "PNM: truncated pixel data");
  if (!std::isdigit(in.peek())) throw Error(ErrorCode::kCorruptFile, "PNM: bad ASCII sample");
  long v = 0;
  while (std::isdigit(in.peek())) v = v * 10 + (in.get() - '0');
  if (v > maxval) throw Error(ErrorCode::kCorruptFile, "PNM: sample exceeds maxval");
  return static_cast<int>(v);
}

int read_binary_sample(std::istream& in, bool wide) {
  unsigned char bytes[2] = {0, 0};
  in.read(reinterpret_cast<char*>(bytes), wide ? 2 : 1);
  if (!in) throw Error(ErrorCode::kCorruptFile, "PNM: truncated pixel data");
  return wide ? (bytes[0] << 8) | bytes[1] : bytes[0];
}

}  // namespace

GrayImage read_pnm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in) throw Error(ErrorCode::kMalformedHeader, "PNM: missing magic number");
  if (magic[0] != 'P') throw Error(ErrorCode::kUnsupportedFormat, "PNM: not a PNM file");
  const char kind = magic[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
    throw Error(ErrorCode::kUnsupportedFormat,
                std::string("PNM: unsupported magic number P") + kind);
  }
  const int width = read_header_int(in, "width");
  const int height = read_header_int(in, "height");
  const int maxval = read_header_int(in, "maxval");
  if (width < 1 || height < 1) throw Error(ErrorCode::kMalformedHeader, "PNM: zero dimension");
  if (maxval < 1 || maxval > 65535) throw Error(ErrorCode::kMalformedHeader, "PNM: bad maxval");

  const bool ascii = (kind == '2' || kind == '3');
  const bool color = (kind == '3' || kind == '6');
  const bool wide = maxval > 255;
  if (!ascii) {
    // Exactly one whitespace byte separates the header from the raster.
    if (!std::isspace(in.get())) throw Error(ErrorCode::kMalformedHeader, "PNM: bad header end");
  }

  auto sample = [&]() -> std::int64_t {
    const int v = ascii ? read_ascii_sample(in, maxval) : read_binary_sample(in, wide);
    if (v > maxval) throw Error(ErrorCode::kCorruptFile, "PNM: sample exceeds maxval");
    return v;
  };

  GrayImage img(width, height);
  for (auto& px : img.data()) {
    if (color) {
      const std::int64_t r = sample();
      const std::int64_t g = sample();
      const std::int64_t b = sample();
      // Luma 0.299 R + 0.587 G + 0.114 B in integer thousandths.
      px = static_cast<double>(299 * r + 587 * g + 114 * b) / (1000.0 * maxval);
    } else {
      px = static_cast<double>(sample()) / maxval;
    }
  }
  return img;
}

GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound, "cannot open image: " + path.string());
  }
  try {
    return read_pnm(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_pgm(std::ostream& out, const GrayImage& img, int maxval) {
  if (maxval < 1 || maxval > 65535) throw Error(ErrorCode::kInvalidArgument, "bad maxval");
  out << "P5\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
  const bool wide = maxval > 255;
  std::string raster;
  raster.reserve(img.data().size() * (wide ? 2 : 1));
  for (double v : img.data()) {
    const auto q = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
    if (wide) raster.push_back(static_cast<char>(q >> 8));
    raster.push_back(static_cast<char>(q & 0xFF));
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
}

void save_pgm(const std::filesystem::path& path, const GrayImage& img, int maxval) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write image: " + path.string());
  write_pgm(out, img, maxval);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

}  // namespace alprs
