#pragma once

// Little-endian byte buffers with a CRC32 trailer, shared by the on-disk formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

#include "alprs/error.hpp"

namespace alprs::binio {

static_assert(std::endian::native == std::endian::little, "formats assume a little-endian host");

std::uint32_t crc32(std::string_view bytes);

class Writer {
 public:
  void bytes(std::string_view s) { buf_.append(s); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void f32(float v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }

  /// Appends the CRC32 of everything written so far and returns the buffer.
  std::string finish() &&;

 private:
  void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  std::string buf_;
};

/// Bounds-checked reader; running past the end throws kCorruptFile.
class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(bytes(1)[0]); }
  std::uint32_t u32() { return pod<std::uint32_t>(); }
  float f32() { return pod<float>(); }
  double f64() { return pod<double>(); }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  template <typename T>
  T pod() {
    T v;
    std::memcpy(&v, bytes(sizeof(T)).data(), sizeof(T));
    return v;
  }
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(ErrorCode::kCorruptFile, "file truncated");
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

/// Verifies that exactly four bytes remain and that they hold the CRC32 of the rest.
void verify_trailer(std::string_view data, Reader& reader);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace alprs::binio
