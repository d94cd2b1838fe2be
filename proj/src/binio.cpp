#include "binio.hpp"

#include <fstream>
#include <iterator>

#include <zlib.h>

namespace alprs::binio {

std::uint32_t crc32(std::string_view bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

std::string Writer::finish() && {
  u32(crc32(buf_));
  return std::move(buf_);
}

void verify_trailer(std::string_view data, Reader& reader) {
  const std::size_t body = reader.position();
  const std::uint32_t stored = reader.u32();
  if (reader.remaining() != 0) throw Error(ErrorCode::kCorruptFile, "trailing bytes after checksum");
  if (stored != crc32(data.substr(0, body))) {
    throw Error(ErrorCode::kChecksumMismatch, "CRC32 mismatch");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

}  // namespace alprs::binio
