#pragma once

#include <filesystem>
#include <iosfwd>

#include "alprs/image.hpp"

namespace alprs {

// Reads P2/P5 (gray) and P3/P6 (color, converted to luma 0.299R + 0.587G + 0.114B).
// Samples are scaled by 1/maxval; 16-bit binary samples are big-endian.
GrayImage load_image(const std::filesystem::path& path);
GrayImage read_pnm(std::istream& in);

// Writes a binary P5 file, quantizing each intensity to round(v * maxval).
void save_pgm(const std::filesystem::path& path, const GrayImage& img, int maxval = 255);
void write_pgm(std::ostream& out, const GrayImage& img, int maxval = 255);

}  // namespace alprs
