#pragma once

#include "foldlab/mask.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace foldlab {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

/// Packed 8-bit RGB raster, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;

    Rgb at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// Masks travel as binary graymaps (P5, maxval 255, pixels 0 or 255). On read,
// any nonzero pixel counts as set.
void write_pgm(std::ostream& out, const Mask& mask);
void write_pgm(const std::filesystem::path& path, const Mask& mask);
Mask read_pgm(std::istream& in);
Mask read_pgm(const std::filesystem::path& path);

void write_ppm(std::ostream& out, const RgbImage& image);
RgbImage read_ppm(std::istream& in);
RgbImage read_ppm(const std::filesystem::path& path);

/// Reads the two-byte magic without consuming the stream position.
std::string netpbm_magic(const std::filesystem::path& path);

} // namespace foldlab
