#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "gazelab/raster.hpp"

namespace gazelab {

class ImageIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a stimulus (PNG, JPEG, PGM or PPM). Alpha is dropped, palettes are
/// expanded, and gray+alpha becomes single channel. Intensities end up in [0,1].
Image read_image(const std::filesystem::path& path);

/// Single-channel raster with integer samples, as stored on disk.
struct GrayRaster {
    int width = 0;
    int height = 0;
    std::uint32_t maxval = 0;
    std::vector<std::uint16_t> samples;
};

/// Reads a 16-bit grayscale map: binary PGM (P5, maxval 65535) or 16-bit PNG.
GrayRaster read_gray16(const std::filesystem::path& path);

void write_pgm16(const std::filesystem::path& path, const GrayRaster& raster);
void write_pgm8(const std::filesystem::path& path, const Image& gray);
void write_ppm8(const std::filesystem::path& path, const Image& rgb);

/// 8-bit RGB pixels, interleaved.
struct Rgb8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

/// Writes an 8-bit RGB PNG. Output carries no timestamps or text chunks, so
/// equal pixels always produce equal bytes.
void write_png(const std::filesystem::path& path, const Rgb8& image);
Rgb8 read_png_rgb8(const std::filesystem::path& path);

Rgb8 to_rgb8(const Image& img);

}  // namespace gazelab
