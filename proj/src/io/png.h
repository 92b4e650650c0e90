#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dualray {

// Minimal PNG support: 8-bit grayscale or RGB, no interlace, no ancillary
// chunks. The writer emits filter type 0 rows through zlib, so output bytes
// are a pure function of the pixels; the reader handles filters 0..4.
struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 or 3
    std::vector<uint8_t> pixels;  // row-major, interleaved

    uint8_t& at(int y, int x, int c) { return pixels[(size_t(y) * width + x) * channels + c]; }
    uint8_t at(int y, int x, int c) const { return pixels[(size_t(y) * width + x) * channels + c]; }
};

std::vector<uint8_t> png_encode(const ImageU8& img);
ImageU8 png_decode(const std::vector<uint8_t>& bytes);

void png_write_file(const std::string& path, const ImageU8& img);
ImageU8 png_read_file(const std::string& path);

}  // namespace dualray
