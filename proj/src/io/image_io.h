#pragma once

#include <string>

#include "core/grid.h"
#include "io/png.h"

namespace dualray {

// Stored pixel values live in [0, 1]; the diffusion path remaps to [-1, 1]
// internally. u8 conversion maps [0, 1] linearly onto 0..255 with
// round-to-nearest.

uint8_t value_to_u8(float v);
float u8_to_value(uint8_t b);

// frame: (H, W, C) slice t of a (T, H, W, C) video.
ImageU8 frame_to_image(const Grid4f& video, int t);
void image_to_frame(const ImageU8& img, Grid4f& video, int t);

// Raw frame files are H*W*C little-endian f32, no header.
void write_frame_raw(const std::string& path, const Grid4f& video, int t);
void read_frame_raw(const std::string& path, Grid4f& video, int t);

// Depth maps are H*W little-endian f32; sky pixels carry +inf.
void write_depth_raw(const std::string& path, const std::vector<float>& depth);
std::vector<float> read_depth_raw(const std::string& path, int expected);

// Latent dumps: 6 little-endian i32 (t, h, w, k, H, W) then t*h*w*k f32.
// H and W record the pixel resolution the latent came from.
void write_latent(const std::string& path, const Grid4f& latent, int pixel_h, int pixel_w);
Grid4f read_latent(const std::string& path, int* pixel_h = nullptr, int* pixel_w = nullptr);

}  // namespace dualray
