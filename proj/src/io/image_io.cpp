#include "io/image_io.h"

#include <cmath>

#include "core/bytes.h"
#include "core/error.h"

namespace dualray {

uint8_t value_to_u8(float v) {
    float scaled = v * 255.0f;
    if (scaled <= 0.0f) return 0;
    if (scaled >= 255.0f) return 255;
    return uint8_t(std::lround(scaled));
}

float u8_to_value(uint8_t b) { return float(b) / 255.0f; }

ImageU8 frame_to_image(const Grid4f& video, int t) {
    if (t < 0 || t >= video.d0) throw DataError("frame_to_image: frame index out of range");
    ImageU8 img;
    img.height = video.d1;
    img.width = video.d2;
    img.channels = video.d3;
    img.pixels.resize(size_t(img.height) * img.width * img.channels);
    size_t i = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) img.pixels[i++] = value_to_u8(video(t, y, x, c));
    return img;
}

void image_to_frame(const ImageU8& img, Grid4f& video, int t) {
    if (img.height != video.d1 || img.width != video.d2 || img.channels != video.d3)
        throw DataError("image_to_frame: shape mismatch");
    size_t i = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) video(t, y, x, c) = u8_to_value(img.pixels[i++]);
}

void write_frame_raw(const std::string& path, const Grid4f& video, int t) {
    std::vector<uint8_t> buf;
    buf.reserve(size_t(video.d1) * video.d2 * video.d3 * 4);
    for (int y = 0; y < video.d1; ++y)
        for (int x = 0; x < video.d2; ++x)
            for (int c = 0; c < video.d3; ++c) put_f32(buf, video(t, y, x, c));
    write_file_bytes(path, buf.data(), buf.size());
}

void read_frame_raw(const std::string& path, Grid4f& video, int t) {
    std::vector<uint8_t> buf = read_file_bytes(path);
    size_t want = size_t(video.d1) * video.d2 * video.d3 * 4;
    if (buf.size() != want) throw DataError("read_frame_raw: size mismatch: " + path);
    ByteReader r(buf);
    for (int y = 0; y < video.d1; ++y)
        for (int x = 0; x < video.d2; ++x)
            for (int c = 0; c < video.d3; ++c) video(t, y, x, c) = r.f32();
}

void write_depth_raw(const std::string& path, const std::vector<float>& depth) {
    std::vector<uint8_t> buf;
    buf.reserve(depth.size() * 4);
    for (float v : depth) put_f32(buf, v);
    write_file_bytes(path, buf.data(), buf.size());
}

std::vector<float> read_depth_raw(const std::string& path, int expected) {
    std::vector<uint8_t> buf = read_file_bytes(path);
    if (buf.size() != size_t(expected) * 4) throw DataError("read_depth_raw: size mismatch: " + path);
    std::vector<float> depth(expected);
    ByteReader r(buf);
    for (int i = 0; i < expected; ++i) depth[i] = r.f32();
    return depth;
}

void write_latent(const std::string& path, const Grid4f& latent, int pixel_h, int pixel_w) {
    std::vector<uint8_t> buf;
    put_i32(buf, latent.d0);
    put_i32(buf, latent.d1);
    put_i32(buf, latent.d2);
    put_i32(buf, latent.d3);
    put_i32(buf, pixel_h);
    put_i32(buf, pixel_w);
    for (float v : latent.data) put_f32(buf, v);
    write_file_bytes(path, buf.data(), buf.size());
}

Grid4f read_latent(const std::string& path, int* pixel_h, int* pixel_w) {
    std::vector<uint8_t> buf = read_file_bytes(path);
    if (buf.size() < 24) throw DataError("read_latent: truncated header: " + path);
    ByteReader r(buf);
    int t = r.i32(), h = r.i32(), w = r.i32(), k = r.i32();
    int ph = r.i32(), pw = r.i32();
    if (t <= 0 || h <= 0 || w <= 0 || k <= 0) throw DataError("read_latent: bad dims: " + path);
    Grid4f latent(t, h, w, k);
    if (buf.size() != 24 + latent.size() * 4) throw DataError("read_latent: size mismatch: " + path);
    for (size_t i = 0; i < latent.size(); ++i) latent.data[i] = r.f32();
    if (pixel_h) *pixel_h = ph;
    if (pixel_w) *pixel_w = pw;
    return latent;
}

}  // namespace dualray
