#include "io/png.h"

#include <zlib.h>

#include <cstring>

#include "core/bytes.h"
#include "core/error.h"

namespace dualray {

namespace {

void put_be32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(uint8_t(v >> 24));
    out.push_back(uint8_t(v >> 16));
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v));
}

uint32_t get_be32(const uint8_t* p) {
    return uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 | uint32_t(p[3]);
}

void put_chunk(std::vector<uint8_t>& out, const char type[4], const uint8_t* data, size_t len) {
    put_be32(out, uint32_t(len));
    size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    if (len) out.insert(out.end(), data, data + len);
    uint32_t crc = uint32_t(::crc32(0, out.data() + start, uInt(4 + len)));
    put_be32(out, crc);
}

int paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

const uint8_t kSig[8] = {137, 80, 78, 71, 13, 10, 26, 10};

}  // namespace

std::vector<uint8_t> png_encode(const ImageU8& img) {
    if (img.width <= 0 || img.height <= 0 || (img.channels != 1 && img.channels != 3))
        throw DataError("png_encode: unsupported image shape");
    if (img.pixels.size() != size_t(img.width) * img.height * img.channels)
        throw DataError("png_encode: pixel buffer size mismatch");

    std::vector<uint8_t> out(kSig, kSig + 8);

    uint8_t ihdr[13];
    ihdr[0] = uint8_t(img.width >> 24);
    ihdr[1] = uint8_t(img.width >> 16);
    ihdr[2] = uint8_t(img.width >> 8);
    ihdr[3] = uint8_t(img.width);
    ihdr[4] = uint8_t(img.height >> 24);
    ihdr[5] = uint8_t(img.height >> 16);
    ihdr[6] = uint8_t(img.height >> 8);
    ihdr[7] = uint8_t(img.height);
    ihdr[8] = 8;                                    // bit depth
    ihdr[9] = img.channels == 3 ? 2 : 0;            // color type
    ihdr[10] = 0;
    ihdr[11] = 0;
    ihdr[12] = 0;
    put_chunk(out, "IHDR", ihdr, 13);

    size_t stride = size_t(img.width) * img.channels;
    std::vector<uint8_t> raw((stride + 1) * img.height);
    for (int y = 0; y < img.height; ++y) {
        raw[(stride + 1) * y] = 0;  // filter none
        std::memcpy(&raw[(stride + 1) * y + 1], &img.pixels[stride * y], stride);
    }

    uLongf bound = compressBound(uLong(raw.size()));
    std::vector<uint8_t> z(bound);
    if (compress2(z.data(), &bound, raw.data(), uLong(raw.size()), 6) != Z_OK)
        throw DataError("png_encode: deflate failed");
    z.resize(bound);
    put_chunk(out, "IDAT", z.data(), z.size());
    put_chunk(out, "IEND", nullptr, 0);
    return out;
}

ImageU8 png_decode(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kSig, 8) != 0)
        throw DataError("png_decode: bad signature");

    int width = 0, height = 0, channels = 0;
    std::vector<uint8_t> idat;
    size_t pos = 8;
    bool saw_end = false;
    while (pos + 12 <= bytes.size()) {
        uint32_t len = get_be32(&bytes[pos]);
        if (pos + 12 + len > bytes.size()) throw DataError("png_decode: truncated chunk");
        const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
        const uint8_t* data = &bytes[pos + 8];
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw DataError("png_decode: bad IHDR");
            width = int(get_be32(data));
            height = int(get_be32(data + 4));
            int depth = data[8], color = data[9];
            if (depth != 8 || data[12] != 0)
                throw DataError("png_decode: only 8-bit non-interlaced supported");
            if (color == 0)
                channels = 1;
            else if (color == 2)
                channels = 3;
            else
                throw DataError("png_decode: only gray and RGB supported");
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_end = true;
            break;
        }
        pos += 12 + len;
    }
    if (!saw_end || width <= 0 || height <= 0 || channels == 0)
        throw DataError("png_decode: malformed stream");

    size_t stride = size_t(width) * channels;
    std::vector<uint8_t> raw((stride + 1) * height);
    uLongf raw_len = uLongf(raw.size());
    if (uncompress(raw.data(), &raw_len, idat.data(), uLong(idat.size())) != Z_OK ||
        raw_len != raw.size())
        throw DataError("png_decode: inflate failed");

    ImageU8 img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.pixels.resize(stride * height);
    int bpp = channels;
    for (int y = 0; y < height; ++y) {
        uint8_t filter = raw[(stride + 1) * y];
        const uint8_t* src = &raw[(stride + 1) * y + 1];
        uint8_t* dst = &img.pixels[stride * y];
        const uint8_t* up = y > 0 ? &img.pixels[stride * (y - 1)] : nullptr;
        for (size_t x = 0; x < stride; ++x) {
            int a = x >= size_t(bpp) ? dst[x - bpp] : 0;
            int b = up ? up[x] : 0;
            int c = (up && x >= size_t(bpp)) ? up[x - bpp] : 0;
            int v = src[x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw DataError("png_decode: bad filter type");
            }
            dst[x] = uint8_t(v);
        }
    }
    return img;
}

void png_write_file(const std::string& path, const ImageU8& img) {
    std::vector<uint8_t> bytes = png_encode(img);
    write_file_bytes(path, bytes.data(), bytes.size());
}

ImageU8 png_read_file(const std::string& path) {
    return png_decode(read_file_bytes(path));
}

}  // namespace dualray
