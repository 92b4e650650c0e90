#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace dualray {

// Little-endian byte packing for the on-disk formats. All binary artifacts
// (raw frames, depth maps, latent dumps, checkpoints) are LE regardless of
// host order.

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(uint8_t(v));
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v >> 16));
    out.push_back(uint8_t(v >> 24));
}

inline void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    put_u32(out, uint32_t(v));
    put_u32(out, uint32_t(v >> 32));
}

inline void put_i32(std::vector<uint8_t>& out, int32_t v) { put_u32(out, uint32_t(v)); }

inline void put_f32(std::vector<uint8_t>& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

struct ByteReader {
    const uint8_t* p;
    size_t n;
    size_t pos = 0;

    ByteReader(const uint8_t* data, size_t len) : p(data), n(len) {}
    explicit ByteReader(const std::vector<uint8_t>& v) : p(v.data()), n(v.size()) {}

    bool ok(size_t want) const { return pos + want <= n; }

    uint32_t u32() {
        uint32_t v = uint32_t(p[pos]) | uint32_t(p[pos + 1]) << 8 | uint32_t(p[pos + 2]) << 16 |
                     uint32_t(p[pos + 3]) << 24;
        pos += 4;
        return v;
    }

    uint64_t u64() {
        uint64_t lo = u32();
        uint64_t hi = u32();
        return lo | (hi << 32);
    }

    int32_t i32() { return int32_t(u32()); }

    float f32() {
        uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

    void bytes(void* dst, size_t len) {
        std::memcpy(dst, p + pos, len);
        pos += len;
    }
};

std::vector<uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const void* data, size_t len);
void write_file_text(const std::string& path, const std::string& text);
std::string read_file_text(const std::string& path);

}  // namespace dualray
