#include "core/bytes.h"

#include <cstdio>
#include <filesystem>

#include "core/error.h"

namespace dualray {

std::vector<uint8_t> read_file_bytes(const std::string& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw DataError("not a regular file: " + path);
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw DataError("cannot open for read: " + path);
    std::fseek(f, 0, SEEK_END);
    long len = std::ftell(f);
    std::fseek(f, 0, SEEK_SET);
    std::vector<uint8_t> buf(len > 0 ? size_t(len) : 0);
    if (len > 0 && std::fread(buf.data(), 1, buf.size(), f) != buf.size()) {
        std::fclose(f);
        throw DataError("short read: " + path);
    }
    std::fclose(f);
    return buf;
}

void write_file_bytes(const std::string& path, const void* data, size_t len) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("cannot open for write: " + path);
    if (len > 0 && std::fwrite(data, 1, len, f) != len) {
        std::fclose(f);
        throw DataError("short write: " + path);
    }
    std::fclose(f);
}

void write_file_text(const std::string& path, const std::string& text) {
    write_file_bytes(path, text.data(), text.size());
}

std::string read_file_text(const std::string& path) {
    std::vector<uint8_t> b = read_file_bytes(path);
    return std::string(b.begin(), b.end());
}

}  // namespace dualray
