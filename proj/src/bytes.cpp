#include "abestore/bytes.hpp"

namespace abestore {

static const char* kHexDigits = "0123456789abcdef";

std::string hex_encode(std::span<const uint8_t> data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0xf]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0) throw DecodeError("odd hex length");
    Bytes out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        int hi = hex_nibble(hex[2 * i]);
        int lo = hex_nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw DecodeError("bad hex digit");
        out[i] = uint8_t((hi << 4) | lo);
    }
    return out;
}

}  // namespace abestore
