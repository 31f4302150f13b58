#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace abestore {

using Bytes = std::vector<uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(const Bytes& b) {
    return std::string(b.begin(), b.end());
}

std::string hex_encode(std::span<const uint8_t> data);
Bytes hex_decode(std::string_view hex);

// Big-endian, length-prefixed field encoding.  All stable wire formats in
// the project (keys, ciphertexts, tokens, frames) are produced through
// this writer so that layouts stay injective and byte-stable.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u32(uint32_t v) {
        buf_.push_back(uint8_t(v >> 24));
        buf_.push_back(uint8_t(v >> 16));
        buf_.push_back(uint8_t(v >> 8));
        buf_.push_back(uint8_t(v));
    }
    void u64(uint64_t v) {
        u32(uint32_t(v >> 32));
        u32(uint32_t(v));
    }
    void raw(std::span<const uint8_t> data) {
        buf_.insert(buf_.end(), data.begin(), data.end());
    }
    // u32 length prefix followed by the bytes.
    void blob(std::span<const uint8_t> data) {
        u32(uint32_t(data.size()));
        raw(data);
    }
    void str(std::string_view s) {
        u32(uint32_t(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class DecodeError : public std::runtime_error {
public:
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    uint32_t u32() {
        need(4);
        uint32_t v = (uint32_t(data_[pos_]) << 24) | (uint32_t(data_[pos_ + 1]) << 16) |
                     (uint32_t(data_[pos_ + 2]) << 8) | uint32_t(data_[pos_ + 3]);
        pos_ += 4;
        return v;
    }
    uint64_t u64() {
        uint64_t hi = u32();
        return (hi << 32) | u32();
    }
    Bytes raw(size_t n) {
        need(n);
        Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }
    Bytes blob() {
        uint32_t n = u32();
        return raw(n);
    }
    std::string str() {
        Bytes b = blob();
        return to_string(b);
    }

    size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }
    void expect_done() const {
        if (!done()) throw DecodeError("trailing bytes after decode");
    }

private:
    void need(size_t n) const {
        if (data_.size() - pos_ < n) throw DecodeError("truncated input");
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

inline bool ct_equal(std::span<const uint8_t> a, std::span<const uint8_t> b) {
    if (a.size() != b.size()) return false;
    uint8_t acc = 0;
    for (size_t i = 0; i < a.size(); ++i) acc |= a[i] ^ b[i];
    return acc == 0;
}

}  // namespace abestore
