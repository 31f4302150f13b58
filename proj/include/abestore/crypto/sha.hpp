#pragma once

#include <span>

#include "abestore/bytes.hpp"

namespace abestore::crypto {

constexpr size_t kSha256Len = 32;

Bytes sha256(std::span<const uint8_t> data);

// Incremental variant for digesting framed/structured input.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::span<const uint8_t> data);
    void update(std::string_view s) {
        update(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
    }
    Bytes finish();

private:
    void* ctx_;
};

Bytes hmac_sha256(std::span<const uint8_t> key, std::span<const uint8_t> data);

// HKDF-SHA256 (RFC 5869).
Bytes hkdf(std::span<const uint8_t> ikm, std::span<const uint8_t> salt, std::string_view info,
           size_t out_len);

}  // namespace abestore::crypto
