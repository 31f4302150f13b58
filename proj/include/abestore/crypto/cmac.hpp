#pragma once

#include <span>

#include "abestore/bytes.hpp"

namespace abestore::crypto {

constexpr size_t kCmacTagLen = 16;

// AES-256-CMAC (RFC 4493 construction over AES-256).
Bytes cmac_aes256(std::span<const uint8_t> key, std::span<const uint8_t> data);

bool cmac_aes256_verify(std::span<const uint8_t> key, std::span<const uint8_t> data,
                        std::span<const uint8_t> tag);

}  // namespace abestore::crypto
