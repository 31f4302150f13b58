#pragma once

#include <span>

#include "abestore/bytes.hpp"

namespace abestore::crypto {

constexpr size_t kAes256KeyLen = 32;
constexpr size_t kAesIvLen = 16;
constexpr size_t kGcmNonceLen = 12;
constexpr size_t kGcmTagLen = 16;

// AES-256-CTR keystream cipher.  Caller owns IV freshness.
Bytes aes256_ctr(std::span<const uint8_t> key, std::span<const uint8_t> iv,
                 std::span<const uint8_t> data);

// AES-256-GCM.  Output is ciphertext || tag.
Bytes aes256_gcm_seal(std::span<const uint8_t> key, std::span<const uint8_t> nonce,
                      std::span<const uint8_t> aad, std::span<const uint8_t> plaintext);

// Returns false on authentication failure, plaintext in `out` otherwise.
bool aes256_gcm_open(std::span<const uint8_t> key, std::span<const uint8_t> nonce,
                     std::span<const uint8_t> aad, std::span<const uint8_t> sealed, Bytes& out);

// Single-block AES-256 ECB encryption of one 16-byte block (CMAC subkeys).
void aes256_block(std::span<const uint8_t> key, const uint8_t in[16], uint8_t out[16]);

}  // namespace abestore::crypto
