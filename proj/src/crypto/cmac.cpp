#include "abestore/crypto/cmac.hpp"

#include <cstring>

#include "abestore/crypto/aes.hpp"

namespace abestore::crypto {

namespace {

// GF(2^128) doubling with the x^128 + x^7 + x^2 + x + 1 reduction.
void dbl(uint8_t b[16]) {
    uint8_t carry = b[0] >> 7;
    for (int i = 0; i < 15; ++i) b[i] = uint8_t((b[i] << 1) | (b[i + 1] >> 7));
    b[15] = uint8_t(b[15] << 1);
    if (carry) b[15] ^= 0x87;
}

}  // namespace

Bytes cmac_aes256(std::span<const uint8_t> key, std::span<const uint8_t> data) {
    uint8_t zero[16] = {0};
    uint8_t k1[16], k2[16];
    aes256_block(key, zero, k1);
    dbl(k1);
    std::memcpy(k2, k1, 16);
    dbl(k2);

    size_t n = (data.size() + 15) / 16;
    bool complete = n > 0 && data.size() % 16 == 0;
    if (n == 0) n = 1;

    uint8_t last[16];
    if (complete) {
        std::memcpy(last, data.data() + (n - 1) * 16, 16);
        for (int i = 0; i < 16; ++i) last[i] ^= k1[i];
    } else {
        size_t rem = data.size() - (n - 1) * 16;
        std::memset(last, 0, 16);
        if (rem > 0) std::memcpy(last, data.data() + (n - 1) * 16, rem);
        last[rem] = 0x80;
        for (int i = 0; i < 16; ++i) last[i] ^= k2[i];
    }

    uint8_t x[16] = {0};
    for (size_t i = 0; i + 1 < n; ++i) {
        for (int j = 0; j < 16; ++j) x[j] ^= data[i * 16 + j];
        aes256_block(key, x, x);
    }
    for (int j = 0; j < 16; ++j) x[j] ^= last[j];
    aes256_block(key, x, x);

    return Bytes(x, x + 16);
}

bool cmac_aes256_verify(std::span<const uint8_t> key, std::span<const uint8_t> data,
                        std::span<const uint8_t> tag) {
    Bytes expect = cmac_aes256(key, data);
    return ct_equal(expect, tag);
}

}  // namespace abestore::crypto
