#pragma once

#include <span>

#include "abestore/bytes.hpp"
#include "abestore/rng.hpp"

namespace abestore::crypto {

// RSA-2048 with SHA-256, PKCS#1 v1.5 signature encoding.  Key generation
// draws primes from the caller's RandomSource so harness runs stay
// reproducible.
struct RsaPublicKey {
    Bytes n;  // big-endian modulus
    Bytes e;

    Bytes serialize() const;
    static RsaPublicKey deserialize(std::span<const uint8_t> data);
};

struct RsaKeyPair {
    RsaPublicKey pub;
    Bytes d;  // big-endian private exponent

    Bytes serialize() const;
    static RsaKeyPair deserialize(std::span<const uint8_t> data);
};

RsaKeyPair rsa_generate(RandomSource& rng, int bits = 2048);

Bytes rsa_sign(const RsaKeyPair& key, std::span<const uint8_t> message);
bool rsa_verify(const RsaPublicKey& key, std::span<const uint8_t> message,
                std::span<const uint8_t> signature);

}  // namespace abestore::crypto
