#pragma once

#include <span>

#include "abestore/bytes.hpp"
#include "abestore/rng.hpp"

namespace abestore::crypto {

// Finite-field Diffie-Hellman over the 2048-bit MODP group (RFC 3526
// group 14), generator 2.  Public values are fixed-width 256-byte
// big-endian; the shared secret is the fixed-width group element, meant to
// be fed into a KDF rather than used directly.
struct DhKeyPair {
    Bytes priv;  // big-endian exponent
    Bytes pub;   // 256 bytes
};

DhKeyPair dh_generate(RandomSource& rng);

// Throws ProtocolError(Malformed) if the peer value is out of range.
Bytes dh_shared_secret(const DhKeyPair& self, std::span<const uint8_t> peer_pub);

}  // namespace abestore::crypto
