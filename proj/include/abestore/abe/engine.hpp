#pragma once

#include <memory>

#include "abestore/abe/types.hpp"
#include "abestore/rng.hpp"

namespace abestore::abe {

// Four-algorithm CP-ABE contract plus attribute re-issue (revocation).
// All randomness is drawn from the supplied source so a seeded Drbg makes
// every operation reproducible.
class AbeEngine {
public:
    virtual ~AbeEngine() = default;

    virtual std::string scheme() const = 0;

    // Largest message accepted by encrypt(), in bytes.
    virtual size_t block_capacity() const = 0;

    virtual std::pair<AbePublicParams, AbeMasterKey> setup(const AbeSystemConfig& cfg,
                                                           RandomSource& rng) const = 0;

    // Every id in `attrs` must exist in pk.universe at its current epoch.
    // Rejects the empty set.
    virtual AbePrivateKey generate_key(const AbePublicParams& pk, const AbeMasterKey& mk,
                                       const std::vector<AttributeId>& attrs,
                                       RandomSource& rng) const = 0;

    virtual AbeCiphertext encrypt(const AbePublicParams& pk, std::span<const uint8_t> message,
                                  policy::PolicyPtr p, RandomSource& rng) const = 0;

    // Throws AbeDecryptError iff sk does not satisfy c.policy (at matching
    // epochs) or c is malformed/tampered.
    virtual Bytes decrypt(const AbePublicParams& pk, const AbeCiphertext& c,
                          const AbePrivateKey& sk) const = 0;

    // Bumps the attribute's epoch in pk.universe and rotates its material.
    // Existing keys holding the old epoch stop decrypting fresh ciphertexts
    // whose policy uses the attribute.
    virtual AttributeRepresentation reissue_attribute(AbePublicParams& pk, AbeMasterKey& mk,
                                                      const std::string& name) const = 0;

    // Extends the universe with a new attribute (e.g. the per-node
    // authorization attribute minted when a node joins).  Rejects names
    // already present.
    virtual AttributeRepresentation add_attribute(AbePublicParams& pk, AbeMasterKey& mk,
                                                  const AttributeId& id) const = 0;
};

// Pairing-based scheme over BN254 (the real construction).
const AbeEngine& pairing_engine();
// Deterministic table-based stand-in for protocol and harness tests.
// Non-cryptographic: the gating secret rides inside the public params.
const AbeEngine& mock_engine();

// Lookup by scheme id as carried in serialized artifacts.
const AbeEngine& engine_for(const std::string& scheme);

}  // namespace abestore::abe
