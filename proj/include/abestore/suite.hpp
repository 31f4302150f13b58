#pragma once

#include <set>
#include <string>

#include "abestore/bytes.hpp"
#include "abestore/crypto/dh.hpp"
#include "abestore/crypto/rsa.hpp"
#include "abestore/rng.hpp"

namespace abestore::suite {

inline constexpr const char* kDefaultSuiteId = "abestore-default-v1";

// The non-ABE algorithm slots, bundled behind one id string that travels
// in the wire handshake: peers either run the same configuration or abort.
struct CryptoSuite {
    std::string id;
    std::string sym;  // "aes-256-ctr"
    std::string mac;  // "cmac-aes-256"
    std::string sig;  // "rsa-2048-pkcs1-sha256"
    std::string ke;   // "ffdhe-modp-2048"
    std::string kdf;  // "hkdf-sha256"
};

// Registry lookup; throws ProtocolError(SuiteMismatch) for unknown ids.
const CryptoSuite& suite_by_id(const std::string& id);
const CryptoSuite& default_suite();

// E_SYM key with per-message initialization values.  The same material
// refuses to encrypt twice with one IV (the "key-parameter pair" rule).
class SymKey {
public:
    SymKey() = default;
    explicit SymKey(Bytes key) : key_(std::move(key)) {}

    static SymKey generate(RandomSource& rng);

    const Bytes& key() const { return key_; }

    // Encrypts with a caller-supplied fresh IV; output is iv || ciphertext.
    // Throws on IV reuse under this key object.
    Bytes encrypt(std::span<const uint8_t> iv, std::span<const uint8_t> plaintext);
    // Convenience: draws a fresh random IV.
    Bytes encrypt(RandomSource& rng, std::span<const uint8_t> plaintext);
    Bytes decrypt(std::span<const uint8_t> sealed) const;

private:
    Bytes key_;
    std::set<Bytes> used_ivs_;
};

// MAC slot (CMAC-AES-256).
Bytes mac_tag(std::span<const uint8_t> key, std::span<const uint8_t> message);
bool mac_verify(std::span<const uint8_t> key, std::span<const uint8_t> message,
                std::span<const uint8_t> tag);

// S_PSIG slot (RSA-2048 / PKCS#1 v1.5 / SHA-256).
using SigKeyPair = crypto::RsaKeyPair;
using SigPublicKey = crypto::RsaPublicKey;
SigKeyPair sig_generate(RandomSource& rng);
Bytes sign(const SigKeyPair& key, std::span<const uint8_t> message);
bool verify(const SigPublicKey& key, std::span<const uint8_t> message,
            std::span<const uint8_t> signature);

// R_KE slot (finite-field DH).  Each side produces a public value and
// derives the same secret from the peer's.
using KeShare = crypto::DhKeyPair;
KeShare ke_generate(RandomSource& rng);
Bytes ke_shared_secret(const KeShare& self, std::span<const uint8_t> peer_pub);

// Directional channel keys from a key-exchange secret: four independent
// keys via labeled KDF invocations.  "c2s" = initiator-to-responder.
struct ChannelKeys {
    Bytes enc_c2s, mac_c2s;
    Bytes enc_s2c, mac_s2c;
};
ChannelKeys derive_channel_keys(std::span<const uint8_t> shared_secret);

}  // namespace abestore::suite
