#include "abestore/suite.hpp"

#include "abestore/crypto/aes.hpp"
#include "abestore/crypto/cmac.hpp"
#include "abestore/crypto/sha.hpp"
#include "abestore/errors.hpp"

namespace abestore::suite {

const CryptoSuite& default_suite() {
    static const CryptoSuite s{kDefaultSuiteId,       "aes-256-ctr",     "cmac-aes-256",
                               "rsa-2048-pkcs1-sha256", "ffdhe-modp-2048", "hkdf-sha256"};
    return s;
}

const CryptoSuite& suite_by_id(const std::string& id) {
    if (id == default_suite().id) return default_suite();
    throw ProtocolError(ErrorCode::SuiteMismatch, "unknown crypto suite " + id);
}

SymKey SymKey::generate(RandomSource& rng) { return SymKey(rng.bytes(crypto::kAes256KeyLen)); }

Bytes SymKey::encrypt(std::span<const uint8_t> iv, std::span<const uint8_t> plaintext) {
    if (iv.size() != crypto::kAesIvLen)
        throw ProtocolError(ErrorCode::Malformed, "bad IV length");
    Bytes iv_copy(iv.begin(), iv.end());
    if (!used_ivs_.insert(iv_copy).second)
        throw ProtocolError(ErrorCode::Malformed, "IV reuse under one key");
    Bytes out = std::move(iv_copy);
    Bytes ct = crypto::aes256_ctr(key_, iv, plaintext);
    out.insert(out.end(), ct.begin(), ct.end());
    return out;
}

Bytes SymKey::encrypt(RandomSource& rng, std::span<const uint8_t> plaintext) {
    return encrypt(rng.bytes(crypto::kAesIvLen), plaintext);
}

Bytes SymKey::decrypt(std::span<const uint8_t> sealed) const {
    if (sealed.size() < crypto::kAesIvLen)
        throw ProtocolError(ErrorCode::Malformed, "ciphertext shorter than IV");
    return crypto::aes256_ctr(key_, sealed.first(crypto::kAesIvLen),
                              sealed.subspan(crypto::kAesIvLen));
}

Bytes mac_tag(std::span<const uint8_t> key, std::span<const uint8_t> message) {
    return crypto::cmac_aes256(key, message);
}

bool mac_verify(std::span<const uint8_t> key, std::span<const uint8_t> message,
                std::span<const uint8_t> tag) {
    return crypto::cmac_aes256_verify(key, message, tag);
}

SigKeyPair sig_generate(RandomSource& rng) { return crypto::rsa_generate(rng); }

Bytes sign(const SigKeyPair& key, std::span<const uint8_t> message) {
    return crypto::rsa_sign(key, message);
}

bool verify(const SigPublicKey& key, std::span<const uint8_t> message,
            std::span<const uint8_t> signature) {
    return crypto::rsa_verify(key, message, signature);
}

KeShare ke_generate(RandomSource& rng) { return crypto::dh_generate(rng); }

Bytes ke_shared_secret(const KeShare& self, std::span<const uint8_t> peer_pub) {
    return crypto::dh_shared_secret(self, peer_pub);
}

ChannelKeys derive_channel_keys(std::span<const uint8_t> shared_secret) {
    ChannelKeys keys;
    keys.enc_c2s = crypto::hkdf(shared_secret, {}, "channel enc c2s", crypto::kAes256KeyLen);
    keys.mac_c2s = crypto::hkdf(shared_secret, {}, "channel mac c2s", crypto::kAes256KeyLen);
    keys.enc_s2c = crypto::hkdf(shared_secret, {}, "channel enc s2c", crypto::kAes256KeyLen);
    keys.mac_s2c = crypto::hkdf(shared_secret, {}, "channel mac s2c", crypto::kAes256KeyLen);
    return keys;
}

}  // namespace abestore::suite
