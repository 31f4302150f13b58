#include <algorithm>

#include "abestore/abe/engine.hpp"
#include "abestore/crypto/aes.hpp"
#include "abestore/crypto/sha.hpp"
#include "abestore/errors.hpp"

// Table-based stand-in engine for protocol and harness tests.  The gating
// secret T travels inside the public params, so this provides NO
// confidentiality against anyone holding them; what it does provide is the
// exact behavioral contract of the real engine (policy gating, epoch
// sensitivity, per-key component binding) at a tiny fraction of the cost.

namespace abestore::abe {

namespace {

constexpr const char* kSchemeId = "mock-table-v1";
constexpr size_t kBlockCapacity = 32;
constexpr size_t kKeyIdLen = 16;

Bytes attr_material(std::span<const uint8_t> secret, const std::string& name, uint32_t epoch) {
    ByteWriter w;
    w.str("mock-attr");
    w.str(name);
    w.u32(epoch);
    return crypto::hmac_sha256(secret, w.bytes());
}

// Components are bound to a per-key id so that splicing components from a
// different key into this one fails verification (mirrors the real
// scheme's collusion resistance at the API level).
Bytes key_component(std::span<const uint8_t> secret, std::span<const uint8_t> key_id,
                    const std::string& name, uint32_t epoch) {
    ByteWriter w;
    w.str("mock-comp");
    w.blob(key_id);
    w.str(name);
    w.u32(epoch);
    return crypto::hmac_sha256(secret, w.bytes());
}

Bytes dem_key(std::span<const uint8_t> secret) {
    return crypto::hkdf(secret, {}, "mock-dem", crypto::kAes256KeyLen);
}

class MockEngine final : public AbeEngine {
public:
    std::string scheme() const override { return kSchemeId; }
    size_t block_capacity() const override { return kBlockCapacity; }

    std::pair<AbePublicParams, AbeMasterKey> setup(const AbeSystemConfig& cfg,
                                                   RandomSource& rng) const override {
        if (cfg.security_parameter != 128 && cfg.security_parameter != 192 &&
            cfg.security_parameter != 256)
            throw ProtocolError(ErrorCode::Malformed, "unsupported security parameter");
        if (cfg.universe.empty())
            throw ProtocolError(ErrorCode::Malformed, "empty attribute universe");

        Bytes secret = rng.bytes(32);
        AbePublicParams pk;
        pk.scheme = kSchemeId;
        pk.security_parameter = cfg.security_parameter;
        for (const auto& id : cfg.universe) {
            if (pk.find(id.name))
                throw ProtocolError(ErrorCode::Malformed, "duplicate attribute " + id.name);
            pk.universe.push_back({id, attr_material(secret, id.name, id.epoch)});
        }
        pk.opaque = secret;

        AbeMasterKey mk;
        mk.scheme = kSchemeId;
        mk.opaque = secret;
        return {std::move(pk), std::move(mk)};
    }

    AbePrivateKey generate_key(const AbePublicParams& pk, const AbeMasterKey& mk,
                               const std::vector<AttributeId>& attrs,
                               RandomSource& rng) const override {
        if (attrs.empty())
            throw ProtocolError(ErrorCode::Malformed, "empty attribute set");
        if (mk.scheme != kSchemeId)
            throw ProtocolError(ErrorCode::Malformed, "scheme mismatch");

        std::vector<AttributeId> sorted(attrs);
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (const auto& id : sorted) {
            const AttributeRepresentation* rep = pk.find(id.name);
            if (!rep) throw ProtocolError(ErrorCode::Malformed, "unknown attribute " + id.name);
            if (rep->id.epoch != id.epoch)
                throw ProtocolError(ErrorCode::Malformed, "stale epoch for " + id.name);
        }

        Bytes key_id = rng.bytes(kKeyIdLen);
        ByteWriter w;
        w.blob(key_id);
        w.u32(uint32_t(sorted.size()));
        for (const auto& id : sorted)
            w.blob(key_component(mk.opaque, key_id, id.name, id.epoch));

        AbePrivateKey sk;
        sk.scheme = kSchemeId;
        sk.attrs = std::move(sorted);
        sk.opaque = w.take();
        return sk;
    }

    AbeCiphertext encrypt(const AbePublicParams& pk, std::span<const uint8_t> message,
                          policy::PolicyPtr p, RandomSource& rng) const override {
        if (message.size() > kBlockCapacity)
            throw ProtocolError(ErrorCode::Malformed, "message exceeds block capacity");
        if (pk.scheme != kSchemeId)
            throw ProtocolError(ErrorCode::Malformed, "scheme mismatch");

        ByteWriter w;
        w.u8(1);
        std::vector<std::string> names = policy::leaves(*p);
        w.u32(uint32_t(names.size()));
        for (const std::string& name : names) {
            const AttributeRepresentation* rep = pk.find(name);
            if (!rep) throw ProtocolError(ErrorCode::Malformed, "unknown attribute " + name);
            w.str(name);
            w.u32(rep->id.epoch);
        }

        Bytes nonce = rng.bytes(crypto::kGcmNonceLen);
        Bytes aad = to_bytes(policy::serialize(p));
        w.blob(nonce);
        w.blob(crypto::aes256_gcm_seal(dem_key(pk.opaque), nonce, aad, message));

        AbeCiphertext ct;
        ct.policy = std::move(p);
        ct.body = w.take();
        return ct;
    }

    Bytes decrypt(const AbePublicParams& pk, const AbeCiphertext& c,
                  const AbePrivateKey& sk) const override {
        if (pk.scheme != kSchemeId || sk.scheme != kSchemeId)
            throw AbeDecryptError("scheme mismatch");
        if (!c.policy) throw AbeDecryptError("ciphertext missing policy");

        Bytes key_id;
        std::vector<Bytes> comps;
        try {
            ByteReader r(sk.opaque);
            key_id = r.blob();
            uint32_t n = r.u32();
            for (uint32_t i = 0; i < n; ++i) comps.push_back(r.blob());
            r.expect_done();
        } catch (const DecodeError& e) {
            throw AbeDecryptError(std::string("malformed private key: ") + e.what());
        }
        if (comps.size() != sk.attrs.size())
            throw AbeDecryptError("malformed private key: component count");

        // Attributes count only if their component verifies against this
        // key's id and their epoch is current in the ciphertext's view.
        policy::AttributeSet held;
        for (size_t i = 0; i < sk.attrs.size(); ++i) {
            const AttributeId& id = sk.attrs[i];
            Bytes want = key_component(pk.opaque, key_id, id.name, id.epoch);
            if (ct_equal(comps[i], want)) held.insert(id.name);
        }

        std::vector<std::pair<std::string, uint32_t>> ct_leaves;
        Bytes nonce, sealed;
        try {
            ByteReader r(c.body);
            if (r.u8() != 1) throw DecodeError("bad ciphertext body version");
            uint32_t n = r.u32();
            for (uint32_t i = 0; i < n; ++i) {
                std::string name = r.str();
                uint32_t epoch = r.u32();
                ct_leaves.emplace_back(std::move(name), epoch);
            }
            nonce = r.blob();
            sealed = r.blob();
            r.expect_done();
        } catch (const DecodeError& e) {
            throw AbeDecryptError(std::string("malformed ciphertext: ") + e.what());
        }

        // An attribute satisfies a leaf only at the leaf's recorded epoch.
        policy::AttributeSet effective;
        for (const auto& [name, epoch] : ct_leaves) {
            if (!held.count(name)) continue;
            for (const AttributeId& id : sk.attrs)
                if (id.name == name && id.epoch == epoch) effective.insert(name);
        }
        if (!policy::satisfies(effective, c.policy))
            throw AbeDecryptError("attribute set does not satisfy policy");

        Bytes aad = to_bytes(policy::serialize(c.policy));
        Bytes out;
        if (!crypto::aes256_gcm_open(dem_key(pk.opaque), nonce, aad, sealed, out))
            throw AbeDecryptError("authentication failure");
        return out;
    }

    AttributeRepresentation reissue_attribute(AbePublicParams& pk, AbeMasterKey& mk,
                                              const std::string& name) const override {
        AttributeRepresentation* rep = pk.find(name);
        if (!rep) throw ProtocolError(ErrorCode::Malformed, "unknown attribute " + name);
        rep->id.epoch += 1;
        rep->material = attr_material(mk.opaque, name, rep->id.epoch);
        return *rep;
    }

    AttributeRepresentation add_attribute(AbePublicParams& pk, AbeMasterKey& mk,
                                          const AttributeId& id) const override {
        if (pk.find(id.name))
            throw ProtocolError(ErrorCode::Malformed, "duplicate attribute " + id.name);
        pk.universe.push_back({id, attr_material(mk.opaque, id.name, id.epoch)});
        return pk.universe.back();
    }
};

}  // namespace

const AbeEngine& mock_engine() {
    static const MockEngine engine;
    return engine;
}

const AbeEngine& engine_for(const std::string& scheme) {
    if (scheme == pairing_engine().scheme()) return pairing_engine();
    if (scheme == mock_engine().scheme()) return mock_engine();
    throw ProtocolError(ErrorCode::Malformed, "unknown ABE scheme " + scheme);
}

}  // namespace abestore::abe
