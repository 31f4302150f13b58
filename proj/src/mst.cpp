#include "abestore/mst.hpp"

#include <algorithm>

#include "abestore/crypto/aes.hpp"
#include "abestore/errors.hpp"

namespace abestore::mst {

namespace {

constexpr uint8_t kCoreVersion = 1;

Bytes seal_sym(const Bytes& key, std::span<const uint8_t> plain, RandomSource& rng) {
    suite::SymKey k(key);
    return k.encrypt(rng, plain);
}

Bytes open_sym(const Bytes& key, std::span<const uint8_t> sealed) {
    suite::SymKey k(key);
    return k.decrypt(sealed);
}

}  // namespace

Bytes MstCore::canonical_bytes() const {
    ByteWriter w;
    w.u8(kCoreVersion);
    w.blob(k2_blob.serialize());
    w.u32(uint32_t(authorized_attrs.size()));
    for (const auto& a : authorized_attrs) w.str(a);
    w.u64(expiry);
    if (nonce.size() != kNonceLen) throw ProtocolError(ErrorCode::Malformed, "bad nonce length");
    w.raw(nonce);
    w.blob(consumer_pk.serialize());
    return w.take();
}

MstCore MstCore::read(ByteReader& r) {
    if (r.u8() != kCoreVersion) throw DecodeError("bad MST core version");
    MstCore core;
    core.k2_blob = abe::AbeCiphertext::deserialize(r.blob());
    uint32_t n = r.u32();
    core.authorized_attrs.reserve(n);
    for (uint32_t i = 0; i < n; ++i) core.authorized_attrs.push_back(r.str());
    core.expiry = r.u64();
    core.nonce = r.raw(kNonceLen);
    core.consumer_pk = suite::SigPublicKey::deserialize(r.blob());
    return core;
}

Bytes MasterSessionToken::serialize() const {
    ByteWriter w;
    w.raw(core.canonical_bytes());
    w.blob(signature);
    w.blob(sealed);
    w.blob(issuer_id);
    return w.take();
}

MasterSessionToken MasterSessionToken::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    MasterSessionToken t;
    t.core = MstCore::read(r);
    t.signature = r.blob();
    t.sealed = r.blob();
    t.issuer_id = r.blob();
    r.expect_done();
    return t;
}

Bytes AuthRequest::serialize() const {
    ByteWriter w;
    w.u8(1);
    w.u32(uint32_t(attrs.size()));
    for (const auto& a : attrs) w.str(a);
    w.u32(uint32_t(validity.size()));
    for (const auto& v : validity) w.str(v);
    w.u64(ttl_req);
    w.blob(consumer_pk.serialize());
    return w.take();
}

AuthRequest AuthRequest::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad AuthRequest version");
    AuthRequest req;
    uint32_t n = r.u32();
    for (uint32_t i = 0; i < n; ++i) req.attrs.push_back(r.str());
    uint32_t u = r.u32();
    for (uint32_t i = 0; i < u; ++i) req.validity.push_back(r.str());
    req.ttl_req = r.u64();
    req.consumer_pk = suite::SigPublicKey::deserialize(r.blob());
    r.expect_done();
    return req;
}

IssueResult issue(const IssuerConfig& cfg, const AuthRequest& req, uint64_t now,
                  RandomSource& rng) {
    if (req.ttl_req == 0)
        throw ProtocolError(ErrorCode::AuthFailed, "non-positive TTL request");
    if (req.validity.size() < cfg.min_validity)
        throw ProtocolError(ErrorCode::AuthFailed, "too few validity attributes");
    if (req.attrs.empty())
        throw ProtocolError(ErrorCode::AuthFailed, "empty attribute request");

    for (const auto& v : req.validity) {
        const abe::AttributeRepresentation* rep = cfg.pk->find(v);
        if (!rep || rep->id.role != abe::AttributeRole::Validity)
            throw ProtocolError(ErrorCode::Malformed, "not a validity attribute: " + v);
    }

    // A' = the requested attributes this node may vouch for.
    std::vector<std::string> authorized;
    for (const auto& a : req.attrs)
        if (cfg.authorizable.count(a)) authorized.push_back(a);
    std::sort(authorized.begin(), authorized.end());
    authorized.erase(std::unique(authorized.begin(), authorized.end()), authorized.end());
    if (authorized.empty())
        throw ProtocolError(ErrorCode::AuthFailed, "no authorizable attributes");

    uint64_t expiry = now + std::min(req.ttl_req, cfg.ttl_max);

    Bytes k1 = rng.bytes(crypto::kAes256KeyLen);
    Bytes k2 = rng.bytes(crypto::kAes256KeyLen);
    Bytes r = rng.bytes(kNonceLen);

    // K' under conj(A) and conj(V) -- the full advertised A, as specified,
    // not just A'.
    std::vector<std::string> kprime_names(req.attrs);
    kprime_names.insert(kprime_names.end(), req.validity.begin(), req.validity.end());
    policy::PolicyPtr kprime_policy = policy::conjunction(kprime_names);

    IssueResult out;
    out.k_prime = cfg.engine->encrypt(*cfg.pk, k1, kprime_policy, rng);

    MstCore core;
    std::vector<std::string> sn_names{cfg.sn_attr};
    sn_names.insert(sn_names.end(), req.validity.begin(), req.validity.end());
    core.k2_blob = cfg.engine->encrypt(*cfg.pk, k2, policy::conjunction(sn_names), rng);
    core.authorized_attrs = std::move(authorized);
    core.expiry = expiry;
    core.nonce = r;
    core.consumer_pk = req.consumer_pk;

    MasterSessionToken token;
    token.signature = suite::sign(cfg.sig, core.canonical_bytes());
    ByteWriter sw;
    sw.raw(k1);
    sw.u64(expiry);
    sw.raw(r);
    token.sealed = seal_sym(k2, sw.bytes(), rng);
    token.issuer_id = cfg.sig.pub.serialize();
    token.core = std::move(core);

    out.mst_prime = seal_sym(k1, token.serialize(), rng);
    return out;
}

RecoveredToken recover_token(const abe::AbeEngine& engine, const abe::AbePublicParams& pk,
                             const abe::AbePrivateKey& consumer_key, const IssueResult& issued) {
    RecoveredToken out;
    out.k1 = engine.decrypt(pk, issued.k_prime, consumer_key);
    if (out.k1.size() != crypto::kAes256KeyLen)
        throw ProtocolError(ErrorCode::Malformed, "bad K1 length");
    Bytes raw = open_sym(out.k1, issued.mst_prime);
    out.token = MasterSessionToken::deserialize(raw);
    return out;
}

SessionGrant verify(const MasterSessionToken& token, const abe::AbeEngine& engine,
                    const abe::AbePublicParams& pk, const abe::AbePrivateKey& service_key,
                    const IssuerWhitelist& whitelist, uint64_t now) {
    // (1) issuer known and authorized for every attribute in A'.
    auto it = whitelist.find(token.issuer_id);
    if (it == whitelist.end())
        throw ProtocolError(ErrorCode::UnknownIssuer, "issuer not whitelisted");
    for (const auto& a : token.core.authorized_attrs)
        if (!it->second.count(a))
            throw ProtocolError(ErrorCode::UnknownIssuer,
                                "issuer not authorized for attribute " + a);

    // (2) signature over the canonical core.
    suite::SigPublicKey issuer_pk;
    try {
        issuer_pk = suite::SigPublicKey::deserialize(token.issuer_id);
    } catch (const DecodeError&) {
        throw ProtocolError(ErrorCode::UnknownIssuer, "malformed issuer id");
    }
    if (!suite::verify(issuer_pk, token.core.canonical_bytes(), token.signature))
        throw ProtocolError(ErrorCode::BadSignature, "MST signature invalid");

    // (3) recover K_2, open MST_3.
    Bytes k1;
    uint64_t sealed_expiry;
    Bytes sealed_nonce;
    try {
        Bytes k2 = engine.decrypt(pk, token.core.k2_blob, service_key);
        if (k2.size() != crypto::kAes256KeyLen) throw DecodeError("bad K2 length");
        Bytes plain = open_sym(k2, token.sealed);
        ByteReader r(plain);
        k1 = r.raw(crypto::kAes256KeyLen);
        sealed_expiry = r.u64();
        sealed_nonce = r.raw(kNonceLen);
        r.expect_done();
    } catch (const AbeDecryptError& e) {
        throw ProtocolError(ErrorCode::SealedMismatch, std::string("K2 recovery: ") + e.what());
    } catch (const DecodeError& e) {
        throw ProtocolError(ErrorCode::SealedMismatch, std::string("MST3: ") + e.what());
    } catch (const ProtocolError& e) {
        throw ProtocolError(ErrorCode::SealedMismatch, std::string("MST3: ") + e.what());
    }

    // (4) R and expiry agree between MST_1 and MST_3.
    if (sealed_expiry != token.core.expiry || sealed_nonce != token.core.nonce)
        throw ProtocolError(ErrorCode::SealedMismatch, "core and sealed fields disagree");

    // (5) not expired.
    if (now >= token.core.expiry)
        throw ProtocolError(ErrorCode::Expired, "MST expired");

    SessionGrant grant;
    grant.k1 = std::move(k1);
    grant.authorized_attrs = token.core.authorized_attrs;
    grant.expiry = token.core.expiry;
    grant.consumer_pk = token.core.consumer_pk;
    return grant;
}

}  // namespace abestore::mst
