#include "abestore/crypto/rsa.hpp"

#include <openssl/bn.h>

#include <memory>
#include <stdexcept>

#include "abestore/crypto/sha.hpp"

namespace abestore::crypto {

namespace {

struct BnDeleter {
    void operator()(BIGNUM* b) const { BN_free(b); }
};
using Bn = std::unique_ptr<BIGNUM, BnDeleter>;

struct BnCtxDeleter {
    void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
using BnCtx = std::unique_ptr<BN_CTX, BnCtxDeleter>;

Bn bn_new() {
    Bn b(BN_new());
    if (!b) throw std::runtime_error("BN_new failed");
    return b;
}

Bn bn_from_bytes(std::span<const uint8_t> data) {
    Bn b(BN_bin2bn(data.data(), int(data.size()), nullptr));
    if (!b) throw std::runtime_error("BN_bin2bn failed");
    return b;
}

Bytes bn_to_bytes(const BIGNUM* b, size_t width = 0) {
    size_t n = size_t(BN_num_bytes(b));
    if (width == 0) width = n;
    if (n > width) throw std::runtime_error("value exceeds field width");
    Bytes out(width, 0);
    BN_bn2bin(b, out.data() + (width - n));
    return out;
}

// Draws an odd candidate with the top two bits set and tests primality.
Bn random_prime(RandomSource& rng, int bits, const BIGNUM* e, BN_CTX* ctx) {
    Bn one = bn_new();
    BN_one(one.get());
    Bn gcd = bn_new();
    Bn pm1 = bn_new();
    for (;;) {
        Bytes cand = rng.bytes(size_t(bits / 8));
        cand[0] |= 0xc0;
        cand.back() |= 0x01;
        Bn p = bn_from_bytes(cand);
        if (BN_check_prime(p.get(), ctx, nullptr) != 1) continue;
        // e must be invertible mod p-1
        if (!BN_sub(pm1.get(), p.get(), one.get())) throw std::runtime_error("BN_sub failed");
        if (!BN_gcd(gcd.get(), pm1.get(), e, ctx)) throw std::runtime_error("BN_gcd failed");
        if (BN_is_one(gcd.get())) return p;
    }
}

// SHA-256 DigestInfo prefix (RFC 8017 section 9.2 note 1).
const uint8_t kSha256Prefix[] = {0x30, 0x31, 0x30, 0x0d, 0x06, 0x09, 0x60, 0x86, 0x48, 0x01,
                                 0x65, 0x03, 0x04, 0x02, 0x01, 0x05, 0x00, 0x04, 0x20};

Bytes emsa_pkcs1(std::span<const uint8_t> message, size_t em_len) {
    Bytes digest = sha256(message);
    size_t t_len = sizeof(kSha256Prefix) + digest.size();
    if (em_len < t_len + 11) throw std::runtime_error("modulus too small");
    Bytes em(em_len, 0xff);
    em[0] = 0x00;
    em[1] = 0x01;
    em[em_len - t_len - 1] = 0x00;
    std::memcpy(em.data() + em_len - t_len, kSha256Prefix, sizeof(kSha256Prefix));
    std::memcpy(em.data() + em_len - digest.size(), digest.data(), digest.size());
    return em;
}

}  // namespace

Bytes RsaPublicKey::serialize() const {
    ByteWriter w;
    w.u8(1);
    w.blob(n);
    w.blob(e);
    return w.take();
}

RsaPublicKey RsaPublicKey::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad rsa public key version");
    RsaPublicKey k;
    k.n = r.blob();
    k.e = r.blob();
    r.expect_done();
    return k;
}

Bytes RsaKeyPair::serialize() const {
    ByteWriter w;
    w.u8(1);
    w.blob(pub.n);
    w.blob(pub.e);
    w.blob(d);
    return w.take();
}

RsaKeyPair RsaKeyPair::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad rsa key version");
    RsaKeyPair k;
    k.pub.n = r.blob();
    k.pub.e = r.blob();
    k.d = r.blob();
    r.expect_done();
    return k;
}

RsaKeyPair rsa_generate(RandomSource& rng, int bits) {
    if (bits % 16 != 0 || bits < 1024) throw std::invalid_argument("bad rsa modulus size");
    BnCtx ctx(BN_CTX_new());
    if (!ctx) throw std::runtime_error("BN_CTX_new failed");

    Bn e = bn_new();
    if (!BN_set_word(e.get(), 65537)) throw std::runtime_error("BN_set_word failed");

    Bn p = random_prime(rng, bits / 2, e.get(), ctx.get());
    Bn q = random_prime(rng, bits / 2, e.get(), ctx.get());
    while (BN_cmp(p.get(), q.get()) == 0) q = random_prime(rng, bits / 2, e.get(), ctx.get());

    Bn n = bn_new();
    if (!BN_mul(n.get(), p.get(), q.get(), ctx.get())) throw std::runtime_error("BN_mul failed");

    Bn one = bn_new();
    BN_one(one.get());
    Bn pm1 = bn_new(), qm1 = bn_new(), phi = bn_new();
    BN_sub(pm1.get(), p.get(), one.get());
    BN_sub(qm1.get(), q.get(), one.get());
    if (!BN_mul(phi.get(), pm1.get(), qm1.get(), ctx.get()))
        throw std::runtime_error("BN_mul failed");

    Bn d(BN_mod_inverse(nullptr, e.get(), phi.get(), ctx.get()));
    if (!d) throw std::runtime_error("BN_mod_inverse failed");

    RsaKeyPair out;
    out.pub.n = bn_to_bytes(n.get(), size_t(bits / 8));
    out.pub.e = bn_to_bytes(e.get());
    out.d = bn_to_bytes(d.get());
    return out;
}

Bytes rsa_sign(const RsaKeyPair& key, std::span<const uint8_t> message) {
    BnCtx ctx(BN_CTX_new());
    Bn n = bn_from_bytes(key.pub.n);
    Bn d = bn_from_bytes(key.d);
    Bytes em = emsa_pkcs1(message, key.pub.n.size());
    Bn m = bn_from_bytes(em);
    Bn s = bn_new();
    if (!BN_mod_exp(s.get(), m.get(), d.get(), n.get(), ctx.get()))
        throw std::runtime_error("BN_mod_exp failed");
    return bn_to_bytes(s.get(), key.pub.n.size());
}

bool rsa_verify(const RsaPublicKey& key, std::span<const uint8_t> message,
                std::span<const uint8_t> signature) {
    if (signature.size() != key.n.size()) return false;
    try {
        BnCtx ctx(BN_CTX_new());
        Bn n = bn_from_bytes(key.n);
        Bn e = bn_from_bytes(key.e);
        Bn s = bn_from_bytes(signature);
        if (BN_cmp(s.get(), n.get()) >= 0) return false;
        Bn m = bn_new();
        if (!BN_mod_exp(m.get(), s.get(), e.get(), n.get(), ctx.get())) return false;
        Bytes em = bn_to_bytes(m.get(), key.n.size());
        Bytes expect = emsa_pkcs1(message, key.n.size());
        return ct_equal(em, expect);
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace abestore::crypto
