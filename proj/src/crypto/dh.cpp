#include "abestore/crypto/dh.hpp"

#include <openssl/bn.h>

#include <memory>
#include <stdexcept>

#include "abestore/errors.hpp"

namespace abestore::crypto {

namespace {

// RFC 3526, 2048-bit MODP group (id 14).
const char* kModp2048Hex =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

constexpr size_t kGroupLen = 256;

struct BnDeleter {
    void operator()(BIGNUM* b) const { BN_free(b); }
};
using Bn = std::unique_ptr<BIGNUM, BnDeleter>;

struct BnCtxDeleter {
    void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
using BnCtx = std::unique_ptr<BN_CTX, BnCtxDeleter>;

const BIGNUM* group_prime() {
    static BIGNUM* p = [] {
        BIGNUM* b = nullptr;
        if (!BN_hex2bn(&b, kModp2048Hex)) throw std::runtime_error("bad group prime");
        return b;
    }();
    return p;
}

Bytes fixed_width(const BIGNUM* b) {
    size_t n = size_t(BN_num_bytes(b));
    Bytes out(kGroupLen, 0);
    if (n > kGroupLen) throw std::runtime_error("group element too wide");
    BN_bn2bin(b, out.data() + (kGroupLen - n));
    return out;
}

}  // namespace

DhKeyPair dh_generate(RandomSource& rng) {
    BnCtx ctx(BN_CTX_new());
    // 320-bit exponent: comfortably above the ~112-bit strength of the group.
    Bytes exp = rng.bytes(40);
    exp[0] |= 0x80;
    Bn x(BN_bin2bn(exp.data(), int(exp.size()), nullptr));
    Bn g(BN_new());
    BN_set_word(g.get(), 2);
    Bn pub(BN_new());
    if (!BN_mod_exp(pub.get(), g.get(), x.get(), group_prime(), ctx.get()))
        throw std::runtime_error("dh keygen failed");
    DhKeyPair out;
    out.priv = exp;
    out.pub = fixed_width(pub.get());
    return out;
}

Bytes dh_shared_secret(const DhKeyPair& self, std::span<const uint8_t> peer_pub) {
    if (peer_pub.size() != kGroupLen)
        throw ProtocolError(ErrorCode::Malformed, "bad DH public value length");
    BnCtx ctx(BN_CTX_new());
    Bn peer(BN_bin2bn(peer_pub.data(), int(peer_pub.size()), nullptr));
    // Reject degenerate values: y <= 1 or y >= p-1.
    Bn one(BN_new());
    BN_one(one.get());
    Bn pm1(BN_dup(group_prime()));
    BN_sub(pm1.get(), pm1.get(), one.get());
    if (BN_cmp(peer.get(), one.get()) <= 0 || BN_cmp(peer.get(), pm1.get()) >= 0)
        throw ProtocolError(ErrorCode::Malformed, "degenerate DH public value");
    Bn x(BN_bin2bn(self.priv.data(), int(self.priv.size()), nullptr));
    Bn shared(BN_new());
    if (!BN_mod_exp(shared.get(), peer.get(), x.get(), group_prime(), ctx.get()))
        throw std::runtime_error("dh agreement failed");
    return fixed_width(shared.get());
}

}  // namespace abestore::crypto
