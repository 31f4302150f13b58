#include <algorithm>
#include <map>
#include <optional>

#include "abestore/abe/engine.hpp"
#include "abestore/bn254/pairing.hpp"
#include "abestore/crypto/aes.hpp"
#include "abestore/crypto/sha.hpp"
#include "abestore/errors.hpp"

// Ciphertext-policy ABE over BN254 in the threshold-tree style, adapted to
// the asymmetric pairing e : G1 x G2 -> Gt.  Attributes are hashed into G1
// from (name, epoch), so the universe is unbounded and revocation is an
// epoch bump.
//
//   PK: h = g2^beta,  A = e(g1, g2)^alpha          MK: alpha, beta
//   Key (attrs S, fresh r):
//     D    = g1^((alpha + r)/beta)
//     D_j  = g1^r * H(j)^{r_j},  D'_j = g2^{r_j}   for j in S
//   Ciphertext (policy tree, fresh s, shares q_y of s over the tree):
//     C = h^s;  per leaf y:  C_y = g2^{q_y},  C'_y = H(att_y)^{q_y}
//     message sealed with AES-GCM under KDF(A^s)
//
// Decryption pairs leaf components so each used leaf contributes
// e(g1,g2)^{r q_y}; Lagrange interpolation in the exponent recovers
// e(g1,g2)^{r s}, and e(D, C) / that = A^s.  The blinding exponent r is
// drawn per key, which is what defeats collusion: shares from keys with
// different r values do not combine.

namespace abestore::abe {

using namespace bn254;

namespace {

constexpr const char* kSchemeId = "cpabe-bn254-v1";
constexpr size_t kBlockCapacity = 32;

Fr fr_random(RandomSource& rng) {
    for (;;) {
        Bytes b = rng.bytes(32);
        b[0] &= 0x3f;  // 254 bits
        U256 x = detail::u256_from_be(b);
        if (detail::u256_less(x, kModR)) return Fr::from_u256(x);
    }
}

Fr fr_random_nonzero(RandomSource& rng) {
    for (;;) {
        Fr x = fr_random(rng);
        if (!x.is_zero()) return x;
    }
}

G1Affine attr_point(const std::string& name, uint32_t epoch) {
    ByteWriter w;
    w.str("abe-attr");
    w.str(name);
    w.u32(epoch);
    return hash_to_g1(w.bytes());
}

Bytes kem_key(const Gt& a_s) {
    return crypto::hkdf(a_s.to_bytes(), {}, "abe-kem", crypto::kAes256KeyLen);
}

struct PublicState {
    G2Affine h;
    Gt a;
};

PublicState parse_pk(const AbePublicParams& pk) {
    if (pk.scheme != kSchemeId) throw ProtocolError(ErrorCode::Malformed, "scheme mismatch");
    ByteReader r(pk.opaque);
    Bytes hb = r.blob();
    ByteReader hr(hb);
    PublicState st;
    st.h = g2_from_bytes(hr);
    st.a = Gt::from_bytes(r.blob());
    r.expect_done();
    return st;
}

struct MasterState {
    Fr alpha, beta;
};

MasterState parse_mk(const AbeMasterKey& mk) {
    if (mk.scheme != kSchemeId) throw ProtocolError(ErrorCode::Malformed, "scheme mismatch");
    ByteReader r(mk.opaque);
    Bytes a = r.raw(32), b = r.raw(32);
    r.expect_done();
    U256 ua = detail::u256_from_be(a), ub = detail::u256_from_be(b);
    return {Fr::from_u256(ua), Fr::from_u256(ub)};
}

struct KeyComponent {
    G1Affine d;       // g1^r * H(j)^{r_j}
    G2Affine dprime;  // g2^{r_j}
};

struct KeyState {
    G1Affine d;  // g1^((alpha+r)/beta)
    std::map<std::pair<std::string, uint32_t>, KeyComponent> comps;
};

KeyState parse_sk(const AbePrivateKey& sk) {
    if (sk.scheme != kSchemeId) throw AbeDecryptError("scheme mismatch");
    try {
        ByteReader r(sk.opaque);
        KeyState st;
        {
            Bytes b = r.blob();
            ByteReader br(b);
            st.d = g1_from_bytes(br);
        }
        uint32_t n = r.u32();
        for (uint32_t i = 0; i < n; ++i) {
            std::string name = r.str();
            uint32_t epoch = r.u32();
            Bytes db = r.blob(), pb = r.blob();
            ByteReader dr(db), pr(pb);
            st.comps[{name, epoch}] = {g1_from_bytes(dr), g2_from_bytes(pr)};
        }
        r.expect_done();
        return st;
    } catch (const DecodeError& e) {
        throw AbeDecryptError(std::string("malformed private key: ") + e.what());
    }
}

struct CtLeaf {
    std::string name;
    uint32_t epoch;
    G2Affine c;       // g2^{q_y}
    G1Affine cprime;  // H(att)^{q_y}
};

struct CtState {
    std::vector<CtLeaf> leaves;
    G2Affine c;  // h^s
    Bytes nonce;
    Bytes sealed;
};

CtState parse_ct(const AbeCiphertext& ct) {
    try {
        ByteReader r(ct.body);
        if (r.u8() != 1) throw DecodeError("bad ciphertext body version");
        CtState st;
        uint32_t n = r.u32();
        st.leaves.reserve(n);
        for (uint32_t i = 0; i < n; ++i) {
            CtLeaf leaf;
            leaf.name = r.str();
            leaf.epoch = r.u32();
            Bytes cb = r.blob(), pb = r.blob();
            ByteReader cr(cb), pr(pb);
            leaf.c = g2_from_bytes(cr);
            leaf.cprime = g1_from_bytes(pr);
            st.leaves.push_back(std::move(leaf));
        }
        Bytes cb = r.blob();
        ByteReader cr(cb);
        st.c = g2_from_bytes(cr);
        st.nonce = r.blob();
        st.sealed = r.blob();
        r.expect_done();
        if (st.nonce.size() != crypto::kGcmNonceLen) throw DecodeError("bad nonce length");
        return st;
    } catch (const DecodeError& e) {
        throw AbeDecryptError(std::string("malformed ciphertext: ") + e.what());
    }
}

// Assign a share of `secret` to every leaf by walking the threshold tree:
// a k-of-n gate hides its share in a degree k-1 polynomial, child i takes
// q(i+1).
void share_secret(const policy::AccessNode& node, const Fr& secret, RandomSource& rng,
                  std::vector<Fr>& out) {
    if (node.is_leaf) {
        out[node.leaf_index] = secret;
        return;
    }
    std::vector<Fr> coeff(node.threshold);
    coeff[0] = secret;
    for (uint32_t i = 1; i < node.threshold; ++i) coeff[i] = fr_random(rng);
    for (size_t i = 0; i < node.children.size(); ++i) {
        Fr x = Fr::from_u64(i + 1);
        Fr q = coeff[node.threshold - 1];
        for (int k = int(node.threshold) - 2; k >= 0; --k) q = q * x + coeff[k];
        share_secret(*node.children[i], q, rng, out);
    }
}

// Pick a satisfying subset of leaves and the flattened Lagrange coefficient
// for each (the product of the per-gate interpolation coefficients along
// the leaf's path, so the leaf shares recombine to the root secret in one
// weighted sum).
bool satisfiable(const policy::AccessNode& node, const std::vector<bool>& usable) {
    if (node.is_leaf) return usable[node.leaf_index];
    uint32_t have = 0;
    for (const auto& ch : node.children)
        if (satisfiable(*ch, usable)) ++have;
    return have >= node.threshold;
}

void assign_coefficients(const policy::AccessNode& node, const std::vector<bool>& usable,
                         const Fr& coeff, std::map<size_t, Fr>& out) {
    if (node.is_leaf) {
        out[node.leaf_index] = coeff;
        return;
    }
    std::vector<size_t> chosen;
    for (size_t i = 0; i < node.children.size() && chosen.size() < node.threshold; ++i)
        if (satisfiable(*node.children[i], usable)) chosen.push_back(i);
    for (size_t i : chosen) {
        // Lagrange basis at 0 for point x_i over the chosen set.
        Fr xi = Fr::from_u64(i + 1);
        Fr li = Fr::one();
        for (size_t j : chosen) {
            if (j == i) continue;
            Fr xj = Fr::from_u64(j + 1);
            li = li * xj * (xj - xi).inverse();
        }
        assign_coefficients(*node.children[i], usable, coeff * li, out);
    }
}

class PairingEngine final : public AbeEngine {
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

        Fr alpha = fr_random(rng);
        Fr beta = fr_random_nonzero(rng);

        AbePublicParams pk;
        pk.scheme = kSchemeId;
        pk.security_parameter = cfg.security_parameter;
        for (const auto& id : cfg.universe) {
            if (pk.find(id.name))
                throw ProtocolError(ErrorCode::Malformed, "duplicate attribute " + id.name);
            AttributeRepresentation rep;
            rep.id = id;
            rep.material = g1_to_bytes(attr_point(id.name, id.epoch));
            pk.universe.push_back(std::move(rep));
        }
        ByteWriter w;
        w.blob(g2_to_bytes(g2_mul(g2_generator(), beta)));
        w.blob(pairing(g1_generator(), g2_generator()).pow(alpha).to_bytes());
        pk.opaque = w.take();

        AbeMasterKey mk;
        mk.scheme = kSchemeId;
        ByteWriter mw;
        uint8_t buf[32];
        alpha.to_bytes(buf);
        mw.raw(std::span<const uint8_t>(buf, 32));
        beta.to_bytes(buf);
        mw.raw(std::span<const uint8_t>(buf, 32));
        mk.opaque = mw.take();
        return {std::move(pk), std::move(mk)};
    }

    AbePrivateKey generate_key(const AbePublicParams& pk, const AbeMasterKey& mk,
                               const std::vector<AttributeId>& attrs,
                               RandomSource& rng) const override {
        if (attrs.empty())
            throw ProtocolError(ErrorCode::Malformed, "empty attribute set");
        MasterState ms = parse_mk(mk);

        std::vector<AttributeId> sorted(attrs);
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (const auto& id : sorted) {
            const AttributeRepresentation* rep = pk.find(id.name);
            if (!rep) throw ProtocolError(ErrorCode::Malformed, "unknown attribute " + id.name);
            if (rep->id.epoch != id.epoch)
                throw ProtocolError(ErrorCode::Malformed, "stale epoch for " + id.name);
        }

        Fr r = fr_random(rng);
        G1Affine base_r = g1_mul(g1_generator(), r);
        ByteWriter w;
        w.blob(g1_to_bytes(g1_mul(g1_generator(), (ms.alpha + r) * ms.beta.inverse())));
        w.u32(uint32_t(sorted.size()));
        for (const auto& id : sorted) {
            Fr rj = fr_random(rng);
            w.str(id.name);
            w.u32(id.epoch);
            w.blob(g1_to_bytes(g1_add(base_r, g1_mul(attr_point(id.name, id.epoch), rj))));
            w.blob(g2_to_bytes(g2_mul(g2_generator(), rj)));
        }

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
        PublicState ps = parse_pk(pk);
        policy::AccessStructure tree = policy::compile_access_structure(p);

        // Resolve every leaf to its current-epoch representation.
        std::vector<std::pair<std::string, uint32_t>> leaf_attrs;
        for (const std::string& name : policy::leaves(*p)) {
            const AttributeRepresentation* rep = pk.find(name);
            if (!rep) throw ProtocolError(ErrorCode::Malformed, "unknown attribute " + name);
            leaf_attrs.emplace_back(name, rep->id.epoch);
        }

        Fr s = fr_random(rng);
        std::vector<Fr> shares(tree.leaf_count);
        share_secret(*tree.root, s, rng, shares);

        ByteWriter w;
        w.u8(1);
        w.u32(uint32_t(leaf_attrs.size()));
        for (size_t y = 0; y < leaf_attrs.size(); ++y) {
            const auto& [name, epoch] = leaf_attrs[y];
            w.str(name);
            w.u32(epoch);
            w.blob(g2_to_bytes(g2_mul(g2_generator(), shares[y])));
            w.blob(g1_to_bytes(g1_mul(attr_point(name, epoch), shares[y])));
        }
        w.blob(g2_to_bytes(g2_mul(ps.h, s)));

        Bytes key = kem_key(ps.a.pow(s));
        Bytes nonce = rng.bytes(crypto::kGcmNonceLen);
        Bytes aad = to_bytes(policy::serialize(p));
        w.blob(nonce);
        w.blob(crypto::aes256_gcm_seal(key, nonce, aad, message));

        AbeCiphertext ct;
        ct.policy = std::move(p);
        ct.body = w.take();
        return ct;
    }

    Bytes decrypt(const AbePublicParams& pk, const AbeCiphertext& c,
                  const AbePrivateKey& sk) const override {
        (void)pk;
        if (!c.policy) throw AbeDecryptError("ciphertext missing policy");
        KeyState ks = parse_sk(sk);
        CtState cs = parse_ct(c);

        policy::AccessStructure tree = policy::compile_access_structure(c.policy);
        // Leaf order is the policy's left-to-right order by construction.
        std::vector<std::string> names = policy::leaves(*c.policy);
        if (tree.leaf_count != cs.leaves.size() || names.size() != cs.leaves.size())
            throw AbeDecryptError("ciphertext leaves disagree with policy");
        for (size_t y = 0; y < cs.leaves.size(); ++y)
            if (names[y] != cs.leaves[y].name)
                throw AbeDecryptError("ciphertext leaves disagree with policy");

        std::vector<bool> usable(cs.leaves.size());
        for (size_t y = 0; y < cs.leaves.size(); ++y)
            usable[y] = ks.comps.count({cs.leaves[y].name, cs.leaves[y].epoch}) != 0;
        if (!satisfiable(*tree.root, usable))
            throw AbeDecryptError("attribute set does not satisfy policy");

        std::map<size_t, Fr> coeffs;
        assign_coefficients(*tree.root, usable, Fr::one(), coeffs);

        // One multi-pairing:
        //   e(D, C) * prod_y [ e(D_j^{-lam_y}, C_y) * e(C'_y^{lam_y}, D'_j) ]
        // = e(g1,g2)^{(alpha+r)s} * e(g1,g2)^{-rs} = A^s.
        std::vector<std::pair<G1Affine, G2Affine>> pairs;
        pairs.reserve(1 + 2 * coeffs.size());
        pairs.emplace_back(ks.d, cs.c);
        for (const auto& [y, lam] : coeffs) {
            const CtLeaf& leaf = cs.leaves[y];
            const KeyComponent& kc = ks.comps.at({leaf.name, leaf.epoch});
            pairs.emplace_back(g1_mul(kc.d, lam).neg(), leaf.c);
            pairs.emplace_back(g1_mul(leaf.cprime, lam), kc.dprime);
        }
        Bytes key = kem_key(pairing_product(pairs));

        Bytes aad = to_bytes(policy::serialize(c.policy));
        Bytes out;
        if (!crypto::aes256_gcm_open(key, cs.nonce, aad, cs.sealed, out))
            throw AbeDecryptError("authentication failure");
        return out;
    }

    AttributeRepresentation reissue_attribute(AbePublicParams& pk, AbeMasterKey& mk,
                                              const std::string& name) const override {
        (void)mk;
        AttributeRepresentation* rep = pk.find(name);
        if (!rep) throw ProtocolError(ErrorCode::Malformed, "unknown attribute " + name);
        rep->id.epoch += 1;
        rep->material = g1_to_bytes(attr_point(name, rep->id.epoch));
        return *rep;
    }

    AttributeRepresentation add_attribute(AbePublicParams& pk, AbeMasterKey& mk,
                                          const AttributeId& id) const override {
        (void)mk;
        if (pk.find(id.name))
            throw ProtocolError(ErrorCode::Malformed, "duplicate attribute " + id.name);
        AttributeRepresentation rep;
        rep.id = id;
        rep.material = g1_to_bytes(attr_point(id.name, id.epoch));
        pk.universe.push_back(std::move(rep));
        return pk.universe.back();
    }
};

}  // namespace

const AbeEngine& pairing_engine() {
    static const PairingEngine engine;
    return engine;
}

}  // namespace abestore::abe
