#pragma once

#include <map>

#include "abestore/abe/engine.hpp"
#include "abestore/suite.hpp"

namespace abestore::mst {

inline constexpr size_t kNonceLen = 16;

// MST_1: the signed body of a master session token.
struct MstCore {
    abe::AbeCiphertext k2_blob;  // E_ABE(K_2, SN and all validity attrs)
    std::vector<std::string> authorized_attrs;  // A', sorted
    uint64_t expiry = 0;  // absolute seconds
    Bytes nonce;          // R, 16 bytes
    suite::SigPublicKey consumer_pk;  // PK_self

    // Injective, byte-stable encoding; this is the exact signature input.
    Bytes canonical_bytes() const;
    static MstCore read(ByteReader& r);
};

struct MasterSessionToken {
    MstCore core;
    Bytes signature;  // MST_2 over canonical_bytes(core)
    Bytes sealed;     // MST_3 = E_SYM(K_1 || expiry || R, K_2)
    Bytes issuer_id;  // M_public: serialized issuer signature public key

    Bytes serialize() const;
    static MasterSessionToken deserialize(std::span<const uint8_t> data);
};

struct AuthRequest {
    std::vector<std::string> attrs;     // A
    std::vector<std::string> validity;  // V
    uint64_t ttl_req = 0;               // seconds
    suite::SigPublicKey consumer_pk;

    Bytes serialize() const;
    static AuthRequest deserialize(std::span<const uint8_t> data);
};

struct IssuerConfig {
    const abe::AbeEngine* engine = nullptr;
    const abe::AbePublicParams* pk = nullptr;
    policy::AttributeSet authorizable;  // attrs this node may vouch for
    suite::SigKeyPair sig;
    std::string sn_attr = "SN";
    uint32_t min_validity = 1;  // u
    uint64_t ttl_max = 900;     // seconds
};

struct IssueResult {
    abe::AbeCiphertext k_prime;  // K' = E_ABE(K_1, conj(A) and conj(V))
    Bytes mst_prime;             // MST' = E_SYM(MST, K_1)
};

// Issuer side of Attribute-Authenticate.  Throws ProtocolError(AuthFailed) when A' is empty,
// |V| < u, or TTL_req is zero; Malformed for unknown/non-validity ids.
IssueResult issue(const IssuerConfig& cfg, const AuthRequest& req, uint64_t now,
                  RandomSource& rng);

// Consumer side of step 12: open K' with the private ABE key, then MST'.
struct RecoveredToken {
    Bytes k1;
    MasterSessionToken token;
};
RecoveredToken recover_token(const abe::AbeEngine& engine, const abe::AbePublicParams& pk,
                             const abe::AbePrivateKey& consumer_key, const IssueResult& issued);

// issuer public key bytes -> attribute names that issuer may authorize
using IssuerWhitelist = std::map<Bytes, policy::AttributeSet>;

struct SessionGrant {
    Bytes k1;
    std::vector<std::string> authorized_attrs;
    uint64_t expiry = 0;
    suite::SigPublicKey consumer_pk;
};

// The five verification checks, in order; failures map to the distinct
// codes UnknownIssuer, BadSignature, SealedMismatch, Expired.
SessionGrant verify(const MasterSessionToken& token, const abe::AbeEngine& engine,
                    const abe::AbePublicParams& pk, const abe::AbePrivateKey& service_key,
                    const IssuerWhitelist& whitelist, uint64_t now);

}  // namespace abestore::mst
