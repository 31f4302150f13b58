#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abestore/bytes.hpp"
#include "abestore/policy.hpp"

namespace abestore::abe {

enum class AttributeRole : uint8_t {
    Generic = 0,      // a_i
    ServiceNode = 1,  // SN
    Authorization = 2,  // AN_{A_j}
    Validity = 3,     // v_k
};

const char* attribute_role_name(AttributeRole r);

// Names identify attributes; the epoch changes when the attribute is
// revoked and re-issued, which rotates the underlying representation.
struct AttributeId {
    std::string name;
    AttributeRole role = AttributeRole::Generic;
    uint32_t epoch = 0;

    bool operator==(const AttributeId& o) const = default;
    auto operator<=>(const AttributeId& o) const = default;

    void write(ByteWriter& w) const;
    static AttributeId read(ByteReader& r);
};

struct AbeSystemConfig {
    uint32_t security_parameter = 128;  // 128, 192 or 256
    std::vector<AttributeId> universe;
};

// The concrete (scheme-specific) realization of an attribute at its
// current epoch.
struct AttributeRepresentation {
    AttributeId id;
    Bytes material;

    void write(ByteWriter& w) const;
    static AttributeRepresentation read(ByteReader& r);
};

struct AbePublicParams {
    std::string scheme;
    uint32_t security_parameter = 128;
    std::vector<AttributeRepresentation> universe;
    Bytes opaque;

    const AttributeRepresentation* find(const std::string& name) const;
    AttributeRepresentation* find(const std::string& name);

    Bytes serialize() const;
    static AbePublicParams deserialize(std::span<const uint8_t> data);
};

// Held by the authority only; deliberately has no serialize-to-wire path
// beyond the authority's own state file.
struct AbeMasterKey {
    std::string scheme;
    Bytes opaque;
};

struct AbePrivateKey {
    std::string scheme;
    std::vector<AttributeId> attrs;  // sorted, unique
    Bytes opaque;

    policy::AttributeSet names() const;

    Bytes serialize() const;
    static AbePrivateKey deserialize(std::span<const uint8_t> data);
};

struct AbeCiphertext {
    policy::PolicyPtr policy;  // carried in clear
    Bytes body;

    Bytes serialize() const;
    static AbeCiphertext deserialize(std::span<const uint8_t> data);
};

inline constexpr size_t kDefaultChunkSize = 64 * 1024;

struct ChainCiphertext {
    AbeCiphertext kem_header;  // encapsulates a fresh 32-byte data key
    uint32_t chunk_size = kDefaultChunkSize;
    uint64_t plaintext_len = 0;
    std::vector<Bytes> chunks;  // chunk i: AES-256-GCM ct || tag, nonce = BE(i)

    Bytes serialize() const;
    static ChainCiphertext deserialize(std::span<const uint8_t> data);
};

}  // namespace abestore::abe
