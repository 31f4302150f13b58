#include "abestore/abe/types.hpp"

#include <algorithm>

namespace abestore::abe {

const char* attribute_role_name(AttributeRole r) {
    switch (r) {
        case AttributeRole::Generic: return "generic";
        case AttributeRole::ServiceNode: return "service-node";
        case AttributeRole::Authorization: return "authorization";
        case AttributeRole::Validity: return "validity";
    }
    return "?";
}

void AttributeId::write(ByteWriter& w) const {
    w.str(name);
    w.u8(uint8_t(role));
    w.u32(epoch);
}

AttributeId AttributeId::read(ByteReader& r) {
    AttributeId id;
    id.name = r.str();
    uint8_t role = r.u8();
    if (role > uint8_t(AttributeRole::Validity)) throw DecodeError("bad attribute role");
    id.role = AttributeRole(role);
    id.epoch = r.u32();
    return id;
}

void AttributeRepresentation::write(ByteWriter& w) const {
    id.write(w);
    w.blob(material);
}

AttributeRepresentation AttributeRepresentation::read(ByteReader& r) {
    AttributeRepresentation rep;
    rep.id = AttributeId::read(r);
    rep.material = r.blob();
    return rep;
}

const AttributeRepresentation* AbePublicParams::find(const std::string& name) const {
    for (const auto& rep : universe)
        if (rep.id.name == name) return &rep;
    return nullptr;
}

AttributeRepresentation* AbePublicParams::find(const std::string& name) {
    for (auto& rep : universe)
        if (rep.id.name == name) return &rep;
    return nullptr;
}

Bytes AbePublicParams::serialize() const {
    ByteWriter w;
    w.u8(1);
    w.str(scheme);
    w.u32(security_parameter);
    w.u32(uint32_t(universe.size()));
    for (const auto& rep : universe) rep.write(w);
    w.blob(opaque);
    return w.take();
}

AbePublicParams AbePublicParams::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad AbePublicParams version");
    AbePublicParams pk;
    pk.scheme = r.str();
    pk.security_parameter = r.u32();
    uint32_t n = r.u32();
    pk.universe.reserve(n);
    for (uint32_t i = 0; i < n; ++i) pk.universe.push_back(AttributeRepresentation::read(r));
    pk.opaque = r.blob();
    r.expect_done();
    return pk;
}

policy::AttributeSet AbePrivateKey::names() const {
    policy::AttributeSet s;
    for (const auto& id : attrs) s.insert(id.name);
    return s;
}

Bytes AbePrivateKey::serialize() const {
    ByteWriter w;
    w.u8(1);
    w.str(scheme);
    w.u32(uint32_t(attrs.size()));
    for (const auto& id : attrs) id.write(w);
    w.blob(opaque);
    return w.take();
}

AbePrivateKey AbePrivateKey::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad AbePrivateKey version");
    AbePrivateKey sk;
    sk.scheme = r.str();
    uint32_t n = r.u32();
    sk.attrs.reserve(n);
    for (uint32_t i = 0; i < n; ++i) sk.attrs.push_back(AttributeId::read(r));
    sk.opaque = r.blob();
    r.expect_done();
    return sk;
}

Bytes AbeCiphertext::serialize() const {
    ByteWriter w;
    w.u8(1);
    w.str(policy::serialize(policy));
    w.blob(body);
    return w.take();
}

AbeCiphertext AbeCiphertext::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad AbeCiphertext version");
    AbeCiphertext c;
    try {
        c.policy = policy::parse(r.str());
    } catch (const policy::PolicyParseError& e) {
        throw DecodeError(std::string("bad policy text: ") + e.what());
    }
    c.body = r.blob();
    r.expect_done();
    return c;
}

Bytes ChainCiphertext::serialize() const {
    ByteWriter w;
    w.u8(1);
    w.blob(kem_header.serialize());
    w.u32(chunk_size);
    w.u64(plaintext_len);
    w.u32(uint32_t(chunks.size()));
    for (const auto& c : chunks) w.blob(c);
    return w.take();
}

ChainCiphertext ChainCiphertext::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad ChainCiphertext version");
    ChainCiphertext c;
    Bytes hdr = r.blob();
    c.kem_header = AbeCiphertext::deserialize(hdr);
    c.chunk_size = r.u32();
    if (c.chunk_size == 0) throw DecodeError("zero chunk size");
    c.plaintext_len = r.u64();
    uint32_t n = r.u32();
    c.chunks.reserve(n);
    for (uint32_t i = 0; i < n; ++i) c.chunks.push_back(r.blob());
    r.expect_done();
    return c;
}

}  // namespace abestore::abe
