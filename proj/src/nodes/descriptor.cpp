#include "abestore/nodes/descriptor.hpp"

#include "abestore/errors.hpp"

namespace abestore::nodes {

Bytes NodeDescriptor::serialize() const {
    ByteWriter w;
    w.u8(1);
    w.str(id);
    w.u8(uint8_t(role));
    w.blob(key.serialize());
    w.blob(sig.serialize());
    w.u32(uint32_t(responsibility.size()));
    for (const std::string& a : responsibility) w.str(a);
    w.str(role_attr);
    return w.take();
}

NodeDescriptor NodeDescriptor::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad node descriptor version");
    NodeDescriptor d;
    d.id = r.str();
    uint8_t role = r.u8();
    if (role > uint8_t(NodeRole::Service)) throw DecodeError("bad node role");
    d.role = NodeRole(role);
    Bytes key = r.blob();
    d.key = abe::AbePrivateKey::deserialize(key);
    Bytes sig = r.blob();
    d.sig = suite::SigKeyPair::deserialize(sig);
    uint32_t n = r.u32();
    for (uint32_t i = 0; i < n; ++i) d.responsibility.push_back(r.str());
    d.role_attr = r.str();
    r.expect_done();
    return d;
}

}  // namespace abestore::nodes
