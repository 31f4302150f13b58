#include "abestore/net/frame.hpp"

#include "abestore/errors.hpp"

namespace abestore::net {

void write_clear_frame(Transport& t, uint8_t type, std::span<const uint8_t> payload) {
    ByteWriter w;
    w.u8(type);
    w.u32(uint32_t(payload.size()));
    w.raw(payload);
    t.send_bytes(w.bytes());
}

Frame read_clear_frame(Transport& t, size_t max_payload) {
    Bytes head = t.recv_exact(5);
    ByteReader r(head);
    Frame f;
    f.type = r.u8();
    uint32_t len = r.u32();
    if (len > max_payload)
        throw ProtocolError(ErrorCode::ChannelAbort, "oversized frame");
    f.payload = t.recv_exact(len);
    return f;
}

}  // namespace abestore::net
