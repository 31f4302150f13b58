#pragma once

#include "abestore/bytes.hpp"
#include "abestore/net/transport.hpp"

namespace abestore::net {

// Frame type tags.  1-15 are handshake (clear); the rest ride protected
// sessions.
enum FrameType : uint8_t {
    kKeInit = 1,
    kKeResp = 2,

    kReqAuth = 16,
    kRespAuth = 17,
    kPutOpen = 18,
    kRespPutOpen = 19,
    kPutBody = 20,
    kRespPutBody = 21,
    kGetReq = 22,
    kRespGet = 23,
    kWriteOpen = 24,
    kRespWriteOpen = 25,
    kWriteBody = 26,
    kRespWriteBody = 27,

    kRespErr = 31,
};

struct Frame {
    uint8_t type = 0;
    Bytes payload;
};

// Clear (untagged) framing, used only for the key-exchange messages:
// type u8 | length u32 | payload.
void write_clear_frame(Transport& t, uint8_t type, std::span<const uint8_t> payload);
Frame read_clear_frame(Transport& t, size_t max_payload = 1 << 20);

}  // namespace abestore::net
