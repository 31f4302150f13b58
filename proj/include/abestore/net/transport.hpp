#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "abestore/bytes.hpp"

namespace abestore::net {

// Byte-stream endpoint under a session.  Implementations: an in-memory
// deterministic pipe (tests/harness) and TCP (deployment); the protocol
// code above never knows which.
class Transport {
public:
    virtual ~Transport() = default;

    virtual void send_bytes(std::span<const uint8_t> data) = 0;
    // Blocks for exactly n bytes; throws ProtocolError(ChannelAbort) on
    // close/EOF.
    virtual Bytes recv_exact(size_t n) = 0;
    virtual void close() = 0;
};

// Inspect/modify/drop a chunk in flight: return the (possibly altered)
// bytes to deliver, or nullopt to drop the chunk.
using TamperHook = std::function<std::optional<Bytes>(const Bytes&)>;

class MemEndpoint;

struct MemPair {
    std::unique_ptr<MemEndpoint> a, b;
};

// Connected in-memory duplex pair.  Each send_bytes call travels as one
// chunk through the peer-direction hook, so an adversary sees exactly the
// frames the protocol emits.
MemPair mem_pair();

class MemEndpoint final : public Transport {
public:
    ~MemEndpoint() override;

    void send_bytes(std::span<const uint8_t> data) override;
    Bytes recv_exact(size_t n) override;
    void close() override;

    // Applied to every chunk this endpoint sends.
    void set_send_hook(TamperHook hook);
    // Deliver raw bytes to the peer as if this endpoint had sent them
    // (bypasses the hook).
    void inject(std::span<const uint8_t> data);

private:
    friend MemPair mem_pair();
    struct Shared;
    MemEndpoint(std::shared_ptr<Shared> shared, int side);

    std::shared_ptr<Shared> shared_;
    int side_;
};

}  // namespace abestore::net
