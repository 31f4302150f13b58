#pragma once

#include "abestore/abe/engine.hpp"
#include "abestore/clock.hpp"
#include "abestore/net/secure_session.hpp"
#include "abestore/nodes/descriptor.hpp"
#include "abestore/nodes/store.hpp"

namespace abestore::nodes {

// A storage worker: verifies master session tokens against the public
// index and serves the Put/Get/Write routines over protected sessions.
class ServiceNode {
public:
    ServiceNode(const abe::AbeEngine& engine, const Registry& registry, NodeDescriptor desc,
                Clock clock, std::filesystem::path store_dir = {});

    const NodeDescriptor& descriptor() const { return desc_; }
    ResourceStore& store() { return store_; }
    const ResourceStore& store() const { return store_; }

    // Authority push of a re-issued key (revocation / recovery).
    void install_key(const abe::AbePrivateKey& key);

    // Runs one client connection to completion: handshake, then request
    // frames until the peer closes or the channel aborts.
    void serve(net::Transport& t, RandomSource& rng);

private:
    struct PendingPut {
        mst::SessionGrant grant;
        std::string id;
        policy::PolicyPtr policy;
    };
    struct PendingWrite {
        mst::SessionGrant grant;
        std::string id;
        uint8_t mode = 0;  // 0 whole, 1 range
        uint64_t offset = 0;
        uint64_t length = 0;
    };

    mst::SessionGrant check_token(std::span<const uint8_t> raw);
    Bytes handle(uint8_t type, const Bytes& payload, uint8_t& resp_type,
                 std::optional<PendingPut>& put, std::optional<PendingWrite>& write,
                 RandomSource& rng);

    const abe::AbeEngine* engine_;
    const Registry* registry_;
    NodeDescriptor desc_;
    Clock clock_;
    ResourceStore store_;
    std::mutex key_mu_;
};

}  // namespace abestore::nodes
