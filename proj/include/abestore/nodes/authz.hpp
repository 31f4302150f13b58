#pragma once

#include "abestore/abe/engine.hpp"
#include "abestore/clock.hpp"
#include "abestore/net/secure_session.hpp"
#include "abestore/nodes/descriptor.hpp"

namespace abestore::nodes {

// An authorization node: answers Attribute-Authenticate requests by
// issuing master session tokens for the attribute subset it is
// responsible for.
class AuthorizationNode {
public:
    AuthorizationNode(const abe::AbeEngine& engine, const Registry& registry,
                      NodeDescriptor desc, uint32_t min_validity, uint64_t ttl_max,
                      Clock clock);

    const NodeDescriptor& descriptor() const { return desc_; }
    void install_key(const abe::AbePrivateKey& key);

    void serve(net::Transport& t, RandomSource& rng);

private:
    const abe::AbeEngine* engine_;
    const Registry* registry_;
    NodeDescriptor desc_;
    uint32_t min_validity_;
    uint64_t ttl_max_;
    Clock clock_;
};

}  // namespace abestore::nodes
