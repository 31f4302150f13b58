#pragma once

#include "abestore/abe/types.hpp"
#include "abestore/nodes/registry.hpp"
#include "abestore/suite.hpp"

namespace abestore::nodes {

// Everything a provisioned node holds privately: its ABE key and signature
// keypair, plus the attribute subset it is responsible for (authorization
// nodes only).
struct NodeDescriptor {
    std::string id;
    NodeRole role = NodeRole::Service;
    abe::AbePrivateKey key;
    suite::SigKeyPair sig;
    std::vector<std::string> responsibility;  // A_j
    std::string role_attr;  // SN, or the node's AN attribute

    Bytes serialize() const;
    static NodeDescriptor deserialize(std::span<const uint8_t> data);
};

}  // namespace abestore::nodes
