#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "abestore/abe/types.hpp"

namespace abestore::nodes {

inline constexpr size_t kMaxResourceIdLen = 256;

// A stored resource: policy in clear, body as the hybrid ciphertext chain,
// owner signature over the manifest.  The plaintext never touches the
// store.
struct ResourceRecord {
    std::string id;
    policy::PolicyPtr policy;
    abe::ChainCiphertext body;
    Bytes owner_sig;
    uint64_t version = 0;

    // Derived digests, kept so range writes can re-sign without streaming
    // the whole body.
    Bytes header_digest;
    std::vector<Bytes> chunk_digests;

    void refresh_digests();
};

// The exact byte string the owner signs: identity, policy, geometry, and
// the digest of every ciphertext chunk plus the KEM header.
Bytes resource_manifest_bytes(const std::string& id, const std::string& policy_text,
                              uint32_t chunk_size, uint64_t plaintext_len,
                              std::span<const uint8_t> header_digest,
                              const std::vector<Bytes>& chunk_digests);
Bytes resource_manifest_bytes(const ResourceRecord& rec);

// Per-node resource store.  With a directory configured, state persists as
// a `manifest` JSON file plus one binary body file per resource; without
// one it is memory-only (the simulation harness mode).  All mutations are
// serialized; writers follow a replace-whole-record (last-writer-wins)
// contract.
class ResourceStore {
public:
    explicit ResourceStore(std::filesystem::path dir = {});

    bool contains(const std::string& id) const;
    std::optional<ResourceRecord> get(const std::string& id) const;
    std::vector<std::string> ids() const;

    // New resource; throws DuplicateResource if the id exists.
    void put(ResourceRecord rec);
    // Overwrite of an existing resource; throws NoSuchResource.
    void replace(ResourceRecord rec);

    // Every stored byte, for the harness exfiltration scans.
    Bytes raw_dump() const;

private:
    void persist(const ResourceRecord& rec);
    void save_manifest_locked();

    mutable std::mutex mu_;
    std::map<std::string, ResourceRecord> records_;
    std::filesystem::path dir_;
};

}  // namespace abestore::nodes
