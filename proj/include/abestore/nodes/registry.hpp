#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "abestore/abe/types.hpp"
#include "abestore/mst.hpp"

namespace abestore::nodes {

enum class NodeRole : uint8_t {
    Authority = 0,
    Authorization = 1,
    Service = 2,
};

const char* node_role_name(NodeRole r);
NodeRole node_role_from_name(const std::string& name);

// One whitelist row of the public index.
struct NodeEntry {
    std::string id;
    NodeRole role = NodeRole::Service;
    std::string address;
    Bytes m_public;  // serialized signature public key
    std::vector<std::string> authorized;  // A_j (authorization nodes)
};

// The public index: system public parameters, the node whitelist, and the
// blacklist of recovered (compromised) nodes.  Every mutation bumps the
// version and, when a log path is configured, appends one JSON line so a
// second process can replay the same view.
class Registry {
public:
    explicit Registry(std::filesystem::path log_path = {});

    std::shared_ptr<const abe::AbePublicParams> params() const;
    void publish_params(const abe::AbePublicParams& pk);

    void upsert_node(const NodeEntry& entry);
    // Removes the node from the whitelist and remembers both its id and
    // its public key as revoked.
    void blacklist_node(const std::string& id);

    bool is_blacklisted(const std::string& id) const;
    std::optional<NodeEntry> find_node(const std::string& id) const;
    std::map<std::string, NodeEntry> whitelist() const;
    std::vector<NodeEntry> nodes_with_role(NodeRole role) const;

    // issuer public key -> authorized attribute names, for MST check 1.
    mst::IssuerWhitelist issuer_whitelist() const;

    uint64_t version() const;

private:
    void append_log(const std::string& op, const std::string& payload_json);
    // Replays any log lines appended by other processes since the last
    // read; called by every accessor so daemons track admin changes live.
    void refresh_locked() const;
    void apply_line(const std::string& line) const;

    mutable std::mutex mu_;
    // State is mutable because const accessors refresh from the shared log.
    mutable std::shared_ptr<const abe::AbePublicParams> params_;
    mutable std::map<std::string, NodeEntry> whitelist_;
    mutable std::set<std::string> blacklist_ids_;
    mutable std::set<Bytes> blacklist_keys_;
    mutable uint64_t version_ = 0;
    mutable uint64_t log_offset_ = 0;
    std::filesystem::path log_path_;
};

}  // namespace abestore::nodes
