#include "abestore/nodes/registry.hpp"

#include <fstream>

#include "abestore/errors.hpp"
#include "json.hpp"

namespace abestore::nodes {

using nlohmann::json;

const char* node_role_name(NodeRole r) {
    switch (r) {
        case NodeRole::Authority: return "authority";
        case NodeRole::Authorization: return "authz";
        case NodeRole::Service: return "service";
    }
    return "?";
}

NodeRole node_role_from_name(const std::string& name) {
    if (name == "authority") return NodeRole::Authority;
    if (name == "authz") return NodeRole::Authorization;
    if (name == "service") return NodeRole::Service;
    throw ProtocolError(ErrorCode::Malformed, "unknown node role " + name);
}

namespace {

json entry_to_json(const NodeEntry& e) {
    return json{{"id", e.id},
                {"role", node_role_name(e.role)},
                {"address", e.address},
                {"m_public", hex_encode(e.m_public)},
                {"authorized", e.authorized}};
}

NodeEntry entry_from_json(const json& j) {
    NodeEntry e;
    e.id = j.at("id").get<std::string>();
    e.role = node_role_from_name(j.at("role").get<std::string>());
    e.address = j.at("address").get<std::string>();
    e.m_public = hex_decode(j.at("m_public").get<std::string>());
    e.authorized = j.at("authorized").get<std::vector<std::string>>();
    return e;
}

}  // namespace

Registry::Registry(std::filesystem::path log_path) : log_path_(std::move(log_path)) {
    std::lock_guard lk(mu_);
    refresh_locked();
}

void Registry::apply_line(const std::string& line) const {
    json j = json::parse(line);
    std::string op = j.at("op").get<std::string>();
    if (op == "params") {
        Bytes raw = hex_decode(j.at("pk").get<std::string>());
        params_ = std::make_shared<const abe::AbePublicParams>(
            abe::AbePublicParams::deserialize(raw));
    } else if (op == "upsert") {
        NodeEntry e = entry_from_json(j.at("node"));
        whitelist_[e.id] = std::move(e);
    } else if (op == "blacklist") {
        std::string id = j.at("id").get<std::string>();
        auto it = whitelist_.find(id);
        if (it != whitelist_.end()) {
            blacklist_keys_.insert(it->second.m_public);
            whitelist_.erase(it);
        }
        blacklist_ids_.insert(id);
    } else {
        throw ProtocolError(ErrorCode::Malformed, "bad registry log op " + op);
    }
    version_ = j.at("version").get<uint64_t>();
}

void Registry::refresh_locked() const {
    if (log_path_.empty()) return;
    std::error_code ec;
    uint64_t size = std::filesystem::file_size(log_path_, ec);
    if (ec || size <= log_offset_) return;

    std::ifstream in(log_path_);
    in.seekg(std::streamoff(log_offset_));
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) apply_line(line);
    log_offset_ = size;
}

void Registry::append_log(const std::string& op, const std::string& payload_json) {
    if (log_path_.empty()) return;
    json j = json::parse(payload_json);
    j["op"] = op;
    j["version"] = version_;
    std::string line = j.dump() + "\n";
    std::ofstream out(log_path_, std::ios::app);
    out << line;
    log_offset_ += line.size();
}

std::shared_ptr<const abe::AbePublicParams> Registry::params() const {
    std::lock_guard lk(mu_);
    refresh_locked();
    if (!params_) throw ProtocolError(ErrorCode::Internal, "registry has no public params");
    return params_;
}

void Registry::publish_params(const abe::AbePublicParams& pk) {
    std::lock_guard lk(mu_);
    refresh_locked();
    params_ = std::make_shared<const abe::AbePublicParams>(pk);
    ++version_;
    append_log("params", json{{"pk", hex_encode(pk.serialize())}}.dump());
}

void Registry::upsert_node(const NodeEntry& entry) {
    std::lock_guard lk(mu_);
    refresh_locked();
    whitelist_[entry.id] = entry;
    ++version_;
    append_log("upsert", json{{"node", entry_to_json(entry)}}.dump());
}

void Registry::blacklist_node(const std::string& id) {
    std::lock_guard lk(mu_);
    refresh_locked();
    auto it = whitelist_.find(id);
    if (it == whitelist_.end())
        throw ProtocolError(ErrorCode::Malformed, "unknown node id " + id);
    blacklist_keys_.insert(it->second.m_public);
    whitelist_.erase(it);
    blacklist_ids_.insert(id);
    ++version_;
    append_log("blacklist", json{{"id", id}}.dump());
}

bool Registry::is_blacklisted(const std::string& id) const {
    std::lock_guard lk(mu_);
    refresh_locked();
    return blacklist_ids_.count(id) > 0;
}

std::optional<NodeEntry> Registry::find_node(const std::string& id) const {
    std::lock_guard lk(mu_);
    refresh_locked();
    auto it = whitelist_.find(id);
    if (it == whitelist_.end()) return std::nullopt;
    return it->second;
}

std::map<std::string, NodeEntry> Registry::whitelist() const {
    std::lock_guard lk(mu_);
    refresh_locked();
    return whitelist_;
}

std::vector<NodeEntry> Registry::nodes_with_role(NodeRole role) const {
    std::lock_guard lk(mu_);
    refresh_locked();
    std::vector<NodeEntry> out;
    for (const auto& [id, e] : whitelist_)
        if (e.role == role) out.push_back(e);
    return out;
}

mst::IssuerWhitelist Registry::issuer_whitelist() const {
    std::lock_guard lk(mu_);
    refresh_locked();
    mst::IssuerWhitelist out;
    for (const auto& [id, e] : whitelist_) {
        if (e.role != NodeRole::Authorization) continue;
        out[e.m_public] = policy::AttributeSet(e.authorized.begin(), e.authorized.end());
    }
    return out;
}

uint64_t Registry::version() const {
    std::lock_guard lk(mu_);
    refresh_locked();
    return version_;
}

}  // namespace abestore::nodes
