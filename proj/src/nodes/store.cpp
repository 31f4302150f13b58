#include "abestore/nodes/store.hpp"

#include <fstream>

#include "abestore/crypto/sha.hpp"
#include "abestore/errors.hpp"
#include "json.hpp"

namespace abestore::nodes {

using nlohmann::json;

void ResourceRecord::refresh_digests() {
    header_digest = crypto::sha256(body.kem_header.serialize());
    chunk_digests.clear();
    chunk_digests.reserve(body.chunks.size());
    for (const Bytes& c : body.chunks) chunk_digests.push_back(crypto::sha256(c));
}

Bytes resource_manifest_bytes(const std::string& id, const std::string& policy_text,
                              uint32_t chunk_size, uint64_t plaintext_len,
                              std::span<const uint8_t> header_digest,
                              const std::vector<Bytes>& chunk_digests) {
    ByteWriter w;
    w.str("resource-manifest-v1");
    w.str(id);
    w.str(policy_text);
    w.u32(chunk_size);
    w.u64(plaintext_len);
    w.blob(header_digest);
    w.u32(uint32_t(chunk_digests.size()));
    for (const Bytes& d : chunk_digests) w.raw(d);
    return w.take();
}

Bytes resource_manifest_bytes(const ResourceRecord& rec) {
    return resource_manifest_bytes(rec.id, policy::serialize(rec.policy), rec.body.chunk_size,
                                   rec.body.plaintext_len, rec.header_digest,
                                   rec.chunk_digests);
}

namespace {

std::string body_file_name(const std::string& id) {
    return hex_encode(crypto::sha256(to_bytes(id))) + ".bin";
}

}  // namespace

ResourceStore::ResourceStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (dir_.empty()) return;
    std::filesystem::create_directories(dir_);
    std::filesystem::path manifest = dir_ / "manifest";
    if (!std::filesystem::exists(manifest)) return;

    std::ifstream in(manifest);
    json j = json::parse(in);
    for (const auto& item : j.at("resources")) {
        ResourceRecord rec;
        rec.id = item.at("id").get<std::string>();
        rec.policy = policy::parse(item.at("policy").get<std::string>());
        rec.owner_sig = hex_decode(item.at("signature").get<std::string>());
        rec.version = item.at("version").get<uint64_t>();

        std::ifstream body(dir_ / body_file_name(rec.id), std::ios::binary);
        Bytes raw((std::istreambuf_iterator<char>(body)), std::istreambuf_iterator<char>());
        rec.body = abe::ChainCiphertext::deserialize(raw);
        rec.refresh_digests();

        // The manifest's digests must agree with the bodies on disk.
        Bytes header_digest = hex_decode(item.at("header_digest").get<std::string>());
        std::vector<Bytes> digests;
        for (const auto& d : item.at("chunk_digests"))
            digests.push_back(hex_decode(d.get<std::string>()));
        if (header_digest != rec.header_digest || digests != rec.chunk_digests)
            throw ProtocolError(ErrorCode::Internal,
                                "store corruption: manifest digests disagree for " + rec.id);
        records_[rec.id] = std::move(rec);
    }
}

bool ResourceStore::contains(const std::string& id) const {
    std::lock_guard lk(mu_);
    return records_.count(id) > 0;
}

std::optional<ResourceRecord> ResourceStore::get(const std::string& id) const {
    std::lock_guard lk(mu_);
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> ResourceStore::ids() const {
    std::lock_guard lk(mu_);
    std::vector<std::string> out;
    for (const auto& [id, rec] : records_) out.push_back(id);
    return out;
}

void ResourceStore::put(ResourceRecord rec) {
    std::lock_guard lk(mu_);
    if (records_.count(rec.id))
        throw ProtocolError(ErrorCode::DuplicateResource, "resource exists: " + rec.id);
    persist(rec);
    records_[rec.id] = std::move(rec);
    save_manifest_locked();
}

void ResourceStore::replace(ResourceRecord rec) {
    std::lock_guard lk(mu_);
    auto it = records_.find(rec.id);
    if (it == records_.end())
        throw ProtocolError(ErrorCode::NoSuchResource, "no such resource: " + rec.id);
    persist(rec);
    it->second = std::move(rec);
    save_manifest_locked();
}

void ResourceStore::persist(const ResourceRecord& rec) {
    if (dir_.empty()) return;
    Bytes raw = rec.body.serialize();
    std::ofstream out(dir_ / body_file_name(rec.id), std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(raw.data()), std::streamsize(raw.size()));
}

void ResourceStore::save_manifest_locked() {
    if (dir_.empty()) return;
    json resources = json::array();
    for (const auto& [id, rec] : records_) {
        json digests = json::array();
        for (const Bytes& d : rec.chunk_digests) digests.push_back(hex_encode(d));
        resources.push_back(json{{"id", rec.id},
                                 {"policy", policy::serialize(rec.policy)},
                                 {"version", rec.version},
                                 {"signature", hex_encode(rec.owner_sig)},
                                 {"header_digest", hex_encode(rec.header_digest)},
                                 {"chunk_digests", digests}});
    }
    std::ofstream out(dir_ / "manifest", std::ios::trunc);
    out << json{{"format", 1}, {"resources", resources}}.dump(2) << "\n";
}

Bytes ResourceStore::raw_dump() const {
    std::lock_guard lk(mu_);
    ByteWriter w;
    for (const auto& [id, rec] : records_) {
        w.raw(rec.body.serialize());
        w.raw(rec.owner_sig);
    }
    return w.take();
}

}  // namespace abestore::nodes
