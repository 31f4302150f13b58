#include "abestore/nodes/authority.hpp"

#include <algorithm>

#include "abestore/errors.hpp"

namespace abestore::nodes {

namespace {

std::string validity_name(uint32_t k) { return "v" + std::to_string(k); }

}  // namespace

Authority::Authority(const abe::AbeEngine& engine, const ProtocolParams& params,
                     Registry& registry, ScalingLedger& ledger, RandomSource& rng)
    : engine_(&engine), params_(params), registry_(&registry), ledger_(&ledger), rng_(&rng) {}

Authority Authority::system_init(const abe::AbeEngine& engine, const abe::AbeSystemConfig& cfg,
                                 const ProtocolParams& params, Registry& registry,
                                 ScalingLedger& ledger, RandomSource& rng) {
    if (params.u < 1 || params.u > params.x)
        throw ProtocolError(ErrorCode::Malformed, "protocol params require 1 <= u <= x");
    if (params.ttl_max == 0)
        throw ProtocolError(ErrorCode::Malformed, "TTL_max must be positive");

    abe::AbeSystemConfig full = cfg;
    full.universe.clear();
    full.universe.push_back({"SN", abe::AttributeRole::ServiceNode, 0});
    for (uint32_t k = 1; k <= params.x; ++k)
        full.universe.push_back({validity_name(k), abe::AttributeRole::Validity, 0});
    for (const abe::AttributeId& id : cfg.universe) {
        if (id.role != abe::AttributeRole::Generic)
            throw ProtocolError(ErrorCode::Malformed,
                                "system config may only list generic attributes");
        full.universe.push_back(id);
    }

    Authority a(engine, params, registry, ledger, rng);
    auto [pk, mk] = engine.setup(full, rng);
    a.pk_ = std::move(pk);
    a.mk_ = std::move(mk);
    registry.publish_params(a.pk_);

    ledger.census.authorities = 1;
    ledger.census.attrs = a.pk_.universe.size();
    ledger.census.validity = params.x;
    ledger.keying(a.pk_.universe.size());
    ledger.message(1);
    return a;
}

Bytes Authority::serialize_state() const {
    ByteWriter w;
    w.u8(1);
    w.blob(pk_.serialize());
    w.str(mk_.scheme);
    w.blob(mk_.opaque);
    w.u32(params_.x);
    w.u32(params_.u);
    w.u64(params_.ttl_max);
    w.u64(next_id_);
    w.u32(uint32_t(consumers_.size()));
    for (const EnrolledConsumer& c : consumers_) {
        w.str(c.id);
        w.u32(uint32_t(c.attrs.size()));
        for (const std::string& a : c.attrs) w.str(a);
        w.u32(uint32_t(c.validity.size()));
        for (const std::string& v : c.validity) w.str(v);
    }
    return w.take();
}

Authority Authority::load_state(const abe::AbeEngine& engine, std::span<const uint8_t> data,
                                Registry& registry, ScalingLedger& ledger, RandomSource& rng) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad authority state version");
    abe::AbePublicParams pk = abe::AbePublicParams::deserialize(r.blob());
    abe::AbeMasterKey mk;
    mk.scheme = r.str();
    mk.opaque = r.blob();
    ProtocolParams params;
    params.x = r.u32();
    params.u = r.u32();
    params.ttl_max = r.u64();
    uint64_t next_id = r.u64();
    uint32_t n = r.u32();
    std::vector<EnrolledConsumer> consumers;
    for (uint32_t i = 0; i < n; ++i) {
        EnrolledConsumer c;
        c.id = r.str();
        uint32_t na = r.u32();
        for (uint32_t j = 0; j < na; ++j) c.attrs.push_back(r.str());
        uint32_t nv = r.u32();
        for (uint32_t j = 0; j < nv; ++j) c.validity.push_back(r.str());
        consumers.push_back(std::move(c));
    }
    r.expect_done();
    if (pk.scheme != engine.scheme() || mk.scheme != engine.scheme())
        throw ProtocolError(ErrorCode::Malformed, "authority state engine mismatch");

    Authority a(engine, params, registry, ledger, rng);
    a.pk_ = std::move(pk);
    a.mk_ = std::move(mk);
    a.next_id_ = next_id;
    a.consumers_ = std::move(consumers);
    return a;
}

std::vector<std::string> Authority::validity_attrs() const {
    std::vector<std::string> out;
    for (uint32_t k = 1; k <= params_.x; ++k) out.push_back(validity_name(k));
    return out;
}

void Authority::attach_installer(const std::string& node_id, KeyInstaller installer) {
    installers_[node_id] = std::move(installer);
}

std::vector<abe::AttributeId> Authority::current_ids(const std::vector<std::string>& names) {
    std::vector<abe::AttributeId> ids;
    for (const std::string& name : names) {
        const abe::AttributeRepresentation* rep = pk_.find(name);
        if (!rep) throw ProtocolError(ErrorCode::Malformed, "unknown attribute " + name);
        ids.push_back(rep->id);
    }
    return ids;
}

abe::AbePrivateKey Authority::service_key() {
    std::vector<std::string> names = validity_attrs();
    names.insert(names.begin(), "SN");
    return engine_->generate_key(pk_, mk_, current_ids(names), *rng_);
}

NodeDescriptor Authority::provision_service_node(const std::string& address) {
    return provision_service_node_locked("sn-" + std::to_string(next_id_++), address);
}

NodeDescriptor Authority::provision_service_node_locked(const std::string& id,
                                                        const std::string& address) {
    NodeDescriptor d;
    d.id = id;
    d.role = NodeRole::Service;
    d.role_attr = "SN";
    d.key = service_key();
    d.sig = suite::sig_generate(*rng_);
    registry_->upsert_node({d.id, d.role, address, d.sig.pub.serialize(), {}});

    // One keying batch per authority, plus the index push.
    ledger_->keying(d.key.attrs.size());
    ledger_->message(ledger_->census.authorities + 1);
    ledger_->census.service_nodes += 1;
    return d;
}

NodeDescriptor Authority::provision_authorization_node(const std::vector<std::string>& a_j,
                                                       const std::string& address) {
    if (a_j.empty())
        throw ProtocolError(ErrorCode::Malformed, "authorization node needs an attribute subset");
    current_ids(a_j);  // validates every name

    NodeDescriptor d;
    d.id = "an-" + std::to_string(next_id_++);
    d.role = NodeRole::Authorization;
    d.responsibility = a_j;
    d.role_attr = "AN:" + d.id;
    engine_->add_attribute(pk_, mk_, {d.role_attr, abe::AttributeRole::Authorization, 0});
    registry_->publish_params(pk_);
    d.key = engine_->generate_key(pk_, mk_, current_ids({d.role_attr}), *rng_);
    d.sig = suite::sig_generate(*rng_);
    registry_->upsert_node({d.id, d.role, address, d.sig.pub.serialize(), a_j});

    ledger_->keying(1);
    ledger_->message(ledger_->census.authorities + 1);
    ledger_->census.authz_nodes += 1;
    ledger_->census.attrs += 1;
    return d;
}

client::ConsumerCredentials Authority::enroll_consumer(const std::vector<std::string>& attrs,
                                                       const std::vector<std::string>& validity,
                                                       const std::string& id) {
    if (validity.size() < params_.u)
        throw ProtocolError(ErrorCode::AuthFailed,
                            "consumer must hold at least u validity attributes");
    for (const std::string& v : validity) {
        const abe::AttributeRepresentation* rep = pk_.find(v);
        if (!rep || rep->id.role != abe::AttributeRole::Validity)
            throw ProtocolError(ErrorCode::Malformed, "not a validity attribute: " + v);
    }

    std::vector<std::string> names = attrs;
    names.insert(names.end(), validity.begin(), validity.end());

    client::ConsumerCredentials creds;
    creds.key = engine_->generate_key(pk_, mk_, current_ids(names), *rng_);
    creds.sig = suite::sig_generate(*rng_);
    creds.validity = validity;

    consumers_.push_back(
        {id.empty() ? "c-" + std::to_string(next_id_++) : id, attrs, validity});

    ledger_->keying(creds.key.attrs.size());
    ledger_->message(ledger_->census.authorities);
    ledger_->census.consumers += 1;
    return creds;
}

client::ConsumerCredentials Authority::reissue_consumer(const client::ConsumerCredentials& old) {
    std::vector<std::string> names;
    for (const abe::AttributeId& id : old.key.attrs) names.push_back(id.name);

    client::ConsumerCredentials creds;
    creds.key = engine_->generate_key(pk_, mk_, current_ids(names), *rng_);
    creds.sig = old.sig;
    creds.validity = old.validity;

    ledger_->keying(creds.key.attrs.size());
    ledger_->message(1);
    return creds;
}

std::map<std::string, abe::AbePrivateKey> Authority::revoke_validity_attribute(
    const std::string& name, const std::set<std::string>& exclude) {
    const abe::AttributeRepresentation* rep = pk_.find(name);
    if (!rep || rep->id.role != abe::AttributeRole::Validity)
        throw ProtocolError(ErrorCode::Malformed, "not a validity attribute: " + name);

    engine_->reissue_attribute(pk_, mk_, name);
    registry_->publish_params(pk_);

    // The epoch change must reach every authorization node.
    ledger_->message(registry_->nodes_with_role(NodeRole::Authorization).size());

    // Service node keys carry the validity attributes, so they rotate too.
    // (The scaling analysis treats this as a constant term: the revocation
    // sweep varies holders and authorization nodes, not service nodes.)
    ledger_->message(registry_->nodes_with_role(NodeRole::Service).size());
    rekey_service_nodes();

    // Re-issue keys to every remaining holder of the attribute.
    std::map<std::string, abe::AbePrivateKey> reissued;
    for (const EnrolledConsumer& c : consumers_) {
        if (exclude.count(c.id)) continue;
        if (std::find(c.validity.begin(), c.validity.end(), name) == c.validity.end()) continue;
        std::vector<std::string> names = c.attrs;
        names.insert(names.end(), c.validity.begin(), c.validity.end());
        abe::AbePrivateKey key = engine_->generate_key(pk_, mk_, current_ids(names), *rng_);
        ledger_->keying(key.attrs.size());
        ledger_->message(ledger_->census.authorities);
        reissued.emplace(c.id, std::move(key));
    }
    return reissued;
}

std::map<std::string, abe::AbePrivateKey> Authority::remove_consumer(const std::string& id) {
    auto it = std::find_if(consumers_.begin(), consumers_.end(),
                           [&](const EnrolledConsumer& c) { return c.id == id; });
    if (it == consumers_.end())
        throw ProtocolError(ErrorCode::Malformed, "unknown consumer " + id);
    std::string attr = it->validity.front();
    consumers_.erase(it);
    ledger_->census.consumers -= 1;
    return revoke_validity_attribute(attr, {id});
}

void Authority::rekey_service_nodes() {
    for (const NodeEntry& e : registry_->nodes_with_role(NodeRole::Service)) {
        abe::AbePrivateKey key = service_key();
        ledger_->keying(key.attrs.size());
        ledger_->message(1);
        auto it = installers_.find(e.id);
        if (it != installers_.end()) it->second(key);
    }
}

NodeDescriptor Authority::recover_service_node(const std::string& id) {
    std::optional<NodeEntry> entry = registry_->find_node(id);
    if (!entry || entry->role != NodeRole::Service)
        throw ProtocolError(ErrorCode::Malformed, "unknown service node " + id);

    registry_->blacklist_node(id);
    installers_.erase(id);
    ledger_->message(1);
    ledger_->census.service_nodes -= 1;

    // Rotate the role attribute so the stolen key stops matching fresh
    // ciphertexts, then re-key the surviving nodes.
    engine_->reissue_attribute(pk_, mk_, "SN");
    registry_->publish_params(pk_);
    rekey_service_nodes();

    return provision_service_node_locked("sn-" + std::to_string(next_id_++), entry->address);
}

NodeDescriptor Authority::recover_authorization_node(const std::string& id) {
    std::optional<NodeEntry> entry = registry_->find_node(id);
    if (!entry || entry->role != NodeRole::Authorization)
        throw ProtocolError(ErrorCode::Malformed, "unknown authorization node " + id);

    registry_->blacklist_node(id);
    installers_.erase(id);
    ledger_->message(1);
    ledger_->census.authz_nodes -= 1;

    engine_->reissue_attribute(pk_, mk_, "AN:" + id);
    registry_->publish_params(pk_);

    return provision_authorization_node(entry->authorized, entry->address);
}

}  // namespace abestore::nodes
