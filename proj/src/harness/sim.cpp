#include <thread>

#include "abestore/crypto/sha.hpp"
#include "abestore/errors.hpp"
#include "abestore/harness/harness.hpp"

namespace abestore::harness {

// ---------------------------------------------------------------------------
// Transcript

Bytes Transcript::flatten() const {
    ByteWriter w;
    for (const TranscriptEntry& e : entries) {
        w.str(e.link);
        w.u8(uint8_t(e.dir));
        w.blob(e.data);
    }
    return w.take();
}

std::string Transcript::dump() const {
    std::string out;
    for (const TranscriptEntry& e : entries) {
        out += e.link + " " + (e.dir == 0 ? "->" : "<-") + " " +
               std::to_string(e.data.size()) + " " + hex_encode(crypto::sha256(e.data)) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// SimNet

SimNet::SimNet(uint64_t seed)
    : root_(seed), now_(std::make_shared<uint64_t>(1000000)), clk_([p = now_] { return *p; }) {}

void SimNet::init(const std::string& engine_name, uint32_t x, uint32_t u, uint64_t ttl_max,
                  const std::vector<std::string>& generics) {
    if (engine_name == "mock")
        engine_ = &abe::mock_engine();
    else if (engine_name == "pairing")
        engine_ = &abe::pairing_engine();
    else
        throw ProtocolError(ErrorCode::Malformed, "unknown engine " + engine_name);

    abe::AbeSystemConfig cfg;
    for (const std::string& g : generics)
        cfg.universe.push_back({g, abe::AttributeRole::Generic, 0});
    auth_rng_ = std::make_unique<Drbg>(root_.fork("authority"));
    authority_.emplace(nodes::Authority::system_init(*engine_, cfg, {x, u, ttl_max}, reg_,
                                                     ledger_, *auth_rng_));
}

std::string SimNet::add_authz(const std::string& alias, const std::vector<std::string>& attrs) {
    nodes::NodeDescriptor d = authority_->provision_authorization_node(attrs);
    NodeState st;
    st.id = d.id;
    st.rng = std::make_unique<Drbg>(root_.fork("node:" + alias));
    st.authz = std::make_unique<nodes::AuthorizationNode>(
        *engine_, reg_, std::move(d), authority_->params().u, authority_->params().ttl_max,
        clk_);
    authority_->attach_installer(st.id, [p = st.authz.get()](const abe::AbePrivateKey& k) {
        p->install_key(k);
    });
    std::string id = st.id;
    nodes_[alias] = std::move(st);
    return id;
}

std::string SimNet::add_service(const std::string& alias) {
    nodes::NodeDescriptor d = authority_->provision_service_node();
    NodeState st;
    st.id = d.id;
    st.rng = std::make_unique<Drbg>(root_.fork("node:" + alias));
    st.service = std::make_unique<nodes::ServiceNode>(*engine_, reg_, std::move(d), clk_);
    authority_->attach_installer(st.id, [p = st.service.get()](const abe::AbePrivateKey& k) {
        p->install_key(k);
    });
    std::string id = st.id;
    nodes_[alias] = std::move(st);
    return id;
}

void SimNet::enroll(const std::string& name, const std::vector<std::string>& attrs,
                    const std::vector<std::string>& validity) {
    ConsumerState st;
    st.creds = authority_->enroll_consumer(attrs, validity, name);
    st.rng = std::make_unique<Drbg>(root_.fork("consumer:" + name));
    st.client = std::make_unique<client::Consumer>(*engine_, reg_, st.creds, *st.rng);
    consumers_[name] = std::move(st);
}

SimNet::NodeState& SimNet::node(const std::string& alias) {
    auto it = nodes_.find(alias);
    if (it == nodes_.end())
        throw ProtocolError(ErrorCode::Malformed, "unknown node " + alias);
    return it->second;
}

SimNet::ConsumerState& SimNet::consumer(const std::string& name) {
    auto it = consumers_.find(name);
    if (it == consumers_.end())
        throw ProtocolError(ErrorCode::Malformed, "unknown consumer " + name);
    return it->second;
}

template <class Fn>
SimNet::OpResult SimNet::run_session(const std::string& consumer_name, const std::string& alias,
                                     Fn&& fn) {
    ConsumerState& c = consumer(consumer_name);
    NodeState& n = node(alias);
    std::string link = consumer_name + "->" + alias + "#" + std::to_string(session_counter_++);

    net::MemPair pipe = net::mem_pair();
    net::TamperHook tamper;
    if (auto it = tamper_.find(alias); it != tamper_.end()) tamper = it->second;
    else if (auto all = tamper_.find("*"); all != tamper_.end()) tamper = all->second;

    pipe.a->set_send_hook([&, tamper](const Bytes& chunk) -> std::optional<Bytes> {
        std::optional<Bytes> deliver = chunk;
        if (tamper) deliver = tamper(chunk);
        if (deliver) {
            std::lock_guard lk(tmu_);
            transcript_.entries.push_back({link, 0, *deliver});
        }
        return deliver;
    });
    pipe.b->set_send_hook([&](const Bytes& chunk) -> std::optional<Bytes> {
        std::lock_guard lk(tmu_);
        transcript_.entries.push_back({link, 1, chunk});
        return chunk;
    });

    std::thread server([&] {
        try {
            if (n.service)
                n.service->serve(*pipe.b, *n.rng);
            else
                n.authz->serve(*pipe.b, *n.rng);
        } catch (...) {
            // A send on a just-closed transport must not take the thread down.
        }
        // An aborted serve loop must still wake a client blocked in recv.
        pipe.b->close();
    });

    OpResult out;
    try {
        net::SecureSession s = net::SecureSession::establish(
            *pipe.a, net::SecureSession::Role::Initiator, *c.rng);
        out = fn(s, c);
    } catch (const ProtocolError& e) {
        out = {false, e.code(), e.what(), {}};
    } catch (const DecodeError& e) {
        out = {false, ErrorCode::Malformed, e.what(), {}};
    }
    pipe.a->close();
    server.join();
    return out;
}

SimNet::OpResult SimNet::authenticate(const std::string& consumer_name,
                                      const std::string& authz_alias,
                                      const std::vector<std::string>& attrs,
                                      const std::vector<std::string>& validity, uint64_t ttl) {
    return run_session(consumer_name, authz_alias, [&](net::SecureSession& s, ConsumerState& c) {
        client::SessionState st = c.client->authenticate(s, attrs, validity, ttl);
        issued_tokens_.push_back(st.token.serialize());
        c.session = std::move(st);
        return OpResult{true, ErrorCode::None, "", {}};
    });
}

SimNet::OpResult SimNet::put(const std::string& consumer_name, const std::string& service_alias,
                             const std::string& id, const std::string& policy,
                             const Bytes& data) {
    if (data.size() >= 16) secrets_.push_back(data);
    return run_session(consumer_name, service_alias, [&](net::SecureSession& s,
                                                         ConsumerState& c) {
        if (!c.session)
            throw ProtocolError(ErrorCode::AuthFailed, "no session: authenticate first");
        c.client->put(s, *c.session, id, policy, data);
        return OpResult{true, ErrorCode::None, "", {}};
    });
}

SimNet::OpResult SimNet::get(const std::string& consumer_name, const std::string& service_alias,
                             const std::string& id, std::optional<client::ByteRange> range) {
    return run_session(consumer_name, service_alias, [&](net::SecureSession& s,
                                                         ConsumerState& c) {
        if (!c.session)
            throw ProtocolError(ErrorCode::AuthFailed, "no session: authenticate first");
        Bytes data = c.client->get(s, *c.session, id, range);
        return OpResult{true, ErrorCode::None, "", std::move(data)};
    });
}

SimNet::OpResult SimNet::write(const std::string& consumer_name,
                               const std::string& service_alias, const std::string& id,
                               uint64_t offset, const Bytes& data) {
    if (data.size() >= 16) secrets_.push_back(data);
    return run_session(consumer_name, service_alias, [&](net::SecureSession& s,
                                                         ConsumerState& c) {
        if (!c.session)
            throw ProtocolError(ErrorCode::AuthFailed, "no session: authenticate first");
        c.client->write(s, *c.session, id, offset, data);
        return OpResult{true, ErrorCode::None, "", {}};
    });
}

void SimNet::set_tamper(const std::string& alias, net::TamperHook hook) {
    tamper_[alias] = std::move(hook);
}

void SimNet::clear_tamper() { tamper_.clear(); }

Bytes SimNet::snapshot(const std::string& alias) {
    NodeState& n = node(alias);
    ByteWriter w;
    if (n.service) {
        w.blob(n.service->descriptor().serialize());
        w.blob(n.service->store().raw_dump());
    } else {
        w.blob(n.authz->descriptor().serialize());
    }
    return w.take();
}

abe::AbePrivateKey SimNet::steal_node_key(const std::string& alias) {
    NodeState& n = node(alias);
    return n.service ? n.service->descriptor().key : n.authz->descriptor().key;
}

nodes::NodeDescriptor SimNet::steal_node_descriptor(const std::string& alias) {
    NodeState& n = node(alias);
    return n.service ? n.service->descriptor() : n.authz->descriptor();
}

client::SessionState SimNet::steal_session(const std::string& consumer_name) {
    ConsumerState& c = consumer(consumer_name);
    if (!c.session) throw ProtocolError(ErrorCode::Malformed, "consumer has no session");
    return *c.session;
}

client::ConsumerCredentials SimNet::steal_consumer_creds(const std::string& consumer_name) {
    return consumer(consumer_name).creds;
}

SimNet::OpResult SimNet::forge_put(const client::SessionState& stolen,
                                   const std::string& service_alias, const std::string& id,
                                   const std::string& policy, const Bytes& data) {
    // The adversary holds the token and K_1 but not SK_self, so it signs
    // with a keypair of its own.
    client::ConsumerCredentials adv;
    adv.sig = suite::sig_generate(root_);
    std::string name = "adversary#" + std::to_string(session_counter_);
    ConsumerState st;
    st.creds = adv;
    st.rng = std::make_unique<Drbg>(root_.fork(name));
    st.client = std::make_unique<client::Consumer>(*engine_, reg_, adv, *st.rng);
    st.session = stolen;
    consumers_[name] = std::move(st);
    OpResult out = run_session(name, service_alias, [&](net::SecureSession& s,
                                                        ConsumerState& c) {
        c.client->put(s, *c.session, id, policy, data);
        return OpResult{true, ErrorCode::None, "", {}};
    });
    consumers_.erase(name);
    return out;
}

SimNet::OpResult SimNet::forged_token_get(const nodes::NodeDescriptor& stolen_issuer,
                                          const std::string& consumer_name,
                                          const std::string& service_alias,
                                          const std::string& id) {
    ConsumerState& c = consumer(consumer_name);
    auto pk = reg_.params();

    mst::AuthRequest req;
    req.attrs = stolen_issuer.responsibility;
    req.validity = c.creds.validity;
    req.ttl_req = 600;
    req.consumer_pk = c.creds.sig.pub;

    mst::IssuerConfig cfg;
    cfg.engine = engine_;
    cfg.pk = pk.get();
    cfg.authorizable = policy::AttributeSet(stolen_issuer.responsibility.begin(),
                                            stolen_issuer.responsibility.end());
    cfg.sig = stolen_issuer.sig;
    cfg.min_validity = authority_->params().u;
    cfg.ttl_max = authority_->params().ttl_max;

    client::SessionState forged;
    try {
        mst::IssueResult issued = mst::issue(cfg, req, clk_(), root_);
        mst::RecoveredToken rec = mst::recover_token(*engine_, *pk, c.creds.key, issued);
        forged.token = std::move(rec.token);
        forged.k1 = std::move(rec.k1);
        forged.expiry = forged.token.core.expiry;
        forged.authorized = forged.token.core.authorized_attrs;
    } catch (const ProtocolError& e) {
        return {false, e.code(), e.what(), {}};
    }

    std::optional<client::SessionState> saved = c.session;
    c.session = forged;
    OpResult out = get(consumer_name, service_alias, id);
    consumer(consumer_name).session = saved;
    return out;
}

void SimNet::recover_node(const std::string& alias) {
    NodeState& n = node(alias);
    if (n.service) {
        nodes::NodeDescriptor d = authority_->recover_service_node(n.id);
        n.id = d.id;
        n.service = std::make_unique<nodes::ServiceNode>(*engine_, reg_, std::move(d), clk_);
        authority_->attach_installer(n.id, [p = n.service.get()](const abe::AbePrivateKey& k) {
            p->install_key(k);
        });
    } else {
        nodes::NodeDescriptor d = authority_->recover_authorization_node(n.id);
        n.id = d.id;
        n.authz = std::make_unique<nodes::AuthorizationNode>(*engine_, reg_, std::move(d),
                                                             authority_->params().u,
                                                             authority_->params().ttl_max, clk_);
        authority_->attach_installer(n.id, [p = n.authz.get()](const abe::AbePrivateKey& k) {
            p->install_key(k);
        });
    }
}

std::map<std::string, abe::AbePrivateKey> SimNet::revoke_validity(const std::string& attr) {
    std::map<std::string, abe::AbePrivateKey> reissued = authority_->revoke_validity_attribute(attr);
    deliver_keys(reissued);
    return reissued;
}

void SimNet::remove_consumer(const std::string& name) {
    // The consumer-side state stays: the removed party still holds its old
    // (now useless) key, which is exactly what the scenarios probe.
    deliver_keys(authority_->remove_consumer(name));
}

// The "generic secure key distribution mechanism": re-issued keys land in
// the surviving consumers' credential stores; their open sessions are
// unaffected, new ones pick up the fresh key.
void SimNet::deliver_keys(const std::map<std::string, abe::AbePrivateKey>& reissued) {
    for (const auto& [id, key] : reissued) {
        auto it = consumers_.find(id);
        if (it == consumers_.end()) continue;
        it->second.creds.key = key;
        it->second.client = std::make_unique<client::Consumer>(*engine_, reg_,
                                                               it->second.creds,
                                                               *it->second.rng);
    }
}

void SimNet::reissue(const std::string& name) {
    ConsumerState& c = consumer(name);
    c.creds = authority_->reissue_consumer(c.creds);
    c.client = std::make_unique<client::Consumer>(*engine_, reg_, c.creds, *c.rng);
    c.session.reset();
}

bool SimNet::adversary_sees_mst() const {
    Bytes wire = transcript_.flatten();
    std::string hay(wire.begin(), wire.end());
    for (const Bytes& tok : issued_tokens_) {
        // Any 16-byte window of the token counts as leaked.
        for (size_t off = 0; off + 16 <= tok.size(); off += 8) {
            std::string needle(tok.begin() + long(off), tok.begin() + long(off) + 16);
            if (hay.find(needle) != std::string::npos) return true;
        }
    }
    return false;
}

bool SimNet::contains_secret(const Bytes& haystack) const {
    std::string hay(haystack.begin(), haystack.end());
    for (const Bytes& s : secrets_) {
        for (size_t off = 0; off + 16 <= s.size(); off += 8) {
            std::string needle(s.begin() + long(off), s.begin() + long(off) + 16);
            if (hay.find(needle) != std::string::npos) return true;
        }
    }
    return false;
}

}  // namespace abestore::harness
