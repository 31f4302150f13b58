#include "abestore/nodes/authz.hpp"

#include "abestore/errors.hpp"

namespace abestore::nodes {

AuthorizationNode::AuthorizationNode(const abe::AbeEngine& engine, const Registry& registry,
                                     NodeDescriptor desc, uint32_t min_validity,
                                     uint64_t ttl_max, Clock clock)
    : engine_(&engine),
      registry_(&registry),
      desc_(std::move(desc)),
      min_validity_(min_validity),
      ttl_max_(ttl_max),
      clock_(std::move(clock)) {}

void AuthorizationNode::install_key(const abe::AbePrivateKey& key) { desc_.key = key; }

void AuthorizationNode::serve(net::Transport& t, RandomSource& rng) {
    std::optional<net::SecureSession> session;
    try {
        session.emplace(
            net::SecureSession::establish(t, net::SecureSession::Role::Responder, rng));
    } catch (const ProtocolError&) {
        return;
    }

    for (;;) {
        net::Frame f;
        try {
            f = session->recv();
        } catch (const ProtocolError&) {
            return;
        }
        try {
            if (f.type != net::kReqAuth)
                throw ProtocolError(ErrorCode::Malformed,
                                    "unexpected frame type " + std::to_string(f.type));
            mst::AuthRequest req;
            try {
                req = mst::AuthRequest::deserialize(f.payload);
            } catch (const DecodeError& e) {
                throw ProtocolError(ErrorCode::Malformed,
                                    std::string("bad auth request: ") + e.what());
            }

            auto pk = registry_->params();
            mst::IssuerConfig cfg;
            cfg.engine = engine_;
            cfg.pk = pk.get();
            cfg.authorizable = policy::AttributeSet(desc_.responsibility.begin(),
                                                    desc_.responsibility.end());
            cfg.sig = desc_.sig;
            cfg.min_validity = min_validity_;
            cfg.ttl_max = ttl_max_;

            mst::IssueResult issued = mst::issue(cfg, req, clock_(), rng);
            ByteWriter w;
            w.blob(issued.k_prime.serialize());
            w.blob(issued.mst_prime);
            session->send(net::kRespAuth, w.bytes());
        } catch (const ProtocolError& e) {
            ByteWriter w;
            w.u8(uint8_t(e.code()));
            w.str(e.what());
            session->send(net::kRespErr, w.bytes());
            // A frame this node cannot even parse ends the conversation.
            if (e.code() == ErrorCode::Malformed) return;
        }
    }
}

}  // namespace abestore::nodes
