#include "abestore/nodes/service.hpp"

#include "abestore/errors.hpp"

namespace abestore::nodes {

using net::Frame;

namespace {

struct ChunkSpan {
    uint64_t first = 0;
    uint32_t count = 0;
};

// Chunks covering the byte range [offset, offset+length).
ChunkSpan covering_chunks(uint64_t offset, uint64_t length, uint32_t chunk_size,
                          uint64_t plaintext_len) {
    if (offset > plaintext_len || length > plaintext_len - offset)
        throw ProtocolError(ErrorCode::RangeOutOfBounds, "range past end of resource");
    if (length == 0) return {};
    uint64_t first = offset / chunk_size;
    uint64_t last = (offset + length - 1) / chunk_size;
    return {first, uint32_t(last - first + 1)};
}

}  // namespace

ServiceNode::ServiceNode(const abe::AbeEngine& engine, const Registry& registry,
                         NodeDescriptor desc, Clock clock, std::filesystem::path store_dir)
    : engine_(&engine),
      registry_(&registry),
      desc_(std::move(desc)),
      clock_(std::move(clock)),
      store_(std::move(store_dir)) {}

void ServiceNode::install_key(const abe::AbePrivateKey& key) {
    std::lock_guard lk(key_mu_);
    desc_.key = key;
}

mst::SessionGrant ServiceNode::check_token(std::span<const uint8_t> raw) {
    mst::MasterSessionToken token;
    try {
        token = mst::MasterSessionToken::deserialize(raw);
    } catch (const DecodeError& e) {
        throw ProtocolError(ErrorCode::Malformed, std::string("bad token: ") + e.what());
    }
    auto pk = registry_->params();
    abe::AbePrivateKey key;
    {
        std::lock_guard lk(key_mu_);
        key = desc_.key;
    }
    return mst::verify(token, *engine_, *pk, key, registry_->issuer_whitelist(), clock_());
}

void ServiceNode::serve(net::Transport& t, RandomSource& rng) {
    std::optional<net::SecureSession> session;
    try {
        session.emplace(
            net::SecureSession::establish(t, net::SecureSession::Role::Responder, rng));
    } catch (const ProtocolError&) {
        return;  // failed handshake: nothing to salvage
    }

    std::optional<PendingPut> put;
    std::optional<PendingWrite> write;
    for (;;) {
        Frame f;
        try {
            f = session->recv();
        } catch (const ProtocolError&) {
            return;  // peer closed or channel aborted
        }
        try {
            uint8_t resp_type = net::kRespErr;
            Bytes resp = handle(f.type, f.payload, resp_type, put, write, rng);
            session->send(resp_type, resp);
        } catch (const ProtocolError& e) {
            put.reset();
            write.reset();
            ByteWriter w;
            w.u8(uint8_t(e.code()));
            w.str(e.what());
            session->send(net::kRespErr, w.bytes());
        }
    }
}

Bytes ServiceNode::handle(uint8_t type, const Bytes& payload, uint8_t& resp_type,
                          std::optional<PendingPut>& put, std::optional<PendingWrite>& write,
                          RandomSource& rng) {
    ByteReader r(payload);
    try {
        switch (type) {
            case net::kPutOpen: {
                mst::SessionGrant grant = check_token(r.blob());
                std::string id = r.str();
                std::string policy_text = r.str();
                r.u64();  // declared size; informational
                r.expect_done();

                if (id.empty() || id.size() > kMaxResourceIdLen)
                    throw ProtocolError(ErrorCode::Malformed, "bad resource id");
                policy::PolicyPtr p;
                try {
                    p = policy::parse(policy_text);
                } catch (const policy::PolicyParseError& e) {
                    throw ProtocolError(ErrorCode::Malformed,
                                        std::string("bad policy: ") + e.what());
                }
                policy::AttributeSet held(grant.authorized_attrs.begin(),
                                          grant.authorized_attrs.end());
                if (!policy::satisfies(held, p))
                    throw ProtocolError(ErrorCode::PolicyUnsatisfied,
                                        "authorized attributes do not satisfy the policy");
                if (store_.contains(id))
                    throw ProtocolError(ErrorCode::DuplicateResource, "resource exists: " + id);

                put = PendingPut{std::move(grant), std::move(id), std::move(p)};
                write.reset();
                resp_type = net::kRespPutOpen;
                return {};
            }

            case net::kPutBody: {
                if (!put) throw ProtocolError(ErrorCode::Malformed, "no open put");
                PendingPut pending = std::move(*put);
                put.reset();
                Bytes sealed = r.blob();
                Bytes sig = r.blob();
                r.expect_done();

                ResourceRecord rec;
                rec.id = pending.id;
                rec.policy = pending.policy;
                try {
                    rec.body = abe::ChainCiphertext::deserialize(
                        suite::SymKey(pending.grant.k1).decrypt(sealed));
                } catch (const DecodeError& e) {
                    throw ProtocolError(ErrorCode::Malformed,
                                        std::string("bad resource body: ") + e.what());
                }
                if (!policy::structurally_equal(*rec.body.kem_header.policy, *pending.policy))
                    throw ProtocolError(ErrorCode::Malformed,
                                        "ciphertext policy differs from the announced one");
                rec.refresh_digests();
                if (!suite::verify(pending.grant.consumer_pk, resource_manifest_bytes(rec), sig))
                    throw ProtocolError(ErrorCode::BadOwnerSignature,
                                        "owner signature does not verify");
                rec.owner_sig = std::move(sig);
                rec.version = 1;
                store_.put(std::move(rec));
                resp_type = net::kRespPutBody;
                return {};
            }

            case net::kGetReq: {
                mst::SessionGrant grant = check_token(r.blob());
                std::string id = r.str();
                bool has_range = r.u8() != 0;
                uint64_t offset = r.u64();
                uint64_t length = r.u64();
                r.expect_done();

                std::optional<ResourceRecord> rec = store_.get(id);
                if (!rec)
                    throw ProtocolError(ErrorCode::NoSuchResource, "no such resource: " + id);
                policy::AttributeSet held(grant.authorized_attrs.begin(),
                                          grant.authorized_attrs.end());
                if (!policy::satisfies(held, rec->policy))
                    throw ProtocolError(ErrorCode::PolicyUnsatisfied,
                                        "authorized attributes do not satisfy the policy");

                ChunkSpan span{0, uint32_t(rec->body.chunks.size())};
                if (has_range)
                    span = covering_chunks(offset, length, rec->body.chunk_size,
                                           rec->body.plaintext_len);

                ByteWriter inner;
                inner.u32(rec->body.chunk_size);
                inner.u64(rec->body.plaintext_len);
                inner.blob(rec->body.kem_header.serialize());
                inner.u32(uint32_t(rec->chunk_digests.size()));
                for (const Bytes& d : rec->chunk_digests) inner.raw(d);
                inner.u64(span.first);
                inner.u32(span.count);
                for (uint32_t i = 0; i < span.count; ++i)
                    inner.blob(rec->body.chunks[size_t(span.first) + i]);

                ByteWriter w;
                w.blob(suite::SymKey(grant.k1).encrypt(rng, inner.bytes()));
                resp_type = net::kRespGet;
                return w.take();
            }

            case net::kWriteOpen: {
                mst::SessionGrant grant = check_token(r.blob());
                std::string id = r.str();
                uint8_t mode = r.u8();
                uint64_t offset = r.u64();
                uint64_t length = r.u64();
                r.expect_done();
                if (mode > 1) throw ProtocolError(ErrorCode::Malformed, "bad write mode");

                std::optional<ResourceRecord> rec = store_.get(id);
                if (!rec)
                    throw ProtocolError(ErrorCode::NoSuchResource, "no such resource: " + id);
                policy::AttributeSet held(grant.authorized_attrs.begin(),
                                          grant.authorized_attrs.end());
                if (!policy::satisfies(held, rec->policy))
                    throw ProtocolError(ErrorCode::PolicyUnsatisfied,
                                        "authorized attributes do not satisfy the policy");
                if (mode == 1) {
                    if (length == 0)
                        throw ProtocolError(ErrorCode::Malformed, "empty write range");
                    covering_chunks(offset, length, rec->body.chunk_size,
                                    rec->body.plaintext_len);
                }

                write = PendingWrite{std::move(grant), std::move(id), mode, offset, length};
                put.reset();
                resp_type = net::kRespWriteOpen;
                return {};
            }

            case net::kWriteBody: {
                if (!write) throw ProtocolError(ErrorCode::Malformed, "no open write");
                PendingWrite pending = std::move(*write);
                write.reset();
                Bytes sealed = r.blob();
                Bytes sig = r.blob();
                r.expect_done();

                std::optional<ResourceRecord> rec = store_.get(pending.id);
                if (!rec)
                    throw ProtocolError(ErrorCode::NoSuchResource,
                                        "no such resource: " + pending.id);
                Bytes inner = suite::SymKey(pending.grant.k1).decrypt(sealed);

                ResourceRecord next = *rec;
                if (pending.mode == 0) {
                    try {
                        next.body = abe::ChainCiphertext::deserialize(inner);
                    } catch (const DecodeError& e) {
                        throw ProtocolError(ErrorCode::Malformed,
                                            std::string("bad resource body: ") + e.what());
                    }
                    if (!policy::structurally_equal(*next.body.kem_header.policy, *rec->policy))
                        throw ProtocolError(ErrorCode::Malformed,
                                            "write may not change the resource policy");
                } else {
                    ChunkSpan expect = covering_chunks(pending.offset, pending.length,
                                                       rec->body.chunk_size,
                                                       rec->body.plaintext_len);
                    try {
                        ByteReader br(inner);
                        uint64_t first = br.u64();
                        uint32_t count = br.u32();
                        if (first != expect.first || count != expect.count)
                            throw ProtocolError(ErrorCode::Malformed,
                                                "replacement chunks do not match the range");
                        for (uint32_t i = 0; i < count; ++i)
                            next.body.chunks[size_t(first) + i] = br.blob();
                        br.expect_done();
                    } catch (const DecodeError& e) {
                        throw ProtocolError(ErrorCode::Malformed,
                                            std::string("bad write body: ") + e.what());
                    }
                }
                next.refresh_digests();
                if (!suite::verify(pending.grant.consumer_pk, resource_manifest_bytes(next),
                                   sig))
                    throw ProtocolError(ErrorCode::BadOwnerSignature,
                                        "owner signature does not verify");
                next.owner_sig = std::move(sig);
                next.version = rec->version + 1;
                store_.replace(std::move(next));
                resp_type = net::kRespWriteBody;
                return {};
            }

            default:
                throw ProtocolError(ErrorCode::Malformed,
                                    "unexpected frame type " + std::to_string(type));
        }
    } catch (const DecodeError& e) {
        throw ProtocolError(ErrorCode::Malformed, std::string("bad request: ") + e.what());
    }
}

}  // namespace abestore::nodes
