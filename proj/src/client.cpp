#include "abestore/client.hpp"

#include "abestore/crypto/sha.hpp"
#include "abestore/errors.hpp"
#include "abestore/nodes/store.hpp"

namespace abestore::client {

Bytes ConsumerCredentials::serialize() const {
    ByteWriter w;
    w.u8(1);
    w.blob(key.serialize());
    w.blob(sig.serialize());
    w.u32(uint32_t(validity.size()));
    for (const std::string& v : validity) w.str(v);
    return w.take();
}

ConsumerCredentials ConsumerCredentials::deserialize(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad credentials version");
    ConsumerCredentials c;
    Bytes key = r.blob();
    c.key = abe::AbePrivateKey::deserialize(key);
    Bytes sig = r.blob();
    c.sig = suite::SigKeyPair::deserialize(sig);
    uint32_t n = r.u32();
    for (uint32_t i = 0; i < n; ++i) c.validity.push_back(r.str());
    r.expect_done();
    return c;
}

namespace {

// Awaits the expected response type; a server error frame is re-thrown
// with its original code.
net::Frame expect(net::SecureSession& s, uint8_t want) {
    net::Frame f = s.recv();
    if (f.type == net::kRespErr) {
        ByteReader r(f.payload);
        uint8_t code = r.u8();
        std::string msg = r.str();
        r.expect_done();
        if (code > uint8_t(ErrorCode::Internal)) code = uint8_t(ErrorCode::Internal);
        throw ProtocolError(ErrorCode(code), msg);
    }
    if (f.type != want)
        throw ProtocolError(ErrorCode::Malformed,
                            "unexpected response type " + std::to_string(f.type));
    return f;
}

}  // namespace

Consumer::Consumer(const abe::AbeEngine& engine, const nodes::Registry& index,
                   ConsumerCredentials creds, RandomSource& rng)
    : engine_(&engine), index_(&index), creds_(std::move(creds)), rng_(&rng) {}

SessionState Consumer::authenticate(net::SecureSession& s,
                                    const std::vector<std::string>& attrs,
                                    const std::vector<std::string>& validity,
                                    uint64_t ttl_req) {
    mst::AuthRequest req;
    req.attrs = attrs;
    req.validity = validity;
    req.ttl_req = ttl_req;
    req.consumer_pk = creds_.sig.pub;
    s.send(net::kReqAuth, req.serialize());

    net::Frame f = expect(s, net::kRespAuth);
    ByteReader r(f.payload);
    Bytes k_prime = r.blob();
    Bytes mst_prime = r.blob();
    r.expect_done();

    mst::IssueResult issued;
    issued.k_prime = abe::AbeCiphertext::deserialize(k_prime);
    issued.mst_prime = std::move(mst_prime);

    auto pk = index_->params();
    mst::RecoveredToken rec = mst::recover_token(*engine_, *pk, creds_.key, issued);

    SessionState st;
    st.token = std::move(rec.token);
    st.k1 = std::move(rec.k1);
    st.expiry = st.token.core.expiry;
    st.authorized = st.token.core.authorized_attrs;
    return st;
}

void Consumer::put(net::SecureSession& s, SessionState& st, const std::string& id,
                   const std::string& policy_text, std::span<const uint8_t> data) {
    policy::PolicyPtr p = policy::parse(policy_text);
    if (!policy::satisfies(st.authorized_set(), p))
        throw ProtocolError(ErrorCode::PolicyUnsatisfied,
                            "session attributes do not satisfy the policy");

    auto pk = index_->params();
    abe::ChainCiphertext chain = abe::encrypt_chain(*engine_, *pk, data, p, *rng_);

    Bytes header_digest = crypto::sha256(chain.kem_header.serialize());
    std::vector<Bytes> digests;
    for (const Bytes& c : chain.chunks) digests.push_back(crypto::sha256(c));
    Bytes manifest = nodes::resource_manifest_bytes(id, policy::serialize(p), chain.chunk_size,
                                                    chain.plaintext_len, header_digest, digests);
    Bytes sig = suite::sign(creds_.sig, manifest);

    ByteWriter open;
    open.blob(st.token.serialize());
    open.str(id);
    open.str(policy::serialize(p));
    open.u64(data.size());
    s.send(net::kPutOpen, open.bytes());
    expect(s, net::kRespPutOpen);

    ByteWriter body;
    body.blob(suite::SymKey(st.k1).encrypt(*rng_, chain.serialize()));
    body.blob(sig);
    s.send(net::kPutBody, body.bytes());
    expect(s, net::kRespPutBody);
}

Consumer::FetchResult Consumer::fetch(net::SecureSession& s, SessionState& st,
                                      const std::string& id, std::optional<ByteRange> range) {
    ByteWriter w;
    w.blob(st.token.serialize());
    w.str(id);
    w.u8(range ? 1 : 0);
    w.u64(range ? range->offset : 0);
    w.u64(range ? range->length : 0);
    s.send(net::kGetReq, w.bytes());

    net::Frame f = expect(s, net::kRespGet);
    ByteReader outer(f.payload);
    Bytes inner = suite::SymKey(st.k1).decrypt(outer.blob());
    outer.expect_done();

    ByteReader r(inner);
    FetchResult out;
    out.chunk_size = r.u32();
    out.plaintext_len = r.u64();
    Bytes header = r.blob();
    out.kem_header = abe::AbeCiphertext::deserialize(header);
    uint32_t total = r.u32();
    for (uint32_t i = 0; i < total; ++i) out.all_digests.push_back(r.raw(crypto::kSha256Len));
    out.first_chunk = r.u64();
    uint32_t count = r.u32();
    for (uint32_t i = 0; i < count; ++i) out.chunks.push_back(r.blob());
    r.expect_done();
    return out;
}

Bytes Consumer::get(net::SecureSession& s, SessionState& st, const std::string& id,
                    std::optional<ByteRange> range) {
    FetchResult fr = fetch(s, st, id, range);
    auto pk = index_->params();

    if (!range) {
        abe::ChainCiphertext chain;
        chain.kem_header = std::move(fr.kem_header);
        chain.chunk_size = fr.chunk_size;
        chain.plaintext_len = fr.plaintext_len;
        chain.chunks = std::move(fr.chunks);
        return abe::decrypt_chain(*engine_, *pk, chain, creds_.key);
    }

    if (range->length == 0) return {};
    abe::ChainCiphertext header_only;
    header_only.kem_header = std::move(fr.kem_header);
    Bytes data_key = abe::chain_data_key(*engine_, *pk, header_only, creds_.key);

    Bytes assembled;
    for (size_t i = 0; i < fr.chunks.size(); ++i) {
        Bytes plain = abe::open_chunk(data_key, fr.first_chunk + i, fr.chunks[i]);
        assembled.insert(assembled.end(), plain.begin(), plain.end());
    }
    uint64_t skip = range->offset - fr.first_chunk * fr.chunk_size;
    if (skip + range->length > assembled.size())
        throw ProtocolError(ErrorCode::RangeOutOfBounds, "short range response");
    return Bytes(assembled.begin() + long(skip), assembled.begin() + long(skip + range->length));
}

void Consumer::write(net::SecureSession& s, SessionState& st, const std::string& id,
                     uint64_t offset, std::span<const uint8_t> data) {
    if (data.empty()) return;  // no-op

    FetchResult fr = fetch(s, st, id, ByteRange{offset, data.size()});
    auto pk = index_->params();

    abe::ChainCiphertext header_only;
    header_only.kem_header = fr.kem_header;
    Bytes data_key = abe::chain_data_key(*engine_, *pk, header_only, creds_.key);

    // Reassemble the affected region, splice the new bytes in, re-seal.
    Bytes region;
    for (size_t i = 0; i < fr.chunks.size(); ++i) {
        Bytes plain = abe::open_chunk(data_key, fr.first_chunk + i, fr.chunks[i]);
        region.insert(region.end(), plain.begin(), plain.end());
    }
    uint64_t region_start = fr.first_chunk * fr.chunk_size;
    std::copy(data.begin(), data.end(), region.begin() + long(offset - region_start));

    std::vector<Bytes> replacements;
    std::vector<Bytes> digests = fr.all_digests;
    for (size_t i = 0; i < fr.chunks.size(); ++i) {
        size_t begin = i * fr.chunk_size;
        size_t end = std::min(region.size(), begin + fr.chunk_size);
        Bytes sealed = abe::seal_chunk(
            data_key, fr.first_chunk + i,
            std::span<const uint8_t>(region.data() + begin, end - begin));
        digests[size_t(fr.first_chunk) + i] = crypto::sha256(sealed);
        replacements.push_back(std::move(sealed));
    }

    Bytes header_digest = crypto::sha256(fr.kem_header.serialize());
    Bytes manifest = nodes::resource_manifest_bytes(
        id, policy::serialize(fr.kem_header.policy), fr.chunk_size, fr.plaintext_len,
        header_digest, digests);
    Bytes sig = suite::sign(creds_.sig, manifest);

    ByteWriter open;
    open.blob(st.token.serialize());
    open.str(id);
    open.u8(1);
    open.u64(offset);
    open.u64(data.size());
    s.send(net::kWriteOpen, open.bytes());
    expect(s, net::kRespWriteOpen);

    ByteWriter inner;
    inner.u64(fr.first_chunk);
    inner.u32(uint32_t(replacements.size()));
    for (const Bytes& c : replacements) inner.blob(c);

    ByteWriter body;
    body.blob(suite::SymKey(st.k1).encrypt(*rng_, inner.bytes()));
    body.blob(sig);
    s.send(net::kWriteBody, body.bytes());
    expect(s, net::kRespWriteBody);
}

void Consumer::replace(net::SecureSession& s, SessionState& st, const std::string& id,
                       std::span<const uint8_t> data) {
    // Header-only fetch recovers the stored policy.
    FetchResult fr = fetch(s, st, id, ByteRange{0, 0});
    auto pk = index_->params();
    policy::PolicyPtr p = fr.kem_header.policy;

    abe::ChainCiphertext chain = abe::encrypt_chain(*engine_, *pk, data, p, *rng_);
    Bytes header_digest = crypto::sha256(chain.kem_header.serialize());
    std::vector<Bytes> digests;
    for (const Bytes& c : chain.chunks) digests.push_back(crypto::sha256(c));
    Bytes manifest = nodes::resource_manifest_bytes(id, policy::serialize(p), chain.chunk_size,
                                                    chain.plaintext_len, header_digest, digests);
    Bytes sig = suite::sign(creds_.sig, manifest);

    ByteWriter open;
    open.blob(st.token.serialize());
    open.str(id);
    open.u8(0);
    open.u64(0);
    open.u64(0);
    s.send(net::kWriteOpen, open.bytes());
    expect(s, net::kRespWriteOpen);

    ByteWriter body;
    body.blob(suite::SymKey(st.k1).encrypt(*rng_, chain.serialize()));
    body.blob(sig);
    s.send(net::kWriteBody, body.bytes());
    expect(s, net::kRespWriteBody);
}

}  // namespace abestore::client
