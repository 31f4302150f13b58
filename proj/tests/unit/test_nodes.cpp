#include <cstdio>
#include <filesystem>
#include <thread>

#include "abestore/client.hpp"
#include "abestore/errors.hpp"
#include "abestore/nodes/authority.hpp"
#include "abestore/nodes/authz.hpp"
#include "abestore/nodes/service.hpp"
#include "doctest.h"

using namespace abestore;
using abestore::abe::mock_engine;
using abestore::client::ByteRange;
using abestore::client::Consumer;
using abestore::client::ConsumerCredentials;
using abestore::client::SessionState;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ProtocolError& e) {
        return e.code();
    }
    return ErrorCode::None;
}

// A small live system: one authority, one authorization node (responsible
// for all generic attributes), one service node, one enrolled consumer.
struct World {
    nodes::Registry reg;
    nodes::ScalingLedger ledger;
    Drbg rng{42};
    std::shared_ptr<uint64_t> now = std::make_shared<uint64_t>(100000);
    Clock clk = [p = now] { return *p; };

    std::optional<nodes::Authority> authority;
    std::optional<nodes::AuthorizationNode> an;
    std::optional<nodes::ServiceNode> sn;
    std::string an_id, sn_id;
    ConsumerCredentials creds;

    explicit World(const abe::AbeEngine& engine = mock_engine(),
                   std::vector<std::string> a_j = {"a1", "a2", "a3"}) {
        abe::AbeSystemConfig cfg;
        cfg.universe = {{"a1", abe::AttributeRole::Generic, 0},
                        {"a2", abe::AttributeRole::Generic, 0},
                        {"a3", abe::AttributeRole::Generic, 0}};
        nodes::ProtocolParams params{4, 2, 900};
        authority.emplace(
            nodes::Authority::system_init(engine, cfg, params, reg, ledger, rng));

        nodes::NodeDescriptor and_desc = authority->provision_authorization_node(a_j);
        nodes::NodeDescriptor sn_desc = authority->provision_service_node();
        an_id = and_desc.id;
        sn_id = sn_desc.id;
        an.emplace(engine, reg, std::move(and_desc), params.u, params.ttl_max, clk);
        sn.emplace(engine, reg, std::move(sn_desc), clk);
        authority->attach_installer(sn_id,
                                    [this](const abe::AbePrivateKey& k) { sn->install_key(k); });
        authority->attach_installer(an_id,
                                    [this](const abe::AbePrivateKey& k) { an->install_key(k); });

        creds = authority->enroll_consumer({"a1", "a2"}, {"v1", "v2"});
    }

    // Runs fn against a fresh session to the given node.
    template <class Node, class Fn>
    void with_session(Node& node, Fn&& fn) {
        net::MemPair pipe = net::mem_pair();
        Drbg server_rng(rng.u64());
        std::thread t([&] { node.serve(*pipe.b, server_rng); });
        std::exception_ptr err;
        try {
            Drbg client_rng(rng.u64());
            net::SecureSession s = net::SecureSession::establish(
                *pipe.a, net::SecureSession::Role::Initiator, client_rng);
            fn(s);
        } catch (...) {
            err = std::current_exception();
        }
        pipe.a->close();
        t.join();
        if (err) std::rethrow_exception(err);
    }

    SessionState authenticate(Consumer& c, const std::vector<std::string>& attrs,
                              const std::vector<std::string>& validity, uint64_t ttl = 600) {
        std::optional<SessionState> st;
        with_session(*an, [&](net::SecureSession& s) {
            st = c.authenticate(s, attrs, validity, ttl);
        });
        return std::move(*st);
    }

    Consumer consumer() { return Consumer(mock_engine(), reg, creds, rng); }
};

Bytes pattern_data(size_t n, uint8_t seed = 0) {
    Bytes out(n);
    for (size_t i = 0; i < n; ++i) out[i] = uint8_t(seed + i * 131 + (i >> 9));
    return out;
}

}  // namespace

TEST_CASE("system init builds the expected universe") {
    World w;
    auto pk = w.reg.params();
    CHECK(pk->find("SN"));
    for (const char* v : {"v1", "v2", "v3", "v4"}) {
        REQUIRE(pk->find(v));
        CHECK(pk->find(v)->id.role == abe::AttributeRole::Validity);
    }
    CHECK(pk->find("a1"));
    CHECK(pk->find("a3"));
    CHECK(pk->find("AN:" + w.an_id));
    CHECK(w.ledger.census.validity == 4);
    CHECK(w.ledger.census.service_nodes == 1);
    CHECK(w.ledger.census.authz_nodes == 1);
    CHECK(w.ledger.census.consumers == 1);

    // Bad protocol params are rejected up front.
    abe::AbeSystemConfig cfg;
    nodes::Registry reg2;
    nodes::ScalingLedger led2;
    Drbg r2(1);
    CHECK(code_of([&] {
              nodes::Authority::system_init(mock_engine(), cfg, {4, 0, 900}, reg2, led2, r2);
          }) == ErrorCode::Malformed);
    CHECK(code_of([&] {
              nodes::Authority::system_init(mock_engine(), cfg, {2, 3, 900}, reg2, led2, r2);
          }) == ErrorCode::Malformed);

    // Empty generic attribute list is fine: SN and validity attrs remain.
    nodes::Authority a2 =
        nodes::Authority::system_init(mock_engine(), cfg, {2, 1, 900}, reg2, led2, r2);
    CHECK(reg2.params()->universe.size() == 3);
}

TEST_CASE("put then get round-trips through the full stack") {
    World w;
    Consumer c = w.consumer();
    SessionState st = w.authenticate(c, {"a1", "a2"}, {"v1", "v2"});
    CHECK(st.authorized == std::vector<std::string>{"a1", "a2"});

    Bytes data = pattern_data(100 * 1024);
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        c.put(s, st, "doc", "a1 and a2", data);
        CHECK(c.get(s, st, "doc") == data);

        // Same id again is a duplicate.
        CHECK(code_of([&] { c.put(s, st, "doc", "a1 and a2", data); }) ==
              ErrorCode::DuplicateResource);
        // Unknown id.
        CHECK(code_of([&] { c.get(s, st, "nope"); }) == ErrorCode::NoSuchResource);
    });

    auto rec = w.sn->store().get("doc");
    REQUIRE(rec);
    CHECK(rec->version == 1);
    CHECK(rec->body.plaintext_len == data.size());
}

TEST_CASE("get is refused when the session attributes fail the policy") {
    World w;
    Consumer c = w.consumer();
    SessionState st = w.authenticate(c, {"a1", "a2"}, {"v1", "v2"});
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        c.put(s, st, "secret", "a1 and a2", pattern_data(512));
    });

    // A session authorized only for a1 cannot open it -- and the client
    // refuses a put against a policy it cannot satisfy before sending.
    SessionState weak = w.authenticate(c, {"a1"}, {"v1", "v2"});
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        CHECK(code_of([&] { c.get(s, weak, "secret"); }) == ErrorCode::PolicyUnsatisfied);
        CHECK(code_of([&] { c.put(s, weak, "other", "a1 and a2", pattern_data(8)); }) ==
              ErrorCode::PolicyUnsatisfied);
    });
}

TEST_CASE("put signed by a key other than PK_self is rejected and not persisted") {
    World w;
    Consumer honest = w.consumer();
    SessionState st = w.authenticate(honest, {"a1", "a2"}, {"v1", "v2"});

    // Same ABE key, different signature keypair: the manifest signature no
    // longer chains to the PK_self bound into the token.
    ConsumerCredentials other = w.creds;
    other.sig = suite::sig_generate(w.rng);
    Consumer imposter(mock_engine(), w.reg, other, w.rng);

    w.with_session(*w.sn, [&](net::SecureSession& s) {
        CHECK(code_of([&] { imposter.put(s, st, "forged", "a1", pattern_data(64)); }) ==
              ErrorCode::BadOwnerSignature);
    });
    CHECK(!w.sn->store().contains("forged"));
}

TEST_CASE("range get returns exactly the requested slice") {
    World w;
    Consumer c = w.consumer();
    SessionState st = w.authenticate(c, {"a1"}, {"v1", "v2"});
    Bytes data = pattern_data(200 * 1024, 7);
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        c.put(s, st, "blob", "a1", data);
        for (auto [off, len] : std::vector<std::pair<uint64_t, uint64_t>>{
                 {0, 1}, {65535, 2}, {70000, 64 * 1024}, {200 * 1024 - 3, 3}, {12345, 0}}) {
            Bytes got = c.get(s, st, "blob", ByteRange{off, len});
            CHECK(got == Bytes(data.begin() + long(off), data.begin() + long(off + len)));
        }
        CHECK(code_of([&] { c.get(s, st, "blob", ByteRange{200 * 1024 - 1, 2}); }) ==
              ErrorCode::RangeOutOfBounds);
    });
}

TEST_CASE("range write replaces bytes in place and re-signs") {
    World w;
    Consumer c = w.consumer();
    SessionState st = w.authenticate(c, {"a1", "a2"}, {"v1", "v2"});
    Bytes data = pattern_data(160 * 1024, 3);

    w.with_session(*w.sn, [&](net::SecureSession& s) {
        c.put(s, st, "f", "a1", data);

        // Overwrite a span crossing the chunk-1/chunk-2 boundary.
        Bytes patch = pattern_data(70 * 1024, 99);
        uint64_t off = 60 * 1024;
        c.write(s, st, "f", off, patch);
        std::copy(patch.begin(), patch.end(), data.begin() + long(off));
        CHECK(c.get(s, st, "f") == data);

        // Zero-length write is a client-side no-op.
        c.write(s, st, "f", 10, {});
        CHECK(c.get(s, st, "f") == data);

        CHECK(code_of([&] { c.write(s, st, "f", 159 * 1024, pattern_data(2 * 1024)); }) ==
              ErrorCode::RangeOutOfBounds);
    });
    auto rec = w.sn->store().get("f");
    REQUIRE(rec);
    CHECK(rec->version == 2);

    // A consumer outside the policy cannot write; nothing changes.
    SessionState weak = w.authenticate(c, {"a2"}, {"v1", "v2"});
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        CHECK(code_of([&] { c.write(s, weak, "f", 0, pattern_data(16)); }) ==
              ErrorCode::PolicyUnsatisfied);
        CHECK(c.get(s, st, "f") == data);
    });
}

TEST_CASE("whole-resource replace keeps the policy and changes the length") {
    World w;
    Consumer c = w.consumer();
    SessionState st = w.authenticate(c, {"a1"}, {"v1", "v2"});
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        c.put(s, st, "r", "a1", pattern_data(64));
        Bytes next = pattern_data(300 * 1024, 5);
        c.replace(s, st, "r", next);
        CHECK(c.get(s, st, "r") == next);
    });
    auto rec = w.sn->store().get("r");
    REQUIRE(rec);
    CHECK(rec->version == 2);
    CHECK(policy::serialize(rec->policy) == "a1");
}

TEST_CASE("authorization node derives A-prime from its responsibility") {
    World w(mock_engine(), {"a1"});  // responsible for a1 only
    Consumer c = w.consumer();
    SessionState st = w.authenticate(c, {"a1", "a2"}, {"v1", "v2"});
    CHECK(st.authorized == std::vector<std::string>{"a1"});

    // Too few validity attributes is refused server-side.
    CHECK(code_of([&] { w.authenticate(c, {"a1"}, {"v1"}); }) == ErrorCode::AuthFailed);

    // Nothing authorizable at all.
    CHECK(code_of([&] { w.authenticate(c, {"a2"}, {"v1", "v2"}); }) == ErrorCode::AuthFailed);
}

TEST_CASE("wrong-attribute credentials fail locally at K-prime recovery") {
    World w;
    // Enrolled without a3, but requests it: the issuer encrypts K' under
    // conj(A) including a3, so recovery fails at the consumer.
    Consumer c = w.consumer();
    CHECK(code_of([&] { w.authenticate(c, {"a1", "a2", "a3"}, {"v1", "v2"}); }) ==
          ErrorCode::DecryptFailed);
}

TEST_CASE("malformed auth frame gets an error and ends the session") {
    World w;
    w.with_session(*w.an, [&](net::SecureSession& s) {
        s.send(net::kReqAuth, to_bytes("garbage"));
        net::Frame f = s.recv();
        CHECK(f.type == net::kRespErr);
        CHECK(f.payload[0] == uint8_t(ErrorCode::Malformed));
    });
}

TEST_CASE("expired session is refused by the service node") {
    World w;
    Consumer c = w.consumer();
    SessionState st = w.authenticate(c, {"a1"}, {"v1", "v2"}, 600);
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        c.put(s, st, "e", "a1", pattern_data(32));
    });
    *w.now += 601;
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        CHECK(code_of([&] { c.get(s, st, "e"); }) == ErrorCode::Expired);
    });
}

TEST_CASE("revoking a validity attribute cuts off old keys until re-issue") {
    World w;
    Consumer old_consumer = w.consumer();
    SessionState st = w.authenticate(old_consumer, {"a1"}, {"v1", "v2"});

    w.ledger.reset_counters();
    w.authority->revoke_validity_attribute("v1");
    CHECK(w.ledger.keying_ops > 0);
    CHECK(w.ledger.messages > 0);
    CHECK(w.reg.params()->find("v1")->id.epoch == 1);

    // The old key fails Attribute-Authenticate at K' recovery.
    CHECK(code_of([&] { w.authenticate(old_consumer, {"a1"}, {"v1", "v2"}); }) ==
          ErrorCode::DecryptFailed);

    // Outstanding tokens sealed for the old service key epoch are dead too.
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        CHECK(code_of([&] { old_consumer.get(s, st, "x"); }) == ErrorCode::SealedMismatch);
    });

    // Re-issued credentials work end to end again.
    w.creds = w.authority->reissue_consumer(w.creds);
    Consumer fresh = w.consumer();
    SessionState st2 = w.authenticate(fresh, {"a1"}, {"v1", "v2"});
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        fresh.put(s, st2, "post-revoke", "a1", pattern_data(128));
        CHECK(fresh.get(s, st2, "post-revoke") == pattern_data(128));
    });

    // Revoking a non-validity attribute is refused.
    CHECK(code_of([&] { w.authority->revoke_validity_attribute("a1"); }) ==
          ErrorCode::Malformed);
    CHECK(code_of([&] { w.authority->revoke_validity_attribute("v9"); }) ==
          ErrorCode::Malformed);
}

TEST_CASE("recovering an authorization node invalidates its tokens") {
    World w;
    Consumer c = w.consumer();
    SessionState stolen = w.authenticate(c, {"a1"}, {"v1", "v2"});

    nodes::NodeDescriptor replacement = w.authority->recover_authorization_node(w.an_id);
    CHECK(w.reg.is_blacklisted(w.an_id));
    CHECK(!w.reg.find_node(w.an_id));
    CHECK(replacement.id != w.an_id);
    CHECK(replacement.responsibility == std::vector<std::string>{"a1", "a2", "a3"});

    // Tokens signed by the blacklisted issuer now fail check 1.
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        CHECK(code_of([&] { c.get(s, stolen, "x"); }) == ErrorCode::UnknownIssuer);
    });

    // The replacement node issues tokens that work.
    nodes::AuthorizationNode an2(mock_engine(), w.reg, replacement, 2, 900, w.clk);
    std::optional<SessionState> st2;
    w.with_session(an2, [&](net::SecureSession& s) {
        st2 = c.authenticate(s, {"a1"}, {"v1", "v2"}, 600);
    });
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        c.put(s, *st2, "after", "a1", pattern_data(16));
        CHECK(c.get(s, *st2, "after") == pattern_data(16));
    });
}

TEST_CASE("recovering a service node blacklists it and provisions a replacement") {
    World w;
    Consumer c = w.consumer();
    SessionState st = w.authenticate(c, {"a1"}, {"v1", "v2"});

    nodes::NodeDescriptor replacement = w.authority->recover_service_node(w.sn_id);
    CHECK(w.reg.is_blacklisted(w.sn_id));
    CHECK(!w.reg.find_node(w.sn_id));
    CHECK(w.reg.params()->find("SN")->id.epoch == 1);

    // The replacement serves the routines; note tokens sealed before the
    // SN epoch bump are invalid, so the consumer re-authenticates.
    nodes::ServiceNode sn2(mock_engine(), w.reg, replacement, w.clk);
    SessionState st2 = w.authenticate(c, {"a1"}, {"v1", "v2"});
    w.with_session(sn2, [&](net::SecureSession& s) {
        c.put(s, st2, "fresh", "a1", pattern_data(2048));
        CHECK(c.get(s, st2, "fresh") == pattern_data(2048));
    });

    CHECK(code_of([&] { w.authority->recover_service_node("no-such"); }) ==
          ErrorCode::Malformed);
}

TEST_CASE("registry log replay reproduces the index") {
    std::filesystem::path log =
        std::filesystem::temp_directory_path() / "abestore-test-registry.jsonl";
    std::filesystem::remove(log);
    {
        nodes::Registry reg(log);
        nodes::ScalingLedger led;
        Drbg rng(9);
        abe::AbeSystemConfig cfg;
        cfg.universe = {{"a1", abe::AttributeRole::Generic, 0}};
        nodes::Authority a =
            nodes::Authority::system_init(mock_engine(), cfg, {2, 1, 900}, reg, led, rng);
        a.provision_authorization_node({"a1"});
        nodes::NodeDescriptor sn = a.provision_service_node();
        a.recover_service_node(sn.id);

        nodes::Registry replay(log);
        CHECK(replay.version() == reg.version());
        CHECK(replay.whitelist().size() == reg.whitelist().size());
        CHECK(replay.is_blacklisted(sn.id));
        CHECK(replay.params()->serialize() == reg.params()->serialize());
        CHECK(replay.issuer_whitelist() == reg.issuer_whitelist());
    }
    std::filesystem::remove(log);
}

TEST_CASE("resource store persists to disk and reloads") {
    std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "abestore-test-store";
    std::filesystem::remove_all(dir);

    World w;
    Consumer c = w.consumer();
    SessionState st = w.authenticate(c, {"a1"}, {"v1", "v2"});
    Bytes data = pattern_data(150 * 1024, 11);
    {
        nodes::ServiceNode sn(mock_engine(), w.reg, w.sn->descriptor(), w.clk, dir);
        w.with_session(sn, [&](net::SecureSession& s) { c.put(s, st, "disk", "a1", data); });
        CHECK(std::filesystem::exists(dir / "manifest"));
    }
    {
        // A fresh node over the same directory sees the resource.
        nodes::ServiceNode sn(mock_engine(), w.reg, w.sn->descriptor(), w.clk, dir);
        w.with_session(sn, [&](net::SecureSession& s) { CHECK(c.get(s, st, "disk") == data); });
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("stored bytes never contain plaintext substrings") {
    World w;
    Consumer c = w.consumer();
    SessionState st = w.authenticate(c, {"a1"}, {"v1", "v2"});
    Bytes data = to_bytes(std::string(4096, 'A') + "extremely secret plaintext marker 123456");
    w.with_session(*w.sn, [&](net::SecureSession& s) { c.put(s, st, "p", "a1", data); });

    Bytes dump = w.sn->store().raw_dump();
    std::string hay(dump.begin(), dump.end());
    for (size_t off = 0; off + 16 <= data.size(); off += 13) {
        std::string needle(data.begin() + long(off), data.begin() + long(off + 16));
        CHECK(hay.find(needle) == std::string::npos);
    }
}

TEST_CASE("descriptor and credential files round-trip") {
    World w;
    nodes::NodeDescriptor d = w.sn->descriptor();
    Bytes enc = d.serialize();
    nodes::NodeDescriptor back = nodes::NodeDescriptor::deserialize(enc);
    CHECK(back.id == d.id);
    CHECK(back.role == d.role);
    CHECK(back.key.serialize() == d.key.serialize());
    CHECK(back.sig.serialize() == d.sig.serialize());
    CHECK(back.role_attr == d.role_attr);

    Bytes cenc = w.creds.serialize();
    ConsumerCredentials cback = ConsumerCredentials::deserialize(cenc);
    CHECK(cback.key.serialize() == w.creds.key.serialize());
    CHECK(cback.sig.serialize() == w.creds.sig.serialize());
    CHECK(cback.validity == w.creds.validity);
}

TEST_CASE("scaling ledger records per-action effort") {
    World w;
    w.ledger.reset_counters();
    w.authority->provision_service_node();
    // One key batch (SN + 4 validity components) and the index push.
    CHECK(w.ledger.keying_ops == 5);
    CHECK(w.ledger.messages == 2);

    w.ledger.reset_counters();
    w.authority->enroll_consumer({"a1"}, {"v1", "v2"});
    CHECK(w.ledger.keying_ops == 3);
    CHECK(w.ledger.messages == 1);

    CHECK(code_of([&] { w.authority->enroll_consumer({"a1"}, {"v1"}); }) ==
          ErrorCode::AuthFailed);
    CHECK(code_of([&] { w.authority->enroll_consumer({"zz"}, {"v1", "v2"}); }) ==
          ErrorCode::Malformed);
}

TEST_CASE("the full stack also runs on the pairing engine") {
    World w(abe::pairing_engine());
    Consumer c(abe::pairing_engine(), w.reg, w.creds, w.rng);
    SessionState st = w.authenticate(c, {"a1", "a2"}, {"v1", "v2"});
    Bytes data = pattern_data(80 * 1024, 21);
    w.with_session(*w.sn, [&](net::SecureSession& s) {
        c.put(s, st, "pairing-doc", "a1 and a2", data);
        CHECK(c.get(s, st, "pairing-doc") == data);
        Bytes slice = c.get(s, st, "pairing-doc", ByteRange{65530, 100});
        CHECK(slice == Bytes(data.begin() + 65530, data.begin() + 65630));
    });
}
