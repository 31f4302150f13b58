#include <cmath>

#include "abestore/harness/harness.hpp"
#include "doctest.h"

using namespace abestore;
using namespace abestore::harness;

#ifndef ABESTORE_SCENARIO_DIR
#define ABESTORE_SCENARIO_DIR "scenarios"
#endif

namespace {

std::string scenario_path(const std::string& name) {
    return std::string(ABESTORE_SCENARIO_DIR) + "/" + name;
}

Bytes pattern(size_t n, uint8_t seed) {
    Bytes out(n);
    for (size_t i = 0; i < n; ++i) out[i] = uint8_t(seed + i * 131 + (i >> 9));
    return out;
}

// A small simulated deployment on the mock engine.
std::unique_ptr<SimNet> small_world(uint64_t seed) {
    auto net = std::make_unique<SimNet>(seed);
    net->init("mock", 4, 2, 900, {"a1", "a2", "a3"});
    net->add_authz("an1", {"a1", "a2", "a3"});
    net->add_service("sn1");
    net->enroll("alice", {"a1", "a2"}, {"v1", "v2"});
    return net;
}

double shannon_entropy(const Bytes& data) {
    size_t hist[256] = {};
    for (uint8_t b : data) hist[b]++;
    double h = 0;
    for (size_t c : hist) {
        if (!c) continue;
        double p = double(c) / double(data.size());
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

TEST_CASE("simnet round trip and captured failures") {
    auto net = small_world(1);
    REQUIRE(net->authenticate("alice", "an1", {"a1"}, {"v1", "v2"}, 600).ok);

    Bytes data = pattern(100000, 7);
    REQUIRE(net->put("alice", "sn1", "r1", "a1", data).ok);

    SimNet::OpResult got = net->get("alice", "sn1", "r1");
    REQUIRE(got.ok);
    CHECK(got.data == data);

    got = net->get("alice", "sn1", "r1", client::ByteRange{65530, 100});
    REQUIRE(got.ok);
    CHECK(got.data == Bytes(data.begin() + 65530, data.begin() + 65630));

    SimNet::OpResult bad = net->get("alice", "sn1", "nope");
    CHECK_FALSE(bad.ok);
    CHECK(bad.code == ErrorCode::NoSuchResource);
}

TEST_CASE("identical seeds give byte-identical transcripts") {
    auto once = [](uint64_t seed) {
        auto net = small_world(seed);
        net->authenticate("alice", "an1", {"a1", "a2"}, {"v1", "v2"}, 600);
        net->put("alice", "sn1", "r1", "a1 and a2", pattern(50000, 3));
        net->get("alice", "sn1", "r1");
        net->write("alice", "sn1", "r1", 1200, pattern(500, 9));
        net->get("alice", "sn1", "r1", client::ByteRange{1000, 1000});
        return net->transcript();
    };

    Transcript a = once(77), b = once(77), c = once(78);
    REQUIRE(a.entries.size() == b.entries.size());
    CHECK(a.flatten() == b.flatten());
    CHECK(a.dump() == b.dump());
    // A different seed changes the wire bytes (fresh keys, IVs, nonces).
    CHECK(a.flatten() != c.flatten());
}

TEST_CASE("transcript shows no plaintext and high-entropy payloads") {
    auto net = small_world(5);
    net->authenticate("alice", "an1", {"a1"}, {"v1", "v2"}, 600);
    net->put("alice", "sn1", "big", "a1", pattern(200000, 11));
    net->get("alice", "sn1", "big");

    Bytes wire = net->transcript().flatten();
    CHECK_FALSE(net->contains_secret(wire));
    CHECK_FALSE(net->adversary_sees_mst());

    // The bulk of the transcript is encrypted payload; it should look
    // like noise.
    CHECK(shannon_entropy(wire) > doctest::Approx(7.5));
}

TEST_CASE("seeded fault injection: every corruption is detected") {
    // 210 faults: a bit flip at a seeded chunk/byte/bit position, plus a
    // replayed frame every seventh round.  A fault must never yield a
    // successful operation, and an undisturbed retry must always work.
    size_t detected = 0;
    const size_t kRounds = 210;
    Drbg fuzz(4242);
    for (size_t i = 0; i < kRounds; ++i) {
        auto net = small_world(9000 + i);
        REQUIRE(net->authenticate("alice", "an1", {"a1"}, {"v1", "v2"}, 600).ok);
        REQUIRE(net->put("alice", "sn1", "r", "a1", pattern(3000, uint8_t(i))).ok);

        uint64_t chunk_pick = fuzz.below(3) + 1;  // protected frames only
        uint64_t byte_frac = fuzz.u64();
        uint8_t bit = uint8_t(fuzz.below(8));
        bool replay = i % 7 == 0;

        auto count = std::make_shared<uint64_t>(0);
        auto prev = std::make_shared<Bytes>();
        net->set_tamper("sn1", [=](const Bytes& in) -> std::optional<Bytes> {
            uint64_t idx = (*count)++;
            if (idx == 0) return in;  // key-exchange frame
            if (replay) {
                if (prev->empty()) {
                    *prev = in;
                    return in;
                }
                return *prev;
            }
            if (idx != chunk_pick || in.size() <= 5) return in;
            // Flip inside the protected payload.  The 5-byte clear header
            // carries only framing; corrupting its length field models
            // truncation, which stalls rather than aborts a timeout-free
            // in-memory link.
            Bytes out = in;
            out[5 + byte_frac % (out.size() - 5)] ^= uint8_t(1u << bit);
            return out;
        });

        // Write sends open + body, so chunk indexes 1 and 2 both exist.
        SimNet::OpResult res = net->write("alice", "sn1", "r", 100, pattern(700, 0x5a));
        if (!res.ok) ++detected;
        CHECK_FALSE(res.ok);

        net->clear_tamper();
        SimNet::OpResult after = net->get("alice", "sn1", "r");
        REQUIRE(after.ok);
        // A detected fault means the write never landed.
        CHECK(after.data == pattern(3000, uint8_t(i)));
    }
    CHECK(detected == kRounds);
}

TEST_CASE("collusion splices never beat an AND policy") {
    for (const char* engine_name : {"mock", "pairing"}) {
        const abe::AbeEngine& engine =
            std::string(engine_name) == "mock" ? abe::mock_engine() : abe::pairing_engine();
        Drbg rng(1234);
        abe::AbeSystemConfig cfg;
        cfg.universe = {{"a1", abe::AttributeRole::Generic, 0},
                        {"a2", abe::AttributeRole::Generic, 0}};
        auto [pk, mk] = engine.setup(cfg, rng);

        abe::AbePrivateKey k1 = engine.generate_key(pk, mk, {{"a1", {}, 0}}, rng);
        abe::AbePrivateKey k2 = engine.generate_key(pk, mk, {{"a2", {}, 0}}, rng);
        abe::AbePrivateKey both =
            engine.generate_key(pk, mk, {{"a1", {}, 0}, {"a2", {}, 0}}, rng);

        Bytes secret = pattern(32, 0xc3);
        abe::AbeCiphertext ct =
            engine.encrypt(pk, secret, policy::parse("a1 and a2"), rng);

        CHECK_FALSE(collude(engine, pk, {k1, k2}, ct));
        CHECK(collude(engine, pk, {k1, both}, ct));  // sanity: a valid key wins
    }
}

TEST_CASE("scaling sweeps fit the claimed effort classes") {
    std::vector<size_t> sweep{1, 2, 3, 4, 5, 6, 7, 8};
    auto linear = [](size_t n) { return double(n); };
    auto constant = [](size_t) { return 1.0; };

    SUBCASE("joining costs scale with the authority count") {
        std::vector<size_t> authorities{2, 3, 4, 5, 6, 7, 8, 9};
        for (const char* action :
             {"add-authority", "add-authz-node", "add-service-node", "add-consumer"}) {
            std::vector<ScalingPoint> pts = measure_scaling(action, authorities);
            CHECK(fits_class(pts, linear));
            // And they are genuinely not constant.
            CHECK_FALSE(fits_class(pts, constant));
            // Keying effort stays flat as authorities grow.
            CHECK(fits_class(pts, constant, /*use_messages=*/false));
        }
    }

    SUBCASE("revocation scales with the holders of the revoked attribute") {
        std::vector<ScalingPoint> pts = measure_scaling("remove-consumer-holders", sweep);
        // Affine in the holder count: per-holder re-keys plus a constant
        // index/service-rekey term.
        CHECK(fits_class(pts, [](size_t n) { return double(n) + 4.0; }));
        CHECK_FALSE(fits_class(pts, constant));
    }

    SUBCASE("revocation scales with the authorization-node count") {
        std::vector<ScalingPoint> pts = measure_scaling("remove-consumer-authz", sweep);
        CHECK(fits_class(pts, [](size_t n) { return double(n) + 4.0; }));
        CHECK_FALSE(fits_class(pts, constant));
    }
}

TEST_CASE("scenario scripts: weak adversary") {
    for (const char* name : {"weak-eavesdrop.scn", "weak-tamper.scn", "weak-replay.scn"}) {
        CAPTURE(name);
        ScenarioResult res = run_scenario_file(scenario_path(name));
        CHECK(!res.log.empty());
        CHECK(!res.transcript.entries.empty());
        REQUIRE(res.reports.size() == 1);
        CHECK_FALSE(res.reports[0].occurred);
    }
}

TEST_CASE("scenario scripts: strong adversary with classification") {
    for (const char* name :
         {"strong-authz-node.scn", "strong-service-node.scn", "strong-consumer-key.scn"}) {
        CAPTURE(name);
        ScenarioResult res = run_scenario_file(scenario_path(name));
        REQUIRE(res.reports.size() == 1);
        const CompromiseReport& r = res.reports[0];
        CHECK(r.occurred);
        CHECK(r.online_recoverable);
        CHECK(!r.recovery_steps.empty());
    }
}

TEST_CASE("scenario assertion failures name the offending line") {
    std::string script =
        "seed 1\n"
        "init engine=mock generics=a1\n"
        "authz an attrs=a1\n"
        "service sn\n"
        "enroll c attrs=a1 validity=v1,v2\n"
        "get c sn id=missing\n";  // expected ok, actually NoSuchResource
    try {
        run_scenario(script);
        FAIL("expected a scenario assertion failure");
    } catch (const ProtocolError& e) {
        CHECK(e.code() == ErrorCode::Internal);
        CHECK(std::string(e.what()).find("line 6") != std::string::npos);
    }
}

TEST_CASE("clock advance expires sessions inside the harness") {
    auto net = small_world(31);
    REQUIRE(net->authenticate("alice", "an1", {"a1"}, {"v1", "v2"}, 600).ok);
    REQUIRE(net->put("alice", "sn1", "r", "a1", pattern(64, 1)).ok);
    net->advance_clock(601);
    SimNet::OpResult res = net->get("alice", "sn1", "r");
    CHECK_FALSE(res.ok);
    CHECK(res.code == ErrorCode::Expired);
}
