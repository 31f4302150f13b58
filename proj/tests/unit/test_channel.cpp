#include <thread>

#include "abestore/errors.hpp"
#include "abestore/net/secure_session.hpp"
#include "abestore/net/transport_tcp.hpp"
#include "doctest.h"

using namespace abestore;
using namespace abestore::net;

namespace {

struct SessionPair {
    MemPair pipe;
    SecureSession client;
    SecureSession server;
};

// Establish both ends over an in-memory pipe, server on a helper thread.
SessionPair make_sessions(uint64_t seed) {
    MemPair pipe = mem_pair();
    Drbg client_rng(seed), server_rng(seed + 1);
    std::optional<SecureSession> server;
    std::thread st([&] {
        server.emplace(SecureSession::establish(*pipe.b, SecureSession::Role::Responder,
                                                server_rng));
    });
    SecureSession client =
        SecureSession::establish(*pipe.a, SecureSession::Role::Initiator, client_rng);
    st.join();
    return {std::move(pipe), std::move(client), std::move(*server)};
}

}  // namespace

TEST_CASE("loopback establish and frame round trips") {
    SessionPair s = make_sessions(1);
    for (size_t len : {size_t(0), size_t(1), size_t(1024 * 1024)}) {
        Drbg rng(len + 7);
        Bytes payload = rng.bytes(len);
        s.client.send(kReqAuth, payload);
        Frame f = s.server.recv();
        CHECK(f.type == kReqAuth);
        CHECK(f.payload == payload);

        s.server.send(kRespAuth, payload);
        Frame back = s.client.recv();
        CHECK(back.type == kRespAuth);
        CHECK(back.payload == payload);
    }
}

TEST_CASE("frames arrive in order across many sends") {
    SessionPair s = make_sessions(2);
    for (int i = 0; i < 50; ++i) s.client.send(kPutBody, to_bytes("frame " + std::to_string(i)));
    for (int i = 0; i < 50; ++i) {
        Frame f = s.server.recv();
        CHECK(to_string(f.payload) == "frame " + std::to_string(i));
    }
}

TEST_CASE("bit-flip in transit aborts before delivery") {
    SessionPair s = make_sessions(3);
    // Flip one bit in every chunk from client to server.
    s.pipe.a->set_send_hook([](const Bytes& chunk) {
        Bytes out = chunk;
        out[out.size() / 2] ^= 0x10;
        return out;
    });
    s.client.send(kGetReq, to_bytes("hello"));
    CHECK_THROWS_AS(s.server.recv(), ProtocolError);
    CHECK(s.server.aborted());
    // The aborted session refuses further use.
    CHECK_THROWS_AS(s.server.recv(), ProtocolError);
}

TEST_CASE("replayed frame aborts via the counter rule") {
    SessionPair s = make_sessions(4);
    Bytes captured;
    s.pipe.a->set_send_hook([&](const Bytes& chunk) {
        captured = chunk;
        return chunk;
    });
    s.client.send(kGetReq, to_bytes("one"));
    CHECK(s.server.recv().payload == to_bytes("one"));

    // Replay the same wire bytes: the server expects counter 1 now.
    s.pipe.a->inject(captured);
    CHECK_THROWS_AS(s.server.recv(), ProtocolError);
}

TEST_CASE("dropped frame surfaces as MAC failure on the next one") {
    SessionPair s = make_sessions(5);
    bool drop_next = true;
    s.pipe.a->set_send_hook([&](const Bytes& chunk) -> std::optional<Bytes> {
        if (drop_next) {
            drop_next = false;
            return std::nullopt;
        }
        return chunk;
    });
    s.client.send(kGetReq, to_bytes("lost"));
    s.client.send(kGetReq, to_bytes("arrives"));
    CHECK_THROWS_AS(s.server.recv(), ProtocolError);
}

TEST_CASE("truncated stream aborts") {
    SessionPair s = make_sessions(6);
    s.pipe.a->set_send_hook([](const Bytes& chunk) {
        return Bytes(chunk.begin(), chunk.begin() + chunk.size() / 2);
    });
    s.client.send(kGetReq, to_bytes("short"));
    s.pipe.a->close();
    try {
        s.server.recv();
        FAIL("expected abort");
    } catch (const ProtocolError& e) {
        CHECK(e.code() == ErrorCode::ChannelAbort);
    }
}

TEST_CASE("suite mismatch aborts the handshake") {
    MemPair pipe = mem_pair();
    Drbg crng(7), srng(8);
    std::exception_ptr server_err;
    std::thread st([&] {
        try {
            SecureSession::establish(*pipe.b, SecureSession::Role::Responder, srng);
        } catch (...) {
            server_err = std::current_exception();
            pipe.b->close();
        }
    });
    // The initiator only knows a suite the responder does not run.  Our
    // registry has a single suite, so fake it by rewriting the hello.
    pipe.a->set_send_hook([](const Bytes& chunk) {
        Bytes out = chunk;
        // Flip a byte inside the suite id string of the KE_INIT frame.
        out[10] ^= 0x20;
        return out;
    });
    CHECK_THROWS_AS(SecureSession::establish(*pipe.a, SecureSession::Role::Initiator, crng),
                    ProtocolError);
    st.join();
    REQUIRE(server_err);
    try {
        std::rethrow_exception(server_err);
    } catch (const ProtocolError& e) {
        CHECK(e.code() == ErrorCode::SuiteMismatch);
    }
}

TEST_CASE("tampered key exchange: first protected frame fails, rerun succeeds") {
    MemPair pipe = mem_pair();
    Drbg crng(9), srng(10);
    // Corrupt the initiator's DH public value (beyond the suite id).
    pipe.a->set_send_hook([](const Bytes& chunk) {
        Bytes out = chunk;
        out[out.size() - 1] ^= 1;
        return out;
    });
    std::optional<SecureSession> server;
    std::thread st([&] {
        server.emplace(
            SecureSession::establish(*pipe.b, SecureSession::Role::Responder, srng));
    });
    SecureSession client =
        SecureSession::establish(*pipe.a, SecureSession::Role::Initiator, crng);
    st.join();
    pipe.a->set_send_hook({});

    // Keys disagree: the first protected frame dies at the MAC.
    client.send(kReqAuth, to_bytes("probe"));
    CHECK_THROWS_AS(server->recv(), ProtocolError);

    // "Renegotiation can be performed again": a fresh handshake on a clean
    // channel works.
    SessionPair retry = make_sessions(11);
    retry.client.send(kReqAuth, to_bytes("probe"));
    CHECK(retry.server.recv().payload == to_bytes("probe"));
}

TEST_CASE("concurrent sessions are independent") {
    SessionPair s1 = make_sessions(12);
    SessionPair s2 = make_sessions(13);

    // Capture ciphertext chunks of the same plaintext on both sessions.
    Bytes wire1, wire2;
    s1.pipe.a->set_send_hook([&](const Bytes& c) { wire1 = c; return c; });
    s2.pipe.a->set_send_hook([&](const Bytes& c) { wire2 = c; return c; });
    Bytes m = to_bytes("identical plaintext");
    s1.client.send(kGetReq, m);
    s2.client.send(kGetReq, m);
    CHECK(wire1 != wire2);
    CHECK(s1.server.recv().payload == m);
    CHECK(s2.server.recv().payload == m);
}

TEST_CASE("the same protocol runs over TCP") {
    TcpListener listener(0);
    Drbg crng(14), srng(15);

    std::thread st([&] {
        auto conn = listener.accept();
        SecureSession server =
            SecureSession::establish(*conn, SecureSession::Role::Responder, srng);
        Frame f = server.recv();
        server.send(kRespGet, f.payload);
    });

    auto conn = tcp_connect("127.0.0.1", listener.port());
    SecureSession client = SecureSession::establish(*conn, SecureSession::Role::Initiator, crng);
    Bytes payload = Drbg(16).bytes(100000);
    Frame echo = client.call(kGetReq, payload);
    CHECK(echo.type == kRespGet);
    CHECK(echo.payload == payload);
    st.join();
}
