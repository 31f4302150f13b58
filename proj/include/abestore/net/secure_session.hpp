#pragma once

#include "abestore/net/frame.hpp"
#include "abestore/rng.hpp"
#include "abestore/suite.hpp"

namespace abestore::net {

// R_KE-established protected channel.  The two KE frames travel in clear
// (suite id + ephemeral DH public value); everything after is
// encrypt-then-MAC with per-direction keys and implicit frame counters, so
// replay, reorder, truncation, and bit-flips all abort the session before
// any payload is delivered.
class SecureSession {
public:
    enum class Role { Initiator, Responder };

    static SecureSession establish(Transport& t, Role role, RandomSource& rng,
                                   const std::string& suite_id = suite::kDefaultSuiteId);

    void send(uint8_t type, std::span<const uint8_t> payload);
    Frame recv(size_t max_payload = (1 << 26));

    // Request/response convenience for the strictly alternating routines.
    Frame call(uint8_t type, std::span<const uint8_t> payload, size_t max_payload = (1 << 26));

    bool aborted() const { return aborted_; }

private:
    SecureSession(Transport* t, suite::ChannelKeys keys, Role role);

    Transport* t_;
    Bytes send_enc_, send_mac_, recv_enc_, recv_mac_;
    uint64_t send_ctr_ = 0, recv_ctr_ = 0;
    bool aborted_ = false;
};

}  // namespace abestore::net
