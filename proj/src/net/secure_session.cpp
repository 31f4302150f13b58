#include "abestore/net/secure_session.hpp"

#include "abestore/crypto/aes.hpp"
#include "abestore/crypto/cmac.hpp"
#include "abestore/errors.hpp"

namespace abestore::net {

namespace {

Bytes frame_iv(uint64_t counter) {
    Bytes iv(crypto::kAesIvLen, 0);
    for (int i = 0; i < 8; ++i) iv[8 + i] = uint8_t(counter >> (56 - 8 * i));
    return iv;
}

Bytes mac_input(uint8_t type, uint64_t counter, std::span<const uint8_t> ct) {
    ByteWriter w;
    w.u8(type);
    w.u32(uint32_t(ct.size()));
    w.u64(counter);
    w.raw(ct);
    return w.take();
}

}  // namespace

SecureSession::SecureSession(Transport* t, suite::ChannelKeys keys, Role role) : t_(t) {
    if (role == Role::Initiator) {
        send_enc_ = std::move(keys.enc_c2s);
        send_mac_ = std::move(keys.mac_c2s);
        recv_enc_ = std::move(keys.enc_s2c);
        recv_mac_ = std::move(keys.mac_s2c);
    } else {
        send_enc_ = std::move(keys.enc_s2c);
        send_mac_ = std::move(keys.mac_s2c);
        recv_enc_ = std::move(keys.enc_c2s);
        recv_mac_ = std::move(keys.mac_c2s);
    }
}

SecureSession SecureSession::establish(Transport& t, Role role, RandomSource& rng,
                                       const std::string& suite_id) {
    suite::suite_by_id(suite_id);  // must be registered locally
    suite::KeShare share = suite::ke_generate(rng);

    ByteWriter hello;
    hello.str(suite_id);
    hello.blob(share.pub);

    Bytes peer_pub;
    if (role == Role::Initiator) {
        write_clear_frame(t, kKeInit, hello.bytes());
        Frame resp = read_clear_frame(t);
        if (resp.type != kKeResp)
            throw ProtocolError(ErrorCode::ChannelAbort, "unexpected handshake frame");
        ByteReader r(resp.payload);
        std::string peer_suite = r.str();
        peer_pub = r.blob();
        r.expect_done();
        if (peer_suite != suite_id)
            throw ProtocolError(ErrorCode::SuiteMismatch, "peer suite " + peer_suite);
    } else {
        Frame init = read_clear_frame(t);
        if (init.type != kKeInit)
            throw ProtocolError(ErrorCode::ChannelAbort, "unexpected handshake frame");
        ByteReader r(init.payload);
        std::string peer_suite = r.str();
        peer_pub = r.blob();
        r.expect_done();
        if (peer_suite != suite_id)
            throw ProtocolError(ErrorCode::SuiteMismatch, "peer suite " + peer_suite);
        write_clear_frame(t, kKeResp, hello.bytes());
    }

    Bytes secret = suite::ke_shared_secret(share, peer_pub);
    return SecureSession(&t, suite::derive_channel_keys(secret), role);
}

void SecureSession::send(uint8_t type, std::span<const uint8_t> payload) {
    if (aborted_) throw ProtocolError(ErrorCode::ChannelAbort, "session aborted");
    Bytes ct = crypto::aes256_ctr(send_enc_, frame_iv(send_ctr_), payload);
    Bytes tag = crypto::cmac_aes256(send_mac_, mac_input(type, send_ctr_, ct));
    ++send_ctr_;

    ByteWriter w;
    w.u8(type);
    w.u32(uint32_t(ct.size()));
    w.raw(ct);
    w.raw(tag);
    t_->send_bytes(w.bytes());
}

Frame SecureSession::recv(size_t max_payload) {
    if (aborted_) throw ProtocolError(ErrorCode::ChannelAbort, "session aborted");
    try {
        Bytes head = t_->recv_exact(5);
        ByteReader r(head);
        uint8_t type = r.u8();
        uint32_t len = r.u32();
        if (len > max_payload) throw ProtocolError(ErrorCode::ChannelAbort, "oversized frame");
        Bytes ct = t_->recv_exact(len);
        Bytes tag = t_->recv_exact(crypto::kCmacTagLen);
        if (!crypto::cmac_aes256_verify(recv_mac_, mac_input(type, recv_ctr_, ct), tag))
            throw ProtocolError(ErrorCode::ChannelAbort, "frame MAC failure");
        Frame f;
        f.type = type;
        f.payload = crypto::aes256_ctr(recv_enc_, frame_iv(recv_ctr_), ct);
        ++recv_ctr_;
        return f;
    } catch (const ProtocolError&) {
        aborted_ = true;
        throw;
    }
}

Frame SecureSession::call(uint8_t type, std::span<const uint8_t> payload, size_t max_payload) {
    send(type, payload);
    return recv(max_payload);
}

}  // namespace abestore::net
