#include "abestore/errors.hpp"
#include "abestore/suite.hpp"
#include "doctest.h"

using namespace abestore;
using namespace abestore::suite;

TEST_CASE("suite registry resolves the default and rejects strangers") {
    const CryptoSuite& s = suite_by_id(kDefaultSuiteId);
    CHECK(s.sym == "aes-256-ctr");
    CHECK(s.mac == "cmac-aes-256");
    CHECK(s.sig == "rsa-2048-pkcs1-sha256");
    CHECK(s.ke == "ffdhe-modp-2048");
    CHECK(s.kdf == "hkdf-sha256");
    try {
        suite_by_id("tls13-chacha");
        FAIL("expected mismatch");
    } catch (const ProtocolError& e) {
        CHECK(e.code() == ErrorCode::SuiteMismatch);
    }
}

TEST_CASE("sym round trips, including empty and 1 MiB") {
    Drbg rng(1);
    SymKey k = SymKey::generate(rng);
    for (size_t len : {size_t(0), size_t(1), size_t(4096), size_t(1024 * 1024)}) {
        Bytes m = rng.bytes(len);
        Bytes sealed = k.encrypt(rng, m);
        CHECK(k.decrypt(sealed) == m);
    }
}

TEST_CASE("same plaintext twice gives distinct ciphertexts") {
    Drbg rng(2);
    SymKey k = SymKey::generate(rng);
    Bytes m = to_bytes("repeated message");
    CHECK(k.encrypt(rng, m) != k.encrypt(rng, m));
}

TEST_CASE("IV reuse under one key is rejected") {
    Drbg rng(3);
    SymKey k = SymKey::generate(rng);
    Bytes iv = rng.bytes(16);
    k.encrypt(iv, to_bytes("one"));
    CHECK_THROWS_AS(k.encrypt(iv, to_bytes("two")), ProtocolError);
    // A different key object may use it.
    SymKey k2 = SymKey::generate(rng);
    CHECK_NOTHROW(k2.encrypt(iv, to_bytes("three")));
}

TEST_CASE("mac round trip and bit-flip rejection") {
    Drbg rng(4);
    Bytes key = rng.bytes(32);
    Bytes m = rng.bytes(300);
    Bytes tag = mac_tag(key, m);
    CHECK(mac_verify(key, m, tag));
    Bytes m2 = m;
    m2[17] ^= 0x40;
    CHECK_FALSE(mac_verify(key, m2, tag));
    Bytes t2 = tag;
    t2[0] ^= 1;
    CHECK_FALSE(mac_verify(key, m, t2));
}

TEST_CASE("mac forgery fuzz: random mutations never verify") {
    Drbg rng(5);
    Bytes key = rng.bytes(32);
    Bytes m = rng.bytes(128);
    Bytes tag = mac_tag(key, m);
    int rejected = 0;
    for (int i = 0; i < 10000; ++i) {
        Bytes mm = m;
        Bytes tt = tag;
        // Mutate message, tag, or both.
        switch (rng.below(3)) {
            case 0: mm[rng.below(mm.size())] ^= uint8_t(1 + rng.below(255)); break;
            case 1: tt[rng.below(tt.size())] ^= uint8_t(1 + rng.below(255)); break;
            default:
                mm[rng.below(mm.size())] ^= uint8_t(1 + rng.below(255));
                tt[rng.below(tt.size())] ^= uint8_t(1 + rng.below(255));
                break;
        }
        if (!mac_verify(key, mm, tt)) ++rejected;
    }
    CHECK(rejected == 10000);
}

TEST_CASE("signature round trip; wrong key and mutation fuzz fail") {
    Drbg rng(6);
    SigKeyPair kp = sig_generate(rng);
    SigKeyPair other = sig_generate(rng);
    Bytes m = rng.bytes(200);
    Bytes sig = sign(kp, m);
    CHECK(verify(kp.pub, m, sig));
    CHECK_FALSE(verify(other.pub, m, sig));

    int rejected = 0;
    for (int i = 0; i < 10000; ++i) {
        Bytes mm = m;
        mm[rng.below(mm.size())] ^= uint8_t(1 + rng.below(255));
        if (!verify(kp.pub, mm, sig)) ++rejected;
    }
    CHECK(rejected == 10000);
}

TEST_CASE("key exchange agrees; sessions are independent") {
    Drbg rng(7);
    KeShare a = ke_generate(rng), b = ke_generate(rng);
    Bytes sab = ke_shared_secret(a, b.pub);
    Bytes sba = ke_shared_secret(b, a.pub);
    CHECK(sab == sba);

    KeShare c = ke_generate(rng), d = ke_generate(rng);
    CHECK(ke_shared_secret(c, d.pub) != sab);
}

TEST_CASE("channel key derivation: deterministic, label-separated") {
    Drbg rng(8);
    Bytes secret = rng.bytes(256);
    ChannelKeys k1 = derive_channel_keys(secret);
    ChannelKeys k2 = derive_channel_keys(secret);
    CHECK(k1.enc_c2s == k2.enc_c2s);
    CHECK(k1.mac_s2c == k2.mac_s2c);

    // All four pairwise distinct.
    std::vector<Bytes> all{k1.enc_c2s, k1.mac_c2s, k1.enc_s2c, k1.mac_s2c};
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i + 1; j < all.size(); ++j) CHECK(all[i] != all[j]);

    Bytes secret2 = secret;
    secret2[0] ^= 1;
    CHECK(derive_channel_keys(secret2).enc_c2s != k1.enc_c2s);
}
