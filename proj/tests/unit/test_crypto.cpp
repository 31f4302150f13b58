#include "abestore/crypto/aes.hpp"
#include "abestore/crypto/cmac.hpp"
#include "abestore/crypto/dh.hpp"
#include "abestore/crypto/rsa.hpp"
#include "abestore/crypto/sha.hpp"
#include "abestore/rng.hpp"
#include "doctest.h"

using namespace abestore;
using namespace abestore::crypto;

TEST_CASE("sha256 matches published vector") {
    Bytes msg = to_bytes("abc");
    CHECK(hex_encode(sha256(msg)) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    Sha256 inc;
    inc.update(std::string_view("a"));
    inc.update(std::string_view("bc"));
    CHECK(inc.finish() == sha256(msg));
}

TEST_CASE("hmac-sha256 matches RFC 4231 case 1") {
    Bytes key(20, 0x0b);
    Bytes data = to_bytes("Hi There");
    CHECK(hex_encode(hmac_sha256(key, data)) ==
          "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
}

TEST_CASE("hkdf matches RFC 5869 case 1") {
    Bytes ikm(22, 0x0b);
    Bytes salt = hex_decode("000102030405060708090a0b0c");
    Bytes okm = hkdf(ikm, salt, std::string_view("\xf0\xf1\xf2\xf3\xf4\xf5\xf6\xf7\xf8\xf9"), 42);
    CHECK(hex_encode(okm) ==
          "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf"
          "34007208d5b887185865");
}

TEST_CASE("aes-256-ctr matches NIST SP 800-38A F.5.5") {
    Bytes key = hex_decode("603deb1015ca71be2b73aef0857d77811f352c073b6108d72d9810a30914dff4");
    Bytes iv = hex_decode("f0f1f2f3f4f5f6f7f8f9fafbfcfdfeff");
    Bytes pt = hex_decode("6bc1bee22e409f96e93d7e117393172a");
    CHECK(hex_encode(aes256_ctr(key, iv, pt)) == "601ec313775789a5b7a7f504bbf3d228");
    // CTR is an involution.
    CHECK(aes256_ctr(key, iv, aes256_ctr(key, iv, pt)) == pt);
}

TEST_CASE("aes-256-gcm seal/open round trip and tamper detection") {
    Drbg rng(1);
    Bytes key = rng.bytes(32);
    Bytes nonce = rng.bytes(12);
    Bytes aad = to_bytes("header");
    Bytes pt = rng.bytes(1000);

    Bytes sealed = aes256_gcm_seal(key, nonce, aad, pt);
    Bytes out;
    REQUIRE(aes256_gcm_open(key, nonce, aad, sealed, out));
    CHECK(out == pt);

    Bytes bad = sealed;
    bad[17] ^= 0x01;
    CHECK_FALSE(aes256_gcm_open(key, nonce, aad, bad, out));
    Bytes bad_aad = to_bytes("headex");
    CHECK_FALSE(aes256_gcm_open(key, nonce, bad_aad, sealed, out));

    // Empty plaintext still authenticates.
    Bytes sealed_empty = aes256_gcm_seal(key, nonce, aad, {});
    REQUIRE(aes256_gcm_open(key, nonce, aad, sealed_empty, out));
    CHECK(out.empty());
}

TEST_CASE("cmac-aes256 matches NIST SP 800-38B examples") {
    Bytes key = hex_decode("603deb1015ca71be2b73aef0857d77811f352c073b6108d72d9810a30914dff4");
    CHECK(hex_encode(cmac_aes256(key, {})) == "028962f61b7bf89efc6b551f4667d983");
    Bytes m1 = hex_decode("6bc1bee22e409f96e93d7e117393172a");
    CHECK(hex_encode(cmac_aes256(key, m1)) == "28a7023f452e8f82bd4bf28d8c37c35c");
}

TEST_CASE("cmac verify rejects mutations") {
    Drbg rng(2);
    Bytes key = rng.bytes(32);
    Bytes msg = rng.bytes(123);
    Bytes tag = cmac_aes256(key, msg);
    CHECK(cmac_aes256_verify(key, msg, tag));
    for (int i = 0; i < 100; ++i) {
        Bytes m = msg;
        m[rng.below(m.size())] ^= uint8_t(1 + rng.below(255));
        CHECK_FALSE(cmac_aes256_verify(key, m, tag));
    }
}

TEST_CASE("rsa sign/verify round trip") {
    Drbg rng(3);
    RsaKeyPair key = rsa_generate(rng);
    Bytes msg = to_bytes("signed message");
    Bytes sig = rsa_sign(key, msg);
    CHECK(rsa_verify(key.pub, msg, sig));

    Bytes other = to_bytes("signed messagf");
    CHECK_FALSE(rsa_verify(key.pub, other, sig));

    RsaKeyPair key2 = rsa_generate(rng);
    CHECK_FALSE(rsa_verify(key2.pub, msg, sig));

    // Serialization round trip.
    RsaKeyPair back = RsaKeyPair::deserialize(key.serialize());
    CHECK(rsa_verify(back.pub, msg, rsa_sign(back, msg)));
}

TEST_CASE("rsa keygen is deterministic under a fixed seed") {
    Drbg a(99), b(99);
    CHECK(rsa_generate(a).serialize() == rsa_generate(b).serialize());
}

TEST_CASE("dh agreement") {
    Drbg rng(4);
    DhKeyPair alice = dh_generate(rng);
    DhKeyPair bob = dh_generate(rng);
    CHECK(dh_shared_secret(alice, bob.pub) == dh_shared_secret(bob, alice.pub));

    DhKeyPair eve = dh_generate(rng);
    CHECK(dh_shared_secret(alice, eve.pub) != dh_shared_secret(alice, bob.pub));

    Bytes one(256, 0);
    one.back() = 1;
    CHECK_THROWS(dh_shared_secret(alice, one));
    CHECK_THROWS(dh_shared_secret(alice, Bytes(10, 7)));
}

TEST_CASE("drbg streams are reproducible and fork-independent") {
    Drbg a(42), b(42);
    CHECK(a.bytes(64) == b.bytes(64));

    Drbg parent(42);
    Drbg c1 = parent.fork("one");
    Drbg c2 = parent.fork("two");
    CHECK(c1.bytes(32) != c2.bytes(32));
    // Fork result does not depend on parent draw position.
    Drbg parent2(42);
    (void)parent2.bytes(100);
    Drbg c1b = parent2.fork("one");
    CHECK(Drbg(42).fork("one").bytes(32) == c1b.bytes(32));
}
