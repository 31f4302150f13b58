#include "abestore/bn254/pairing.hpp"

#include "abestore/rng.hpp"
#include "doctest.h"

using namespace abestore;
using namespace abestore::bn254;

namespace {

Fr random_fr(RandomSource& rng) {
    Bytes b = rng.bytes(32);
    b[0] &= 0x0f;  // < 2^252, well under r after reduction
    return Fr::from_bytes_mod(b);
}

}  // namespace

TEST_CASE("Fp field axioms and constants") {
    Drbg rng(1);
    for (int i = 0; i < 50; ++i) {
        Fp a = Fp::from_bytes_mod(rng.bytes(32));
        Fp b = Fp::from_bytes_mod(rng.bytes(32));
        Fp c = Fp::from_bytes_mod(rng.bytes(32));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK((a + b) - b == a);
        if (!a.is_zero()) CHECK(a * a.inverse() == Fp::one());
    }
    CHECK(Fp::from_u64(7) + Fp::from_u64(5) == Fp::from_u64(12));
    // Round trip through canonical bytes.
    Fp x = Fp::from_u64(123456789);
    uint8_t buf[32];
    x.to_bytes(buf);
    CHECK(Fp::from_bytes_mod(std::span<const uint8_t>(buf, 32)) == x);
}

TEST_CASE("Fp sqrt on quadratic residues") {
    Drbg rng(2);
    for (int i = 0; i < 20; ++i) {
        Fp a = Fp::from_bytes_mod(rng.bytes(32));
        Fp sq = a.square();
        Fp root;
        REQUIRE(sq.sqrt(root));
        CHECK((root == a || root == a.neg()));
    }
}

TEST_CASE("Fp2/Fp6/Fp12 tower axioms") {
    Drbg rng(3);
    auto rf2 = [&] { return Fp2{Fp::from_bytes_mod(rng.bytes(32)), Fp::from_bytes_mod(rng.bytes(32))}; };
    for (int i = 0; i < 20; ++i) {
        Fp2 a = rf2(), b = rf2();
        CHECK(a * b == b * a);
        CHECK(a.square() == a * a);
        if (!a.is_zero()) CHECK(a * a.inverse() == Fp2::one());
    }
    auto rf6 = [&] { return Fp6{rf2(), rf2(), rf2()}; };
    for (int i = 0; i < 10; ++i) {
        Fp6 a = rf6(), b = rf6();
        CHECK(a * b == b * a);
        if (!a.is_zero()) CHECK(a * a.inverse() == Fp6::one());
        // v^3 == xi
        Fp6 av3 = a.mul_v().mul_v().mul_v();
        Fp6 axi = a.mul_fp2(Fp2{Fp::from_u64(9), Fp::one()});
        CHECK(av3 == axi);
    }
    auto rf12 = [&] { return Fp12{rf6(), rf6()}; };
    for (int i = 0; i < 10; ++i) {
        Fp12 a = rf12(), b = rf12();
        CHECK(a * b == b * a);
        CHECK(a.square() == a * a);
        CHECK(a * a.inverse() == Fp12::one());
        // Frobenius is the p-power map: check multiplicativity and order 12.
        CHECK((a * b).frobenius() == a.frobenius() * b.frobenius());
        Fp12 f = a;
        for (int k = 0; k < 12; ++k) f = f.frobenius();
        CHECK(f == a);
    }
}

TEST_CASE("generators lie on their curves with order r") {
    CHECK(g1_on_curve(g1_generator()));
    CHECK(g2_on_curve(g2_generator()));
    CHECK(G1::from_affine(g1_generator()).mul(kModR).is_infinity());
    CHECK(G2::from_affine(g2_generator()).mul(kModR).is_infinity());
    CHECK(g2_in_subgroup(g2_generator()));
}

TEST_CASE("group laws") {
    Drbg rng(4);
    const G1Affine g = g1_generator();
    Fr a = random_fr(rng), b = random_fr(rng);
    // (a+b)G == aG + bG
    G1Affine lhs = g1_mul(g, a + b);
    G1Affine rhs = g1_add(g1_mul(g, a), g1_mul(g, b));
    CHECK(lhs == rhs);

    const G2Affine h = g2_generator();
    G2Affine lhs2 = g2_mul(h, a + b);
    G2Affine rhs2 = g2_add(g2_mul(h, a), g2_mul(h, b));
    CHECK(lhs2 == rhs2);

    // P + (-P) = O
    CHECK(g1_add(g1_mul(g, a), g1_mul(g, a).neg()).infinity);
}

TEST_CASE("hash_to_g1 is deterministic and lands on the curve") {
    G1Affine p1 = hash_to_g1(to_bytes("attr:alpha"));
    G1Affine p2 = hash_to_g1(to_bytes("attr:alpha"));
    G1Affine p3 = hash_to_g1(to_bytes("attr:beta"));
    CHECK(p1 == p2);
    CHECK_FALSE(p1 == p3);
    CHECK(g1_on_curve(p1));
    CHECK(g1_on_curve(p3));
    // cofactor 1: hashed points have order r
    CHECK(G1::from_affine(p1).mul(kModR).is_infinity());
}

TEST_CASE("pairing bilinearity and non-degeneracy") {
    Drbg rng(5);
    Gt e = pairing(g1_generator(), g2_generator());
    CHECK_FALSE(e.is_one());
    // Order r: e^r == 1
    CHECK(e.value.pow(kModR).is_one());

    for (int i = 0; i < 4; ++i) {
        Fr a = random_fr(rng), b = random_fr(rng);
        Gt lhs = pairing(g1_mul(g1_generator(), a), g2_mul(g2_generator(), b));
        Gt rhs = e.pow(a * b);
        CHECK(lhs == rhs);
    }

    // e(P1+P2, Q) == e(P1,Q) e(P2,Q)
    Fr a = random_fr(rng), b = random_fr(rng);
    G1Affine p1 = g1_mul(g1_generator(), a);
    G1Affine p2 = g1_mul(g1_generator(), b);
    Gt lhs = pairing(g1_add(p1, p2), g2_generator());
    Gt rhs = pairing(p1, g2_generator()) * pairing(p2, g2_generator());
    CHECK(lhs == rhs);
}

TEST_CASE("pairing with infinity is the identity") {
    CHECK(pairing(G1Affine::at_infinity(), g2_generator()).is_one());
    CHECK(pairing(g1_generator(), G2Affine::at_infinity()).is_one());
}

TEST_CASE("pairing_product matches per-pair products") {
    Drbg rng(6);
    std::vector<std::pair<G1Affine, G2Affine>> pairs;
    Gt expect = Gt::one();
    for (int i = 0; i < 3; ++i) {
        Fr a = random_fr(rng), b = random_fr(rng);
        G1Affine p = g1_mul(g1_generator(), a);
        G2Affine q = g2_mul(g2_generator(), b);
        pairs.push_back({p, q});
        expect = expect * pairing(p, q);
    }
    CHECK(pairing_product(pairs) == expect);
}

TEST_CASE("Gt inverse via conjugation") {
    Drbg rng(7);
    Fr a = random_fr(rng);
    Gt e = pairing(g1_mul(g1_generator(), a), g2_generator());
    CHECK((e * e.inverse()).is_one());
}

TEST_CASE("point serialization round trips and rejects off-curve input") {
    Drbg rng(8);
    G1Affine p = g1_mul(g1_generator(), random_fr(rng));
    Bytes enc1 = g1_to_bytes(p);
    ByteReader r1(enc1);
    CHECK(g1_from_bytes(r1) == p);

    G2Affine q = g2_mul(g2_generator(), random_fr(rng));
    Bytes enc2 = g2_to_bytes(q);
    ByteReader r2(enc2);
    CHECK(g2_from_bytes(r2) == q);

    Bytes bad = g1_to_bytes(p);
    bad[40] ^= 1;
    ByteReader r3(bad);
    CHECK_THROWS_AS(g1_from_bytes(r3), DecodeError);
}
