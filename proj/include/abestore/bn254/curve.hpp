#pragma once

#include "abestore/bn254/fields.hpp"
#include "abestore/bytes.hpp"

namespace abestore::bn254 {

// G1: y^2 = x^3 + 3 over Fp (cofactor 1).
// G2: y^2 = x^3 + 3/xi over Fp2 (sextic twist; subgroup of order r).
// Jacobian coordinates internally; affine at the API edges.

template <typename F>
struct AffinePoint {
    F x, y;
    bool infinity = true;

    static AffinePoint at_infinity() { return {}; }
    bool operator==(const AffinePoint& o) const {
        if (infinity || o.infinity) return infinity == o.infinity;
        return x == o.x && y == o.y;
    }
    AffinePoint neg() const {
        if (infinity) return *this;
        return {x, y.neg(), false};
    }
};

template <typename F>
struct JacobianPoint {
    F x, y, z;  // z == 0 means infinity

    static JacobianPoint at_infinity() { return {F::zero(), F::zero(), F::zero()}; }
    static JacobianPoint from_affine(const AffinePoint<F>& a);
    AffinePoint<F> to_affine() const;

    bool is_infinity() const { return z.is_zero(); }

    JacobianPoint dbl() const;
    JacobianPoint add(const JacobianPoint& o) const;
    JacobianPoint add_affine(const AffinePoint<F>& o) const;
    JacobianPoint neg() const { return {x, y.neg(), z}; }
    JacobianPoint mul(const U256& scalar) const;
};

using G1Affine = AffinePoint<Fp>;
using G2Affine = AffinePoint<Fp2>;
using G1 = JacobianPoint<Fp>;
using G2 = JacobianPoint<Fp2>;

const G1Affine& g1_generator();
const G2Affine& g2_generator();
const Fp2& g2_curve_b();

bool g1_on_curve(const G1Affine& p);
bool g2_on_curve(const G2Affine& p);
// Full subgroup check (order r); for G1 the curve check suffices.
bool g2_in_subgroup(const G2Affine& p);

G1Affine g1_mul(const G1Affine& p, const Fr& k);
G2Affine g2_mul(const G2Affine& p, const Fr& k);
G1Affine g1_add(const G1Affine& a, const G1Affine& b);
G2Affine g2_add(const G2Affine& a, const G2Affine& b);

// Deterministic hash onto G1 (try-and-increment; not constant-time).
G1Affine hash_to_g1(std::span<const uint8_t> msg);

// Untwist-Frobenius endomorphism psi on the twist.
G2Affine g2_psi(const G2Affine& q);

// Serialization: 1 tag byte (0 infinity, 4 uncompressed) + coordinates.
Bytes g1_to_bytes(const G1Affine& p);
G1Affine g1_from_bytes(ByteReader& r);       // validates curve membership
Bytes g2_to_bytes(const G2Affine& p);
G2Affine g2_from_bytes(ByteReader& r);       // validates curve + subgroup

}  // namespace abestore::bn254
