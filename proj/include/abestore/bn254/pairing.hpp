#pragma once

#include <vector>

#include "abestore/bn254/curve.hpp"

namespace abestore::bn254 {

// Target group element (subgroup of Fp12 of order r).
struct Gt {
    Fp12 value = Fp12::one();

    static Gt one() { return {}; }
    Gt operator*(const Gt& o) const { return {value * o.value}; }
    Gt inverse() const { return {value.conj()}; }  // valid inside the r-subgroup
    Gt pow(const Fr& k) const { return {value.pow(k.to_u256())}; }
    bool operator==(const Gt& o) const = default;
    bool is_one() const { return value.is_one(); }

    Bytes to_bytes() const;
    static Gt from_bytes(std::span<const uint8_t> data);  // 384 bytes
};

// Optimal ate pairing e : G1 x G2 -> Gt.
Gt pairing(const G1Affine& p, const G2Affine& q);

// Product of pairings sharing one final exponentiation.
Gt pairing_product(const std::vector<std::pair<G1Affine, G2Affine>>& pairs);

// Exposed for tests.
Fp12 miller_loop(const G1Affine& p, const G2Affine& q);
Fp12 final_exponentiation(const Fp12& f);

}  // namespace abestore::bn254
