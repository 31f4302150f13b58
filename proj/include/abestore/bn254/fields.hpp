#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "abestore/bytes.hpp"

// Arithmetic for the 254-bit Barreto-Naehrig curve commonly referred to as
// BN254 / alt_bn128:
//   p = 36t^4 + 36t^3 + 24t^2 + 6t + 1,  t = 4965661367192848881
//   r = 36t^4 + 36t^3 + 18t^2 + 6t + 1   (group order)
// Tower: Fp2 = Fp[u]/(u^2+1), Fp12 = Fp2[w]/(w^6 - xi), xi = 9 + u,
// with Fp6 = Fp2[v]/(v^3 - xi) and w^2 = v as the nested representation.

namespace abestore::bn254 {

using U256 = std::array<uint64_t, 4>;  // little-endian limbs

constexpr uint64_t kBnParamT = 4965661367192848881ULL;
// Optimal ate Miller loop scalar 6t + 2 = 29793968203157093288 (65 bits).
constexpr unsigned __int128 kAteLoop =
    ((unsigned __int128)1 << 64) | 0x9d797039be763ba8ULL;

inline constexpr U256 kModP = {0x3c208c16d87cfd47ULL, 0x97816a916871ca8dULL,
                               0xb85045b68181585dULL, 0x30644e72e131a029ULL};
inline constexpr U256 kModR = {0x43e1f593f0000001ULL, 0x2833e84879b97091ULL,
                               0xb85045b68181585dULL, 0x30644e72e131a029ULL};

// ---- generic 256-bit Montgomery field ---------------------------------------

namespace detail {

constexpr uint64_t mont_inv64(uint64_t m) {
    // Newton iteration for -m^{-1} mod 2^64 (m odd).
    uint64_t x = 1;
    for (int i = 0; i < 6; ++i) x *= 2 - m * x;
    return ~x + 1;  // negate
}

bool u256_less(const U256& a, const U256& b);
bool u256_is_zero(const U256& a);
U256 u256_from_be(std::span<const uint8_t> be32);
void u256_to_be(const U256& a, uint8_t out[32]);
// a mod m by repeated conditional subtraction (a < ~4m for our moduli).
U256 u256_mod(U256 a, const U256& m);
// (value, remainder) of a / d for small d.
U256 u256_div_small(const U256& a, uint64_t d);
U256 u256_sub_small(U256 a, uint64_t d);

}  // namespace detail

template <const U256& Mod>
class Fp256 {
public:
    constexpr Fp256() : v_{0, 0, 0, 0} {}

    static Fp256 zero() { return Fp256(); }
    static Fp256 one() { return from_u256({1, 0, 0, 0}); }
    static Fp256 from_u64(uint64_t x) { return from_u256({x, 0, 0, 0}); }
    static Fp256 from_u256(const U256& x);                 // x must be < Mod
    static Fp256 from_bytes_mod(std::span<const uint8_t> be32);

    U256 to_u256() const;  // canonical (non-Montgomery) value
    void to_bytes(uint8_t out[32]) const;

    Fp256 operator+(const Fp256& o) const;
    Fp256 operator-(const Fp256& o) const;
    Fp256 operator*(const Fp256& o) const;
    Fp256 neg() const;
    Fp256 square() const { return *this * *this; }
    Fp256 dbl() const { return *this + *this; }

    Fp256 pow(const U256& e) const;
    Fp256 inverse() const;  // zero maps to zero
    bool sqrt(Fp256& out) const;  // p = 3 mod 4 only

    bool is_zero() const;
    bool operator==(const Fp256& o) const = default;

    // True if the canonical value is "negative" (greater than (Mod-1)/2).
    bool is_high() const;

    static const U256& modulus() { return Mod; }

private:
    U256 v_;  // Montgomery form

    static const U256& r2();
    static uint64_t inv64() {
        static const uint64_t inv = detail::mont_inv64(Mod[0]);
        return inv;
    }
    static U256 mont_mul(const U256& a, const U256& b);

    static Fp256 raw(const U256& m) {
        Fp256 f;
        f.v_ = m;
        return f;
    }
};

using Fp = Fp256<kModP>;
using Fr = Fp256<kModR>;

// ---- tower ------------------------------------------------------------------

struct Fp2 {
    Fp a, b;  // a + b*u

    static Fp2 zero() { return {Fp::zero(), Fp::zero()}; }
    static Fp2 one() { return {Fp::one(), Fp::zero()}; }
    static Fp2 from_fp(const Fp& x) { return {x, Fp::zero()}; }

    Fp2 operator+(const Fp2& o) const { return {a + o.a, b + o.b}; }
    Fp2 operator-(const Fp2& o) const { return {a - o.a, b - o.b}; }
    Fp2 operator*(const Fp2& o) const;
    Fp2 neg() const { return {a.neg(), b.neg()}; }
    Fp2 square() const;
    Fp2 dbl() const { return {a.dbl(), b.dbl()}; }
    Fp2 conj() const { return {a, b.neg()}; }
    Fp2 inverse() const;
    Fp2 mul_fp(const Fp& s) const { return {a * s, b * s}; }
    Fp2 mul_xi() const;  // multiply by 9 + u
    Fp2 pow(const U256& e) const;

    bool is_zero() const { return a.is_zero() && b.is_zero(); }
    bool operator==(const Fp2& o) const = default;
};

struct Fp6 {
    Fp2 c0, c1, c2;  // c0 + c1*v + c2*v^2

    static Fp6 zero() { return {Fp2::zero(), Fp2::zero(), Fp2::zero()}; }
    static Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }

    Fp6 operator+(const Fp6& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
    Fp6 operator-(const Fp6& o) const { return {c0 - o.c0, c1 - o.c1, c2 - o.c2}; }
    Fp6 operator*(const Fp6& o) const;
    Fp6 neg() const { return {c0.neg(), c1.neg(), c2.neg()}; }
    Fp6 square() const { return *this * *this; }
    Fp6 mul_v() const { return {c2.mul_xi(), c0, c1}; }
    Fp6 mul_fp2(const Fp2& s) const { return {c0 * s, c1 * s, c2 * s}; }
    Fp6 inverse() const;

    bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
    bool operator==(const Fp6& o) const = default;
};

struct Fp12 {
    Fp6 c0, c1;  // c0 + c1*w

    static Fp12 zero() { return {Fp6::zero(), Fp6::zero()}; }
    static Fp12 one() { return {Fp6::one(), Fp6::zero()}; }

    Fp12 operator+(const Fp12& o) const { return {c0 + o.c0, c1 + o.c1}; }
    Fp12 operator*(const Fp12& o) const;
    Fp12 square() const;
    Fp12 conj() const { return {c0, c1.neg()}; }
    Fp12 inverse() const;
    Fp12 pow(const U256& e) const;
    Fp12 frobenius() const;

    bool is_one() const { return *this == one(); }
    bool operator==(const Fp12& o) const = default;

    // Coefficient access in the w-basis (e_k of w^k, k = 0..5).
    Fp2 wcoeff(int k) const;
    static Fp12 from_wcoeffs(const std::array<Fp2, 6>& e);
};

// gamma = xi^((p-1)/6) and friends, computed once at startup.
struct FrobeniusConstants {
    std::array<Fp2, 6> gamma;  // gamma^k for k=0..5
    Fp2 twist_x;               // xi^((p-1)/3), for the G2 endomorphism
    Fp2 twist_y;               // xi^((p-1)/2)
};
const FrobeniusConstants& frobenius_constants();

}  // namespace abestore::bn254
