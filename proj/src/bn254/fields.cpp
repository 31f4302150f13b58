#include "abestore/bn254/fields.hpp"

#include <stdexcept>

namespace abestore::bn254 {

namespace detail {

using u128 = unsigned __int128;

bool u256_less(const U256& a, const U256& b) {
    for (int i = 3; i >= 0; --i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

bool u256_is_zero(const U256& a) { return a[0] == 0 && a[1] == 0 && a[2] == 0 && a[3] == 0; }

// returns carry
static uint64_t u256_add(U256& a, const U256& b) {
    u128 c = 0;
    for (int i = 0; i < 4; ++i) {
        c += u128(a[i]) + b[i];
        a[i] = uint64_t(c);
        c >>= 64;
    }
    return uint64_t(c);
}

// returns borrow
static uint64_t u256_sub(U256& a, const U256& b) {
    u128 borrow = 0;
    for (int i = 0; i < 4; ++i) {
        u128 d = u128(a[i]) - b[i] - borrow;
        a[i] = uint64_t(d);
        borrow = (d >> 64) & 1;
    }
    return uint64_t(borrow);
}

U256 u256_from_be(std::span<const uint8_t> be32) {
    if (be32.size() != 32) throw std::invalid_argument("expected 32 bytes");
    U256 out{};
    for (int limb = 0; limb < 4; ++limb) {
        uint64_t v = 0;
        for (int j = 0; j < 8; ++j) v = (v << 8) | be32[(3 - limb) * 8 + j];
        out[limb] = v;
    }
    return out;
}

void u256_to_be(const U256& a, uint8_t out[32]) {
    for (int limb = 0; limb < 4; ++limb) {
        uint64_t v = a[limb];
        for (int j = 7; j >= 0; --j) {
            out[(3 - limb) * 8 + j] = uint8_t(v);
            v >>= 8;
        }
    }
}

U256 u256_mod(U256 a, const U256& m) {
    while (!u256_less(a, m)) u256_sub(a, m);
    return a;
}

U256 u256_div_small(const U256& a, uint64_t d) {
    U256 out{};
    u128 rem = 0;
    for (int i = 3; i >= 0; --i) {
        u128 cur = (rem << 64) | a[i];
        out[i] = uint64_t(cur / d);
        rem = cur % d;
    }
    return out;
}

U256 u256_sub_small(U256 a, uint64_t d) {
    U256 b{d, 0, 0, 0};
    u256_sub(a, b);
    return a;
}

}  // namespace detail

using detail::u128;
using detail::u256_add;
using detail::u256_sub;

// ---- Fp256 ------------------------------------------------------------------

template <const U256& Mod>
const U256& Fp256<Mod>::r2() {
    static const U256 value = [] {
        // 2^512 mod Mod via 512 modular doublings of 1.
        U256 x{1, 0, 0, 0};
        for (int i = 0; i < 512; ++i) {
            uint64_t carry = u256_add(x, x);
            if (carry || !detail::u256_less(x, Mod)) u256_sub(x, Mod);
        }
        return x;
    }();
    return value;
}

template <const U256& Mod>
U256 Fp256<Mod>::mont_mul(const U256& a, const U256& b) {
    // CIOS (coarsely integrated operand scanning).
    uint64_t t[6] = {0, 0, 0, 0, 0, 0};
    const uint64_t inv = inv64();
    for (int i = 0; i < 4; ++i) {
        u128 c = 0;
        for (int j = 0; j < 4; ++j) {
            c += u128(a[i]) * b[j] + t[j];
            t[j] = uint64_t(c);
            c >>= 64;
        }
        c += t[4];
        t[4] = uint64_t(c);
        t[5] = uint64_t(c >> 64);

        uint64_t m = t[0] * inv;
        c = u128(m) * Mod[0] + t[0];
        c >>= 64;
        for (int j = 1; j < 4; ++j) {
            c += u128(m) * Mod[j] + t[j];
            t[j - 1] = uint64_t(c);
            c >>= 64;
        }
        c += t[4];
        t[3] = uint64_t(c);
        t[4] = t[5] + uint64_t(c >> 64);
        t[5] = 0;
    }
    U256 out{t[0], t[1], t[2], t[3]};
    if (t[4] || !detail::u256_less(out, Mod)) u256_sub(out, Mod);
    return out;
}

template <const U256& Mod>
Fp256<Mod> Fp256<Mod>::from_u256(const U256& x) {
    return raw(mont_mul(x, r2()));
}

template <const U256& Mod>
Fp256<Mod> Fp256<Mod>::from_bytes_mod(std::span<const uint8_t> be32) {
    U256 x = detail::u256_mod(detail::u256_from_be(be32), Mod);
    return from_u256(x);
}

template <const U256& Mod>
U256 Fp256<Mod>::to_u256() const {
    return mont_mul(v_, U256{1, 0, 0, 0});
}

template <const U256& Mod>
void Fp256<Mod>::to_bytes(uint8_t out[32]) const {
    detail::u256_to_be(to_u256(), out);
}

template <const U256& Mod>
Fp256<Mod> Fp256<Mod>::operator+(const Fp256& o) const {
    U256 x = v_;
    uint64_t carry = u256_add(x, o.v_);
    if (carry || !detail::u256_less(x, Mod)) u256_sub(x, Mod);
    return raw(x);
}

template <const U256& Mod>
Fp256<Mod> Fp256<Mod>::operator-(const Fp256& o) const {
    U256 x = v_;
    if (u256_sub(x, o.v_)) u256_add(x, Mod);
    return raw(x);
}

template <const U256& Mod>
Fp256<Mod> Fp256<Mod>::neg() const {
    if (is_zero()) return *this;
    U256 x = Mod;
    u256_sub(x, v_);
    return raw(x);
}

template <const U256& Mod>
Fp256<Mod> Fp256<Mod>::operator*(const Fp256& o) const {
    return raw(mont_mul(v_, o.v_));
}

template <const U256& Mod>
Fp256<Mod> Fp256<Mod>::pow(const U256& e) const {
    Fp256 acc = one();
    bool started = false;
    for (int limb = 3; limb >= 0; --limb) {
        for (int bit = 63; bit >= 0; --bit) {
            if (started) acc = acc.square();
            if ((e[limb] >> bit) & 1) {
                acc = acc * *this;
                started = true;
            }
        }
    }
    return acc;
}

template <const U256& Mod>
Fp256<Mod> Fp256<Mod>::inverse() const {
    return pow(detail::u256_sub_small(Mod, 2));
}

template <const U256& Mod>
bool Fp256<Mod>::sqrt(Fp256& out) const {
    // Mod = 3 (mod 4) for both BN254 fields.
    U256 e = detail::u256_div_small(detail::u256_sub_small(Mod, 3), 4);
    // candidate = x^((Mod+1)/4) = x^((Mod-3)/4 + 1)
    Fp256 cand = pow(e) * *this;
    if (cand.square() == *this) {
        out = cand;
        return true;
    }
    return false;
}

template <const U256& Mod>
bool Fp256<Mod>::is_zero() const {
    return detail::u256_is_zero(v_);
}

template <const U256& Mod>
bool Fp256<Mod>::is_high() const {
    U256 half = detail::u256_div_small(Mod, 2);
    return detail::u256_less(half, to_u256());
}

template class Fp256<kModP>;
template class Fp256<kModR>;

// ---- Fp2 --------------------------------------------------------------------

Fp2 Fp2::operator*(const Fp2& o) const {
    Fp t0 = a * o.a;
    Fp t1 = b * o.b;
    Fp t2 = (a + b) * (o.a + o.b);
    return {t0 - t1, t2 - t0 - t1};
}

Fp2 Fp2::square() const {
    Fp t0 = a + b;
    Fp t1 = a - b;
    Fp t2 = a * b;
    return {t0 * t1, t2.dbl()};
}

Fp2 Fp2::inverse() const {
    Fp norm = a.square() + b.square();
    Fp ninv = norm.inverse();
    return {a * ninv, (b * ninv).neg()};
}

Fp2 Fp2::mul_xi() const {
    // (a + b u)(9 + u) = (9a - b) + (a + 9b) u
    Fp nine_a = a.dbl().dbl().dbl() + a;
    Fp nine_b = b.dbl().dbl().dbl() + b;
    return {nine_a - b, a + nine_b};
}

Fp2 Fp2::pow(const U256& e) const {
    Fp2 acc = one();
    bool started = false;
    for (int limb = 3; limb >= 0; --limb) {
        for (int bit = 63; bit >= 0; --bit) {
            if (started) acc = acc.square();
            if ((e[limb] >> bit) & 1) {
                acc = acc * *this;
                started = true;
            }
        }
    }
    return acc;
}

// ---- Fp6 --------------------------------------------------------------------

Fp6 Fp6::operator*(const Fp6& o) const {
    Fp2 t0 = c0 * o.c0;
    Fp2 t1 = c0 * o.c1 + c1 * o.c0;
    Fp2 t2 = c0 * o.c2 + c1 * o.c1 + c2 * o.c0;
    Fp2 t3 = c1 * o.c2 + c2 * o.c1;
    Fp2 t4 = c2 * o.c2;
    return {t0 + t3.mul_xi(), t1 + t4.mul_xi(), t2};
}

Fp6 Fp6::inverse() const {
    Fp2 a0 = c0.square() - (c1 * c2).mul_xi();
    Fp2 a1 = c2.square().mul_xi() - c0 * c1;
    Fp2 a2 = c1.square() - c0 * c2;
    Fp2 t = ((c1 * a2 + c2 * a1).mul_xi() + c0 * a0).inverse();
    return {a0 * t, a1 * t, a2 * t};
}

// ---- Fp12 -------------------------------------------------------------------

Fp12 Fp12::operator*(const Fp12& o) const {
    Fp6 t0 = c0 * o.c0;
    Fp6 t1 = c1 * o.c1;
    Fp6 cross = (c0 + c1) * (o.c0 + o.c1) - t0 - t1;
    return {t0 + t1.mul_v(), cross};
}

Fp12 Fp12::square() const {
    Fp6 t0 = c0 * c1;
    Fp6 s = (c0 + c1) * (c0 + c1.mul_v());
    return {s - t0 - t0.mul_v(), t0 + t0};
}

Fp12 Fp12::inverse() const {
    Fp6 t = (c0.square() - c1.square().mul_v()).inverse();
    return {c0 * t, (c1 * t).neg()};
}

Fp12 Fp12::pow(const U256& e) const {
    Fp12 acc = one();
    bool started = false;
    for (int limb = 3; limb >= 0; --limb) {
        for (int bit = 63; bit >= 0; --bit) {
            if (started) acc = acc.square();
            if ((e[limb] >> bit) & 1) {
                acc = acc * *this;
                started = true;
            }
        }
    }
    return acc;
}

Fp2 Fp12::wcoeff(int k) const {
    const Fp6& base = (k % 2 == 0) ? c0 : c1;
    switch (k / 2) {
        case 0: return base.c0;
        case 1: return base.c1;
        default: return base.c2;
    }
}

Fp12 Fp12::from_wcoeffs(const std::array<Fp2, 6>& e) {
    return {{e[0], e[2], e[4]}, {e[1], e[3], e[5]}};
}

Fp12 Fp12::frobenius() const {
    const auto& fc = frobenius_constants();
    std::array<Fp2, 6> e;
    for (int k = 0; k < 6; ++k) e[k] = wcoeff(k).conj() * fc.gamma[k];
    return from_wcoeffs(e);
}

const FrobeniusConstants& frobenius_constants() {
    static const FrobeniusConstants fc = [] {
        FrobeniusConstants out;
        Fp2 xi{Fp::from_u64(9), Fp::one()};
        U256 pm1 = detail::u256_sub_small(kModP, 1);
        Fp2 gamma = xi.pow(detail::u256_div_small(pm1, 6));
        out.gamma[0] = Fp2::one();
        for (int k = 1; k < 6; ++k) out.gamma[k] = out.gamma[k - 1] * gamma;
        out.twist_x = xi.pow(detail::u256_div_small(pm1, 3));
        out.twist_y = xi.pow(detail::u256_div_small(pm1, 2));
        return out;
    }();
    return fc;
}

}  // namespace abestore::bn254
