#include "abestore/bn254/curve.hpp"

#include "abestore/crypto/sha.hpp"

namespace abestore::bn254 {

// ---- Jacobian arithmetic ----------------------------------------------------

template <typename F>
JacobianPoint<F> JacobianPoint<F>::from_affine(const AffinePoint<F>& a) {
    if (a.infinity) return at_infinity();
    return {a.x, a.y, F::one()};
}

template <typename F>
AffinePoint<F> JacobianPoint<F>::to_affine() const {
    if (is_infinity()) return AffinePoint<F>::at_infinity();
    F zi = z.inverse();
    F zi2 = zi.square();
    return {x * zi2, y * zi2 * zi, false};
}

template <typename F>
JacobianPoint<F> JacobianPoint<F>::dbl() const {
    if (is_infinity()) return *this;
    // dbl-2009-l (a = 0)
    F a = x.square();
    F b = y.square();
    F c = b.square();
    F d = ((x + b).square() - a - c).dbl();
    F e = a.dbl() + a;
    F f = e.square();
    F x3 = f - d.dbl();
    F y3 = e * (d - x3) - c.dbl().dbl().dbl();
    F z3 = (y * z).dbl();
    return {x3, y3, z3};
}

template <typename F>
JacobianPoint<F> JacobianPoint<F>::add(const JacobianPoint& o) const {
    if (is_infinity()) return o;
    if (o.is_infinity()) return *this;
    F z1z1 = z.square();
    F z2z2 = o.z.square();
    F u1 = x * z2z2;
    F u2 = o.x * z1z1;
    F s1 = y * o.z * z2z2;
    F s2 = o.y * z * z1z1;
    F h = u2 - u1;
    F r = s2 - s1;
    if (h.is_zero()) {
        if (r.is_zero()) return dbl();
        return at_infinity();
    }
    F hh = h.square();
    F hhh = h * hh;
    F v = u1 * hh;
    F x3 = r.square() - hhh - v.dbl();
    F y3 = r * (v - x3) - s1 * hhh;
    F z3 = z * o.z * h;
    return {x3, y3, z3};
}

template <typename F>
JacobianPoint<F> JacobianPoint<F>::add_affine(const AffinePoint<F>& o) const {
    if (o.infinity) return *this;
    if (is_infinity()) return from_affine(o);
    F z1z1 = z.square();
    F u2 = o.x * z1z1;
    F s2 = o.y * z * z1z1;
    F h = u2 - x;
    F r = s2 - y;
    if (h.is_zero()) {
        if (r.is_zero()) return dbl();
        return at_infinity();
    }
    F hh = h.square();
    F hhh = h * hh;
    F v = x * hh;
    F x3 = r.square() - hhh - v.dbl();
    F y3 = r * (v - x3) - y * hhh;
    F z3 = z * h;
    return {x3, y3, z3};
}

template <typename F>
JacobianPoint<F> JacobianPoint<F>::mul(const U256& scalar) const {
    JacobianPoint acc = at_infinity();
    bool started = false;
    for (int limb = 3; limb >= 0; --limb) {
        for (int bit = 63; bit >= 0; --bit) {
            if (started) acc = acc.dbl();
            if ((scalar[limb] >> bit) & 1) {
                acc = acc.add(*this);
                started = true;
            }
        }
    }
    return acc;
}

template struct JacobianPoint<Fp>;
template struct JacobianPoint<Fp2>;

// ---- generators and curve equations -----------------------------------------

const G1Affine& g1_generator() {
    static const G1Affine g{Fp::from_u64(1), Fp::from_u64(2), false};
    return g;
}

const G2Affine& g2_generator() {
    static const G2Affine g = [] {
        Fp2 x{Fp::from_u256({0x46debd5cd992f6edULL, 0x674322d4f75edaddULL, 0x426a00665e5c4479ULL,
                             0x1800deef121f1e76ULL}),
              Fp::from_u256({0x97e485b7aef312c2ULL, 0xf1aa493335a9e712ULL, 0x7260bfb731fb5d25ULL,
                             0x198e9393920d483aULL})};
        Fp2 y{Fp::from_u256({0x4ce6cc0166fa7daaULL, 0xe3d1e7690c43d37bULL, 0x4aab71808dcb408fULL,
                             0x12c85ea5db8c6debULL}),
              Fp::from_u256({0x55acdadcd122975bULL, 0xbc4b313370b38ef3ULL, 0xec9e99ad690c3395ULL,
                             0x090689d0585ff075ULL})};
        return G2Affine{x, y, false};
    }();
    return g;
}

const Fp2& g2_curve_b() {
    static const Fp2 b = [] {
        Fp2 xi{Fp::from_u64(9), Fp::one()};
        return xi.inverse().mul_fp(Fp::from_u64(3));
    }();
    return b;
}

bool g1_on_curve(const G1Affine& p) {
    if (p.infinity) return true;
    return p.y.square() == p.x.square() * p.x + Fp::from_u64(3);
}

bool g2_on_curve(const G2Affine& p) {
    if (p.infinity) return true;
    return p.y.square() == p.x.square() * p.x + g2_curve_b();
}

bool g2_in_subgroup(const G2Affine& p) {
    if (!g2_on_curve(p)) return false;
    return G2::from_affine(p).mul(kModR).is_infinity();
}

G1Affine g1_mul(const G1Affine& p, const Fr& k) {
    return G1::from_affine(p).mul(k.to_u256()).to_affine();
}

G2Affine g2_mul(const G2Affine& p, const Fr& k) {
    return G2::from_affine(p).mul(k.to_u256()).to_affine();
}

G1Affine g1_add(const G1Affine& a, const G1Affine& b) {
    return G1::from_affine(a).add_affine(b).to_affine();
}

G2Affine g2_add(const G2Affine& a, const G2Affine& b) {
    return G2::from_affine(a).add_affine(b).to_affine();
}

G1Affine hash_to_g1(std::span<const uint8_t> msg) {
    for (uint32_t ctr = 0;; ++ctr) {
        ByteWriter w;
        w.str("bn254-g1-hash");
        w.blob(msg);
        w.u32(ctr);
        Bytes h = crypto::sha256(w.bytes());
        Fp x = Fp::from_bytes_mod(h);
        Fp rhs = x.square() * x + Fp::from_u64(3);
        Fp y;
        if (!rhs.sqrt(y)) continue;
        // Pin the y choice to a hash bit so the map is deterministic.
        Bytes sign = crypto::sha256(to_bytes(hex_encode(h) + "-sign"));
        bool want_high = sign[0] & 1;
        if (y.is_high() != want_high) y = y.neg();
        return {x, y, false};
    }
}

G2Affine g2_psi(const G2Affine& q) {
    if (q.infinity) return q;
    const auto& fc = frobenius_constants();
    return {q.x.conj() * fc.twist_x, q.y.conj() * fc.twist_y, false};
}

// ---- serialization ----------------------------------------------------------

static void write_fp(ByteWriter& w, const Fp& v) {
    uint8_t buf[32];
    v.to_bytes(buf);
    w.raw(std::span<const uint8_t>(buf, 32));
}

static Fp read_fp(ByteReader& r) {
    Bytes b = r.raw(32);
    U256 x = detail::u256_from_be(b);
    if (!detail::u256_less(x, kModP)) throw DecodeError("field element out of range");
    return Fp::from_u256(x);
}

Bytes g1_to_bytes(const G1Affine& p) {
    ByteWriter w;
    if (p.infinity) {
        w.u8(0);
        return w.take();
    }
    w.u8(4);
    write_fp(w, p.x);
    write_fp(w, p.y);
    return w.take();
}

G1Affine g1_from_bytes(ByteReader& r) {
    uint8_t tag = r.u8();
    if (tag == 0) return G1Affine::at_infinity();
    if (tag != 4) throw DecodeError("bad G1 encoding tag");
    G1Affine p{read_fp(r), read_fp(r), false};
    if (!g1_on_curve(p)) throw DecodeError("G1 point not on curve");
    return p;
}

Bytes g2_to_bytes(const G2Affine& p) {
    ByteWriter w;
    if (p.infinity) {
        w.u8(0);
        return w.take();
    }
    w.u8(4);
    write_fp(w, p.x.a);
    write_fp(w, p.x.b);
    write_fp(w, p.y.a);
    write_fp(w, p.y.b);
    return w.take();
}

G2Affine g2_from_bytes(ByteReader& r) {
    uint8_t tag = r.u8();
    if (tag == 0) return G2Affine::at_infinity();
    if (tag != 4) throw DecodeError("bad G2 encoding tag");
    Fp xa = read_fp(r), xb = read_fp(r), ya = read_fp(r), yb = read_fp(r);
    G2Affine p{{xa, xb}, {ya, yb}, false};
    if (!g2_in_subgroup(p)) throw DecodeError("G2 point not in subgroup");
    return p;
}

}  // namespace abestore::bn254
