#pragma once

// BLS12-381 pairing group: Fp/Fp2/Fp6/Fp12 tower, G1/G2 affine arithmetic,
// optimal ate pairing with the cyclotomic final-exponentiation chain, and
// canonical serialization. Arithmetic is GMP-backed; no constant-time claims.
//
// Tower: Fp2 = Fp[u]/(u^2+1), Fp6 = Fp2[v]/(v^3 - (u+1)), Fp12 = Fp6[w]/(w^2 - v).
// G2 is the M-twist y^2 = x^3 + 4(u+1) over Fp2.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "vfefl/bytes.hpp"
#include "vfefl/rng.hpp"

namespace vfefl {

inline const mpz_class& bls_p() {
    static const mpz_class p(
        "0x1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f624"
        "1eabfffeb153ffffb9feffffffffaaab");
    return p;
}

inline const mpz_class& bls_r() {
    static const mpz_class r("0x73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001");
    return r;
}

// |z| for the BLS parameter z = -0xd201000000010000.
inline const mpz_class& bls_z_abs() {
    static const mpz_class z("0xd201000000010000");
    return z;
}

constexpr size_t kFpBytes = 48;
constexpr size_t kFrBytes = 32;

namespace detail {
inline void mod_p(mpz_class& x) { mpz_mod(x.get_mpz_t(), x.get_mpz_t(), bls_p().get_mpz_t()); }
}  // namespace detail

// ---------------------------------------------------------------------------
// Base field
// ---------------------------------------------------------------------------

struct Fp {
    mpz_class v;  // canonical in [0, p)

    Fp() : v(0) {}
    explicit Fp(long x) : v(x) { detail::mod_p(v); }
    explicit Fp(mpz_class x) : v(std::move(x)) { detail::mod_p(v); }

    static Fp zero() { return Fp(); }
    static Fp one() { return Fp(1); }
    bool is_zero() const { return v == 0; }

    friend Fp operator+(const Fp& a, const Fp& b) {
        Fp o;
        o.v = a.v + b.v;
        if (o.v >= bls_p()) o.v -= bls_p();
        return o;
    }
    friend Fp operator-(const Fp& a, const Fp& b) {
        Fp o;
        o.v = a.v - b.v;
        if (sgn(o.v) < 0) o.v += bls_p();
        return o;
    }
    friend Fp operator*(const Fp& a, const Fp& b) {
        Fp o;
        o.v = a.v * b.v;
        detail::mod_p(o.v);
        return o;
    }
    Fp operator-() const {
        Fp o;
        if (v != 0) o.v = bls_p() - v;
        return o;
    }
    bool operator==(const Fp& o) const = default;

    Fp inv() const {
        Fp o;
        if (mpz_invert(o.v.get_mpz_t(), v.get_mpz_t(), bls_p().get_mpz_t()) == 0)
            throw std::domain_error("Fp::inv of zero");
        return o;
    }
    Fp pow(const mpz_class& e) const {
        Fp o;
        mpz_powm(o.v.get_mpz_t(), v.get_mpz_t(), e.get_mpz_t(), bls_p().get_mpz_t());
        return o;
    }
    // p == 3 (mod 4): candidate root a^((p+1)/4), caller-checked.
    std::optional<Fp> sqrt() const {
        static const mpz_class e = (bls_p() + 1) / 4;
        Fp s = pow(e);
        if (s * s == *this) return s;
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// Fp2 = Fp[u]/(u^2 + 1)
// ---------------------------------------------------------------------------

struct Fp2 {
    Fp c0, c1;

    Fp2() = default;
    Fp2(Fp a, Fp b) : c0(std::move(a)), c1(std::move(b)) {}

    static Fp2 zero() { return {}; }
    static Fp2 one() { return {Fp::one(), Fp::zero()}; }
    // xi = u + 1, the sextic non-residue used by the tower.
    static Fp2 xi() { return {Fp::one(), Fp::one()}; }
    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }

    friend Fp2 operator+(const Fp2& a, const Fp2& b) { return {a.c0 + b.c0, a.c1 + b.c1}; }
    friend Fp2 operator-(const Fp2& a, const Fp2& b) { return {a.c0 - b.c0, a.c1 - b.c1}; }
    Fp2 operator-() const { return {-c0, -c1}; }
    bool operator==(const Fp2& o) const = default;

    friend Fp2 operator*(const Fp2& a, const Fp2& b) {
        // Karatsuba, u^2 = -1
        Fp t0 = a.c0 * b.c0;
        Fp t1 = a.c1 * b.c1;
        Fp t2 = (a.c0 + a.c1) * (b.c0 + b.c1);
        return {t0 - t1, t2 - t0 - t1};
    }
    Fp2 sq() const {
        // (c0+c1 u)^2 = (c0+c1)(c0-c1) + 2 c0 c1 u
        Fp t0 = (c0 + c1) * (c0 - c1);
        Fp t1 = c0 * c1;
        return {t0, t1 + t1};
    }
    Fp2 scale(const Fp& k) const { return {c0 * k, c1 * k}; }
    Fp2 conj() const { return {c0, -c1}; }
    Fp2 inv() const {
        Fp n = c0 * c0 + c1 * c1;
        Fp ni = n.inv();
        return {c0 * ni, -(c1 * ni)};
    }
    Fp2 pow(const mpz_class& e) const {
        Fp2 acc = one();
        Fp2 base = *this;
        for (long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) - 1; i >= 0; i--) {
            acc = acc.sq();
            if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = acc * base;
        }
        return acc;
    }
    // Square root via the norm trick (valid since u^2 = -1 and p = 3 mod 4).
    std::optional<Fp2> sqrt() const {
        if (is_zero()) return Fp2::zero();
        if (c1.is_zero()) {
            if (auto s = c0.sqrt()) return Fp2{*s, Fp::zero()};
            auto s = (-c0).sqrt();
            if (!s) return std::nullopt;
            return Fp2{Fp::zero(), *s};
        }
        Fp n = c0 * c0 + c1 * c1;
        auto lam = n.sqrt();
        if (!lam) return std::nullopt;
        static const Fp half = Fp(2).inv();
        Fp t = (c0 + *lam) * half;
        auto x0 = t.sqrt();
        if (!x0) {
            t = (c0 - *lam) * half;
            x0 = t.sqrt();
            if (!x0) return std::nullopt;
        }
        Fp x1 = c1 * half * x0->inv();
        Fp2 cand{*x0, x1};
        if (cand.sq() == *this) return cand;
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// Fp6 = Fp2[v]/(v^3 - xi)
// ---------------------------------------------------------------------------

struct Fp6 {
    Fp2 c0, c1, c2;

    static Fp6 zero() { return {}; }
    static Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }
    bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
    bool operator==(const Fp6& o) const = default;

    friend Fp6 operator+(const Fp6& a, const Fp6& b) { return {a.c0 + b.c0, a.c1 + b.c1, a.c2 + b.c2}; }
    friend Fp6 operator-(const Fp6& a, const Fp6& b) { return {a.c0 - b.c0, a.c1 - b.c1, a.c2 - b.c2}; }
    Fp6 operator-() const { return {-c0, -c1, -c2}; }

    static Fp2 mul_xi(const Fp2& a) { return a * Fp2::xi(); }

    friend Fp6 operator*(const Fp6& a, const Fp6& b) {
        Fp2 t0 = a.c0 * b.c0;
        Fp2 t1 = a.c1 * b.c1;
        Fp2 t2 = a.c2 * b.c2;
        Fp2 r0 = t0 + mul_xi((a.c1 + a.c2) * (b.c1 + b.c2) - t1 - t2);
        Fp2 r1 = (a.c0 + a.c1) * (b.c0 + b.c1) - t0 - t1 + mul_xi(t2);
        Fp2 r2 = (a.c0 + a.c2) * (b.c0 + b.c2) - t0 - t2 + t1;
        return {r0, r1, r2};
    }
    Fp6 sq() const { return *this * *this; }
    Fp6 scale2(const Fp2& k) const { return {c0 * k, c1 * k, c2 * k}; }
    // multiply by v
    Fp6 mul_v() const { return {mul_xi(c2), c0, c1}; }
    Fp6 inv() const {
        Fp2 a0 = c0.sq() - mul_xi(c1 * c2);
        Fp2 a1 = mul_xi(c2.sq()) - c0 * c1;
        Fp2 a2 = c1.sq() - c0 * c2;
        Fp2 t = c0 * a0 + mul_xi(c2 * a1) + mul_xi(c1 * a2);
        Fp2 ti = t.inv();
        return {a0 * ti, a1 * ti, a2 * ti};
    }
};

// ---------------------------------------------------------------------------
// Fp12 = Fp6[w]/(w^2 - v)
// ---------------------------------------------------------------------------

struct Fp12 {
    Fp6 c0, c1;

    static Fp12 zero() { return {}; }
    static Fp12 one() { return {Fp6::one(), Fp6::zero()}; }
    bool is_one() const { return c0 == Fp6::one() && c1.is_zero(); }
    bool operator==(const Fp12& o) const = default;

    friend Fp12 operator*(const Fp12& a, const Fp12& b) {
        Fp6 t0 = a.c0 * b.c0;
        Fp6 t1 = a.c1 * b.c1;
        Fp6 t2 = (a.c0 + a.c1) * (b.c0 + b.c1);
        return {t0 + t1.mul_v(), t2 - t0 - t1};
    }
    Fp12 sq() const {
        // (a + b w)^2 = a^2 + b^2 v + 2ab w
        Fp6 ab = c0 * c1;
        Fp6 t = (c0 + c1) * (c0 + c1.mul_v());
        return {t - ab - ab.mul_v(), ab + ab};
    }
    // conjugation over Fp6, i.e. f^(p^6)
    Fp12 conj() const { return {c0, -c1}; }
    Fp12 inv() const {
        Fp6 t = (c0.sq() - c1.sq().mul_v()).inv();
        return {c0 * t, -(c1 * t)};
    }
    Fp12 pow(const mpz_class& e) const {
        if (sgn(e) < 0) return inv().pow(-e);
        Fp12 acc = one();
        if (e == 0) return acc;
        Fp12 base = *this;
        for (long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) - 1; i >= 0; i--) {
            acc = acc.sq();
            if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = acc * base;
        }
        return acc;
    }

    // Coefficients over the w-power basis: f = sum c[i] w^i, c[i] in Fp2.
    std::array<Fp2, 6> wcoeffs() const { return {c0.c0, c1.c0, c0.c1, c1.c1, c0.c2, c1.c2}; }
    static Fp12 from_wcoeffs(const std::array<Fp2, 6>& c) {
        Fp12 f;
        f.c0 = {c[0], c[2], c[4]};
        f.c1 = {c[1], c[3], c[5]};
        return f;
    }
};

// Frobenius constants gamma_i = xi^(i (p-1)/6), computed once.
inline const std::array<Fp2, 6>& frob_gamma() {
    static const std::array<Fp2, 6> g = [] {
        std::array<Fp2, 6> out;
        out[0] = Fp2::one();
        const mpz_class e = (bls_p() - 1) / 6;
        out[1] = Fp2::xi().pow(e);
        for (int i = 2; i < 6; i++) out[i] = out[i - 1] * out[1];
        return out;
    }();
    return g;
}

inline Fp12 frobenius(const Fp12& f) {
    auto c = f.wcoeffs();
    const auto& g = frob_gamma();
    std::array<Fp2, 6> o;
    for (int i = 0; i < 6; i++) o[i] = c[i].conj() * g[i];
    return Fp12::from_wcoeffs(o);
}

inline Fp12 frobenius2(const Fp12& f) { return frobenius(frobenius(f)); }

// ---------------------------------------------------------------------------
// Curve points (affine)
// ---------------------------------------------------------------------------

struct G1 {
    Fp x, y;
    bool inf = true;

    static G1 infinity() { return {}; }
    static G1 make(Fp px, Fp py) {
        G1 p;
        p.x = std::move(px);
        p.y = std::move(py);
        p.inf = false;
        return p;
    }
    bool operator==(const G1& o) const {
        if (inf || o.inf) return inf == o.inf;
        return x == o.x && y == o.y;
    }
    bool on_curve() const {
        if (inf) return true;
        return y * y == x * x * x + Fp(4);
    }
    G1 neg() const {
        if (inf) return *this;
        return make(x, -y);
    }
};

struct G2 {
    Fp2 x, y;
    bool inf = true;

    static G2 infinity() { return {}; }
    static G2 make(Fp2 px, Fp2 py) {
        G2 p;
        p.x = std::move(px);
        p.y = std::move(py);
        p.inf = false;
        return p;
    }
    bool operator==(const G2& o) const {
        if (inf || o.inf) return inf == o.inf;
        return x == o.x && y == o.y;
    }
    static Fp2 coeff_b() { return Fp2::xi().scale(Fp(4)); }  // 4(u+1)
    bool on_curve() const {
        if (inf) return true;
        return y.sq() == x.sq() * x + coeff_b();
    }
    G2 neg() const {
        if (inf) return *this;
        return make(x, -y);
    }
};

namespace detail {

template <typename P>
P pt_dbl(const P& a) {
    if (a.inf || a.y.is_zero()) return P::infinity();
    auto xx = a.x * a.x;
    auto lam = (xx + xx + xx) * (a.y + a.y).inv();
    auto x3 = lam * lam - a.x - a.x;
    auto y3 = lam * (a.x - x3) - a.y;
    return P::make(x3, y3);
}

template <typename P>
P pt_add(const P& a, const P& b) {
    if (a.inf) return b;
    if (b.inf) return a;
    if (a.x == b.x) {
        if (a.y == b.y) return pt_dbl(a);
        return P::infinity();
    }
    auto lam = (b.y - a.y) * (b.x - a.x).inv();
    auto x3 = lam * lam - a.x - b.x;
    auto y3 = lam * (a.x - x3) - a.y;
    return P::make(x3, y3);
}

// overloads so the templates work for both coordinate fields
inline Fp2 operator_sq(const Fp2& a) { return a.sq(); }

template <typename P>
P pt_mul(const P& a, const mpz_class& e) {
    if (sgn(e) == 0 || a.inf) return P::infinity();
    if (sgn(e) < 0) return pt_mul(a.neg(), mpz_class(-e));
    P acc = P::infinity();
    for (long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) - 1; i >= 0; i--) {
        acc = pt_dbl(acc);
        if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = pt_add(acc, a);
    }
    return acc;
}

}  // namespace detail

inline G1 g1_add(const G1& a, const G1& b) { return detail::pt_add(a, b); }
inline G1 g1_dbl(const G1& a) { return detail::pt_dbl(a); }
inline G1 g1_mul(const G1& a, const mpz_class& e) { return detail::pt_mul(a, e); }
inline G2 g2_add(const G2& a, const G2& b) { return detail::pt_add(a, b); }
inline G2 g2_mul(const G2& a, const mpz_class& e) { return detail::pt_mul(a, e); }

inline const G1& g1_generator() {
    static const G1 g = G1::make(
        Fp(mpz_class("0x17f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac58"
                     "6c55e83ff97a1aeffb3af00adb22c6bb")),
        Fp(mpz_class("0x08b3f481e3aaa0f1a09e30ed741d8ae4fcf5e095d5d00af600db18cb2c04b3ed"
                     "d03cc744a2888ae40caa232946c5e7e1")));
    return g;
}

inline const G2& g2_generator() {
    static const G2 h = G2::make(
        Fp2{Fp(mpz_class("0x024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02b4510b647ae3d17"
                         "70bac0326a805bbefd48056c8c121bdb8")),
            Fp(mpz_class("0x13e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc7f504"
                         "9334cf11213945d57e5ac7d055d042b7e"))},
        Fp2{Fp(mpz_class("0x0ce5d527727d6e118cc9cdc6da2e351aadfd9baa8cbdd3a76d429a695160d1"
                         "2c923ac9cc3baca289e193548608b82801")),
            Fp(mpz_class("0x0606c4a02ea734cc32acd2b02bc28b99cb3e287e85a763af267492ab572e99"
                         "ab3f370d275cec1da1aaa9075ff05f79be"))});
    return h;
}

// cofactors
inline const mpz_class& g1_cofactor() {
    static const mpz_class h1("0x396c8c005555e1568c00aaab0000aaab");
    return h1;
}
inline const mpz_class& g2_cofactor() {
    static const mpz_class h2(
        "0x5d543a95414e7f1091d50792876a202cd91de4547085abaa68a205b2e5a7ddfa628f1cb4d9e82ef2"
        "1537e293a6691ae1616ec6e786f0c70cf1c38e31c7238e5");
    return h2;
}

inline bool g1_in_subgroup(const G1& a) { return g1_mul(a, bls_r()).inf; }
inline bool g2_in_subgroup(const G2& a) { return g2_mul(a, bls_r()).inf; }

// ---------------------------------------------------------------------------
// Point serialization: flag byte (0 infinity, 2/3 = y parity) + x limbs LE.
// ---------------------------------------------------------------------------

inline void g1_write(ByteWriter& w, const G1& a) {
    if (a.inf) {
        w.u8(0);
        w.mpz_fixed(0, kFpBytes);
        return;
    }
    w.u8(static_cast<uint8_t>(2 + mpz_tstbit(a.y.v.get_mpz_t(), 0)));
    w.mpz_fixed(a.x.v, kFpBytes);
}

inline Bytes g1_bytes(const G1& a) {
    ByteWriter w;
    g1_write(w, a);
    return w.take();
}

inline G1 g1_read(ByteReader& r, bool check_subgroup = true) {
    uint8_t flag = r.u8();
    mpz_class xv = r.mpz_fixed(kFpBytes);
    if (flag == 0) {
        if (xv != 0) throw ParseError("G1: nonzero x on infinity");
        return G1::infinity();
    }
    if (flag != 2 && flag != 3) throw ParseError("G1: bad flag");
    if (xv >= bls_p()) throw ParseError("G1: x out of range");
    Fp x(xv);
    auto y = (x * x * x + Fp(4)).sqrt();
    if (!y) throw ParseError("G1: x not on curve");
    Fp yy = *y;
    if (mpz_tstbit(yy.v.get_mpz_t(), 0) != (flag & 1)) yy = -yy;
    G1 p = G1::make(x, yy);
    if (check_subgroup && !g1_in_subgroup(p)) throw ParseError("G1: not in subgroup");
    return p;
}

inline void g2_write(ByteWriter& w, const G2& a) {
    if (a.inf) {
        w.u8(0);
        w.mpz_fixed(0, 2 * kFpBytes);
        return;
    }
    const Fp& sel = a.y.c0.is_zero() ? a.y.c1 : a.y.c0;
    w.u8(static_cast<uint8_t>(2 + mpz_tstbit(sel.v.get_mpz_t(), 0)));
    w.mpz_fixed(a.x.c0.v, kFpBytes);
    w.mpz_fixed(a.x.c1.v, kFpBytes);
}

inline Bytes g2_bytes(const G2& a) {
    ByteWriter w;
    g2_write(w, a);
    return w.take();
}

inline G2 g2_read(ByteReader& r, bool check_subgroup = true) {
    uint8_t flag = r.u8();
    mpz_class x0 = r.mpz_fixed(kFpBytes);
    if (flag == 0) {
        if (x0 != 0 || r.remaining() < kFpBytes) throw ParseError("G2: bad infinity");
        if (r.mpz_fixed(kFpBytes) != 0) throw ParseError("G2: bad infinity");
        return G2::infinity();
    }
    mpz_class x1 = r.mpz_fixed(kFpBytes);
    if (flag != 2 && flag != 3) throw ParseError("G2: bad flag");
    if (x0 >= bls_p() || x1 >= bls_p()) throw ParseError("G2: x out of range");
    Fp2 x{Fp(x0), Fp(x1)};
    auto y = (x.sq() * x + G2::coeff_b()).sqrt();
    if (!y) throw ParseError("G2: x not on curve");
    Fp2 yy = *y;
    const Fp& sel = yy.c0.is_zero() ? yy.c1 : yy.c0;
    if (mpz_tstbit(sel.v.get_mpz_t(), 0) != (flag & 1)) yy = -yy;
    G2 p = G2::make(x, yy);
    if (check_subgroup && !g2_in_subgroup(p)) throw ParseError("G2: not in subgroup");
    return p;
}

// ---------------------------------------------------------------------------
// Pairing
// ---------------------------------------------------------------------------

// Target-group element; unitary after final exponentiation, so inverse is
// conjugation.
struct Gt {
    Fp12 v;

    static Gt one() { return {Fp12::one()}; }
    bool is_one() const { return v.is_one(); }
    bool operator==(const Gt& o) const = default;

    friend Gt operator*(const Gt& a, const Gt& b) { return {a.v * b.v}; }
    Gt inv() const { return {v.conj()}; }
    Gt pow(const mpz_class& e) const {
        if (sgn(e) < 0) return inv().pow(-e);
        Gt acc = one();
        Gt base = *this;
        for (long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) - 1; i >= 0; i--) {
            acc = {acc.v.sq()};
            if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = acc * base;
        }
        return acc;
    }
    Gt pow_i64(int64_t e) const { return pow(mpz_class(static_cast<long>(e))); }
};

inline void gt_write(ByteWriter& w, const Gt& a) {
    for (const Fp2& c : a.v.wcoeffs()) {
        w.mpz_fixed(c.c0.v, kFpBytes);
        w.mpz_fixed(c.c1.v, kFpBytes);
    }
}

inline Bytes gt_bytes(const Gt& a) {
    ByteWriter w;
    gt_write(w, a);
    return w.take();
}

inline Gt gt_read(ByteReader& r) {
    std::array<Fp2, 6> c;
    for (int i = 0; i < 6; i++) {
        mpz_class a0 = r.mpz_fixed(kFpBytes);
        mpz_class a1 = r.mpz_fixed(kFpBytes);
        if (a0 >= bls_p() || a1 >= bls_p()) throw ParseError("Gt: coeff out of range");
        c[i] = Fp2{Fp(a0), Fp(a1)};
    }
    return {Fp12::from_wcoeffs(c)};
}

namespace detail {

// Line through T (and Q for additions) on the twist, evaluated at P and scaled
// by w^3; nonzero w-coefficients are {0, 2, 3}.
inline Fp12 line_value(const Fp2& lambda, const Fp2& xt, const Fp2& yt, const Fp& xp, const Fp& yp) {
    std::array<Fp2, 6> c{};
    c[0] = lambda * xt - yt;
    c[2] = -lambda.scale(xp);
    c[3] = Fp2{yp, Fp::zero()};
    return Fp12::from_wcoeffs(c);
}

// Exponentiation by |z| in the cyclotomic subgroup; z < 0 handled by callers
// through conjugation.
inline Fp12 cyc_pow(const Fp12& f, const mpz_class& e) {
    Fp12 acc = Fp12::one();
    for (long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) - 1; i >= 0; i--) {
        acc = acc.sq();
        if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = acc * f;
    }
    return acc;
}

inline Fp12 pow_z(const Fp12& f) {  // f^z with z negative
    return cyc_pow(f, bls_z_abs()).conj();
}

}  // namespace detail

// Final exponentiation. Uses the identity
//   (z-1)^2 (z+p) (z^2+p^2-1) + 3 == 3 (p^4-p^2+1)/r,
// i.e. the map computes the standard ate pairing cubed, which is still a
// non-degenerate bilinear pairing onto the order-r subgroup of Fp12*.
inline Fp12 final_exponentiation(const Fp12& f) {
    // easy part: f^((p^6-1)(p^2+1))
    Fp12 t = f.conj() * f.inv();
    t = frobenius2(t) * t;
    // hard part (times 3)
    static const mpz_class z_plus_1 = bls_z_abs() + 1;  // |z - 1| for negative z
    Fp12 a = detail::cyc_pow(t, z_plus_1).conj();       // t^(z-1)
    a = detail::cyc_pow(a, z_plus_1).conj();            // t^((z-1)^2)
    Fp12 b = detail::pow_z(a) * frobenius(a);           // a^(z+p)
    Fp12 c = detail::pow_z(detail::pow_z(b));           // b^(z^2)
    Fp12 d = c * frobenius2(b) * b.conj();              // b^(z^2+p^2-1)
    return d * t.sq() * t;                              // * t^3
}

// Optimal ate Miller loop with T kept in twisted coordinates.
inline Gt pairing(const G1& P, const G2& Q) {
    if (P.inf || Q.inf) return Gt::one();
    const mpz_class& zn = bls_z_abs();
    Fp2 xt = Q.x, yt = Q.y;
    Fp12 f = Fp12::one();
    for (long i = static_cast<long>(mpz_sizeinbase(zn.get_mpz_t(), 2)) - 2; i >= 0; i--) {
        // double step
        Fp2 xx = xt.sq();
        Fp2 lam = (xx + xx + xx) * (yt + yt).inv();
        f = f.sq() * detail::line_value(lam, xt, yt, P.x, P.y);
        Fp2 x3 = lam.sq() - xt - xt;
        yt = lam * (xt - x3) - yt;
        xt = x3;
        if (mpz_tstbit(zn.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
            Fp2 lam2 = (yt - Q.y) * (xt - Q.x).inv();
            f = f * detail::line_value(lam2, xt, yt, P.x, P.y);
            Fp2 x3a = lam2.sq() - xt - Q.x;
            yt = lam2 * (xt - x3a) - yt;
            xt = x3a;
        }
    }
    // z < 0: conjugate
    return {final_exponentiation(f.conj())};
}

// ---------------------------------------------------------------------------
// Scalar field Zp of the protocol (order r of G1/G2/GT)
// ---------------------------------------------------------------------------

struct Fr {
    mpz_class v;  // canonical in [0, r)

    Fr() : v(0) {}
    explicit Fr(long x) : v(x) { reduce(); }
    explicit Fr(mpz_class x) : v(std::move(x)) { reduce(); }
    void reduce() { mpz_mod(v.get_mpz_t(), v.get_mpz_t(), bls_r().get_mpz_t()); }

    static Fr zero() { return Fr(); }
    static Fr one() { return Fr(1); }
    static Fr random(Rng& rng) { return Fr(rng.mpz_below(bls_r())); }
    static Fr from_i64(int64_t x) { return Fr(mpz_class(static_cast<long>(x))); }

    bool is_zero() const { return v == 0; }
    bool operator==(const Fr& o) const = default;

    friend Fr operator+(const Fr& a, const Fr& b) {
        Fr o;
        o.v = a.v + b.v;
        if (o.v >= bls_r()) o.v -= bls_r();
        return o;
    }
    friend Fr operator-(const Fr& a, const Fr& b) {
        Fr o;
        o.v = a.v - b.v;
        if (sgn(o.v) < 0) o.v += bls_r();
        return o;
    }
    friend Fr operator*(const Fr& a, const Fr& b) {
        Fr o;
        o.v = a.v * b.v;
        mpz_mod(o.v.get_mpz_t(), o.v.get_mpz_t(), bls_r().get_mpz_t());
        return o;
    }
    Fr operator-() const {
        Fr o;
        if (v != 0) o.v = bls_r() - v;
        return o;
    }
    Fr inv() const {
        Fr o;
        if (mpz_invert(o.v.get_mpz_t(), v.get_mpz_t(), bls_r().get_mpz_t()) == 0)
            throw std::domain_error("Fr::inv of zero");
        return o;
    }
};

inline void fr_write(ByteWriter& w, const Fr& a) { w.mpz_fixed(a.v, kFrBytes); }
inline Bytes fr_bytes(const Fr& a) {
    ByteWriter w;
    fr_write(w, a);
    return w.take();
}
inline Fr fr_read(ByteReader& r) {
    mpz_class v = r.mpz_fixed(kFrBytes);
    if (v >= bls_r()) throw ParseError("Fr: out of range");
    Fr o;
    o.v = std::move(v);
    return o;
}

inline G1 g1_mul(const G1& a, const Fr& e) { return g1_mul(a, e.v); }
inline G2 g2_mul(const G2& a, const Fr& e) { return g2_mul(a, e.v); }

}  // namespace vfefl
