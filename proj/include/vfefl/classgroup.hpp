#pragma once

// Class group of an imaginary quadratic order with an easy-DL subgroup F of
// order p, following the CL-style construction: fundamental discriminant
// dK = -p*q for a companion prime q, working discriminant dP = p^2 * dK.
// F is generated by f = (p^2, p, (1-dK)/4) and discrete logs in F are
// recovered from the reduced representation without search.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "vfefl/bytes.hpp"
#include "vfefl/rng.hpp"

namespace vfefl::cl {

struct SetupError : std::runtime_error {
    explicit SetupError(const std::string& what) : std::runtime_error(what) {}
};
struct NotInF : std::runtime_error {
    explicit NotInF(const std::string& what) : std::runtime_error(what) {}
};
struct NotInGroup : std::runtime_error {
    explicit NotInGroup(const std::string& what) : std::runtime_error(what) {}
};

// Reduced positive-definite binary quadratic form (a, b, c), b^2 - 4ac = D < 0.
struct QuadForm {
    mpz_class a = 1, b = 1, c = 0;

    mpz_class disc() const { return b * b - 4 * a * c; }

    static QuadForm identity(const mpz_class& D) {
        QuadForm q;
        q.a = 1;
        q.b = 1;
        q.c = (1 - D) / 4;
        return q;
    }
    bool is_identity() const { return a == 1; }

    bool is_reduced() const {
        if (sgn(a) <= 0) return false;
        if (mpz_cmpabs(b.get_mpz_t(), a.get_mpz_t()) > 0) return false;  // |b| <= a
        if (a > c) return false;              // a <= c
        if (b == -a || (a == c && sgn(b) < 0)) return false;
        return true;
    }
    bool is_primitive() const {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        return g == 1;
    }
    // membership test used for deserialized group elements
    bool is_valid(const mpz_class& D) const { return disc() == D && is_reduced() && is_primitive(); }

    bool operator==(const QuadForm& o) const { return a == o.a && b == o.b && c == o.c; }

    QuadForm inverse() const {
        QuadForm q{a, -b, c};
        q.normalize();
        q.reduce();
        return q;
    }

    void normalize() {
        // bring b into (-a, a]; with b = 2aq + r the c update is
        // c -= q*(r + b)/2 since r^2 - b^2 = (r - b)(r + b) = -2aq(r + b)
        static thread_local mpz_class q, r, twoa, t;
        twoa = a << 1;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), b.get_mpz_t(), twoa.get_mpz_t());
        if (r > a) {
            r -= twoa;
            q += 1;
        }
        if (sgn(q) != 0) {
            t = r + b;
            t >>= 1;
            c -= q * t;
            b = r;
        }
    }

    void reduce() {
        normalize();
        while (a > c || (a == c && sgn(b) < 0)) {
            // rho step: (a,b,c) -> (c,-b,a), then normalize
            std::swap(a, c);
            b = -b;
            normalize();
        }
    }
};

inline void qf_write(ByteWriter& w, const QuadForm& q) {
    w.mpz_signed(q.a);
    w.mpz_signed(q.b);
    w.mpz_signed(q.c);
}
inline QuadForm qf_read(ByteReader& r) {
    QuadForm q;
    q.a = r.mpz_signed();
    q.b = r.mpz_signed();
    q.c = r.mpz_signed();
    return q;
}
inline Bytes qf_bytes(const QuadForm& q) {
    ByteWriter w;
    qf_write(w, q);
    return w.take();
}

namespace detail {

// Composition through ideal multiplication. Forms correspond to the ideals
// Z*a + Z*(b+sqrt(D))/2; the product module is spanned by four generators,
// which a two-column HNF reduction brings back to standard form. Elements are
// tracked as (x, y) meaning (x + y*sqrt(D))/2. This version derives the
// pure-x sublattice by a full gcd chain and serves as the test oracle for the
// production path below.
inline QuadForm compose_reference(const QuadForm& f1, const QuadForm& f2) {
    const mpz_class D = f1.disc();
    struct Gen {
        mpz_class x, y;
    };
    std::array<Gen, 4> gens = {
        Gen{2 * f1.a * f2.a, 0},
        Gen{f1.a * f2.b, f1.a},
        Gen{f2.a * f1.b, f2.a},
        Gen{(f1.b * f2.b + D) / 2, (f1.b + f2.b) / 2},
    };

    // Reduce y-components to their gcd e, collecting pure-x rows on the way.
    mpz_class wx = gens[0].x, e = gens[0].y;
    std::vector<mpz_class> xs;
    for (size_t i = 1; i < gens.size(); i++) {
        const mpz_class& y2 = gens[i].y;
        if (y2 == 0) {
            xs.push_back(gens[i].x);
            continue;
        }
        if (e == 0) {
            xs.push_back(wx);
            wx = gens[i].x;
            e = y2;
            continue;
        }
        mpz_class d, s, t;
        mpz_gcdext(d.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), e.get_mpz_t(), y2.get_mpz_t());
        // pure-x row: (e/d)*gen_i - (y2/d)*current
        xs.push_back((e / d) * gens[i].x - (y2 / d) * wx);
        wx = s * wx + t * gens[i].x;
        e = d;
    }
    if (e == 0) throw std::logic_error("compose: degenerate module");
    if (sgn(e) < 0) {
        e = -e;
        wx = -wx;
    }

    mpz_class X0 = 0;
    for (const auto& x : xs) mpz_gcd(X0.get_mpz_t(), X0.get_mpz_t(), x.get_mpz_t());
    if (X0 == 0) throw std::logic_error("compose: rank deficiency");

    // M = e * (Z*A + Z*(B + sqrt(D))/2)
    mpz_class A = X0 / (2 * e);
    mpz_class B = wx / e;
    if (2 * e * A != X0 || B * e != wx) throw std::logic_error("compose: content mismatch");
    mpz_class twoA = 2 * A;
    mpz_fdiv_r(B.get_mpz_t(), B.get_mpz_t(), twoA.get_mpz_t());

    QuadForm out;
    out.a = A;
    out.b = B;
    out.c = (B * B - D) / (4 * A);
    if (out.a * out.c * 4 != B * B - D) throw std::logic_error("compose: non-integral c");
    out.reduce();
    return out;
}

// Production composition. Same module arithmetic, but the pure-x sublattice
// index comes from norm multiplicativity (N(I1 I2) = a1 a2, content e), so
// only the two small xgcds remain:
//   e = gcd(a1, a2, s) = alpha*a1 + beta*a2 + gamma*s,  s = (b1+b2)/2,
//   A = a1 a2 / e^2,
//   e*B = alpha*(a1 b2) + beta*(a2 b1) + gamma*(b1 b2 + D)/2  (mod 2eA).
inline QuadForm compose(const QuadForm& f1, const QuadForm& f2) {
    const mpz_class D = f1.disc();
    mpz_class s = (f1.b + f2.b) >> 1;

    mpz_class d1, u, v;
    mpz_gcdext(d1.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), f1.a.get_mpz_t(), f2.a.get_mpz_t());
    mpz_class e, c1, c2;
    mpz_gcdext(e.get_mpz_t(), c1.get_mpz_t(), c2.get_mpz_t(), d1.get_mpz_t(), s.get_mpz_t());
    // e = (c1*u)*a1 + (c1*v)*a2 + c2*s

    mpz_class A = f1.a / e * (f2.a / e);
    mpz_class wx = (c1 * u) * (f1.a * f2.b) + (c1 * v) * (f2.a * f1.b) + c2 * ((f1.b * f2.b + D) >> 1);
    mpz_class B;
    if (!mpz_divisible_p(wx.get_mpz_t(), e.get_mpz_t())) throw std::logic_error("compose: content mismatch");
    mpz_divexact(B.get_mpz_t(), wx.get_mpz_t(), e.get_mpz_t());
    mpz_class twoA = A << 1;
    mpz_fdiv_r(B.get_mpz_t(), B.get_mpz_t(), twoA.get_mpz_t());

    QuadForm out;
    out.a = A;
    out.b = B;
    out.c = (B * B - D) / (4 * A);
    if (out.a * out.c * 4 != B * B - D) throw std::logic_error("compose: non-integral c");
    out.reduce();
    return out;
}

inline QuadForm power(const QuadForm& base, const mpz_class& e) {
    if (sgn(e) < 0) return power(base.inverse(), -e);
    QuadForm acc = QuadForm::identity(base.disc());
    if (e == 0) return acc;
    const long bits = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2));
    if (bits <= 32) {
        for (long i = bits - 1; i >= 0; i--) {
            acc = compose(acc, acc);
            if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = compose(acc, base);
        }
        return acc;
    }
    // fixed 4-bit window
    std::array<QuadForm, 16> tab;
    tab[0] = acc;
    tab[1] = base;
    for (int i = 2; i < 16; i++) tab[i] = compose(tab[i - 1], base);
    long top = ((bits + 3) / 4) * 4 - 4;
    for (long i = top; i >= 0; i -= 4) {
        if (i != top)
            for (int s = 0; s < 4; s++) acc = compose(acc, acc);
        unsigned nib = 0;
        for (int bpos = 3; bpos >= 0; bpos--)
            nib = (nib << 1) | mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(i + bpos));
        if (nib) acc = (i == top) ? tab[nib] : compose(acc, tab[nib]);
    }
    return acc;
}

// Tonelli-Shanks mod an odd prime.
inline mpz_class sqrt_mod(const mpz_class& n_in, const mpz_class& q) {
    mpz_class n = n_in % q;
    if (n < 0) n += q;
    if (n == 0) return 0;
    if (mpz_legendre(n.get_mpz_t(), q.get_mpz_t()) != 1) throw std::domain_error("sqrt_mod: non-residue");
    if (q % 4 == 3) {
        mpz_class e = (q + 1) / 4, out;
        mpz_powm(out.get_mpz_t(), n.get_mpz_t(), e.get_mpz_t(), q.get_mpz_t());
        return out;
    }
    // general case
    mpz_class Q = q - 1;
    unsigned long S = 0;
    while (mpz_even_p(Q.get_mpz_t())) {
        Q /= 2;
        S++;
    }
    mpz_class zz = 2;
    while (mpz_legendre(zz.get_mpz_t(), q.get_mpz_t()) != -1) zz++;
    mpz_class M = S, cc, tt, R, tmp;
    mpz_powm(cc.get_mpz_t(), zz.get_mpz_t(), Q.get_mpz_t(), q.get_mpz_t());
    mpz_powm(tt.get_mpz_t(), n.get_mpz_t(), Q.get_mpz_t(), q.get_mpz_t());
    tmp = (Q + 1) / 2;
    mpz_powm(R.get_mpz_t(), n.get_mpz_t(), tmp.get_mpz_t(), q.get_mpz_t());
    while (tt != 1) {
        mpz_class t2 = tt;
        unsigned long i = 0;
        while (t2 != 1) {
            t2 = t2 * t2 % q;
            i++;
            if (i == mpz_get_ui(M.get_mpz_t())) throw std::domain_error("sqrt_mod: failed");
        }
        mpz_class b = cc;
        for (unsigned long j = 0; j + i + 1 < mpz_get_ui(M.get_mpz_t()); j++) b = b * b % q;
        M = i;
        cc = b * b % q;
        tt = tt * cc % q;
        R = R * b % q;
    }
    return R;
}

}  // namespace detail

inline QuadForm form_compose(const QuadForm& x, const QuadForm& y) { return detail::compose(x, y); }
inline QuadForm form_compose_reference(const QuadForm& x, const QuadForm& y) {
    return detail::compose_reference(x, y);
}
inline QuadForm form_exp(const QuadForm& base, const mpz_class& e) { return detail::power(base, e); }

// Interleaved product of powers (shared squarings); exponents may be negative.
inline QuadForm form_multi_exp(std::initializer_list<std::pair<const QuadForm*, const mpz_class*>> terms) {
    struct Term {
        QuadForm base;
        mpz_class e;
    };
    std::vector<Term> ts;
    mpz_class zero = 0;
    const QuadForm* any = nullptr;
    for (auto& [b, e] : terms) {
        any = b;
        if (*e == 0) continue;
        if (sgn(*e) < 0)
            ts.push_back({b->inverse(), -*e});
        else
            ts.push_back({*b, *e});
    }
    if (!any) throw std::invalid_argument("form_multi_exp: empty");
    QuadForm acc = QuadForm::identity(any->disc());
    size_t top = 0;
    for (const auto& t : ts) top = std::max(top, mpz_sizeinbase(t.e.get_mpz_t(), 2));
    for (long i = static_cast<long>(top) - 1; i >= 0; i--) {
        acc = detail::compose(acc, acc);
        for (const auto& t : ts)
            if (mpz_tstbit(t.e.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = detail::compose(acc, t.base);
    }
    return acc;
}

enum class Profile : uint8_t { Test = 0, Benchmark = 1 };

struct ClassGroupParams {
    Profile profile = Profile::Test;
    uint32_t lambda_dist = 112;  // distribution parameter for D_p
    mpz_class p;                 // order of F; equals the pairing scalar field
    mpz_class companion;         // companion prime q
    mpz_class disc_k;            // -p*q
    mpz_class disc_p;            // p^2 * disc_k
    mpz_class s_tilde;           // class number upper bound for disc_k
    mpz_class dp_bound;          // S = 2^(lambda-2) * s_tilde (inclusive)
    QuadForm f;                  // generator of F
    QuadForm h_hat_p;            // generator of the p-th power subgroup
    QuadForm h_p;                // h_hat_p^t for t <- D_p

    QuadForm identity() const { return QuadForm::identity(disc_p); }
    bool in_group(const QuadForm& q) const { return q.is_valid(disc_p); }
};

inline void cl_params_write(ByteWriter& w, const ClassGroupParams& P) {
    w.u8(1);  // version
    w.u8(static_cast<uint8_t>(P.profile));
    w.u32(P.lambda_dist);
    w.mpz_signed(P.p);
    w.mpz_signed(P.companion);
    w.mpz_signed(P.s_tilde);
    w.mpz_signed(P.dp_bound);
    qf_write(w, P.f);
    qf_write(w, P.h_hat_p);
    qf_write(w, P.h_p);
}

inline ClassGroupParams cl_params_read(ByteReader& r) {
    if (r.u8() != 1) throw ParseError("class group params: bad version");
    ClassGroupParams P;
    P.profile = static_cast<Profile>(r.u8());
    P.lambda_dist = r.u32();
    P.p = r.mpz_signed();
    P.companion = r.mpz_signed();
    P.s_tilde = r.mpz_signed();
    P.dp_bound = r.mpz_signed();
    P.disc_k = -P.p * P.companion;
    P.disc_p = P.p * P.p * P.disc_k;
    P.f = qf_read(r);
    P.h_hat_p = qf_read(r);
    P.h_p = qf_read(r);
    if (!P.in_group(P.f) || !P.in_group(P.h_hat_p) || !P.in_group(P.h_p))
        throw ParseError("class group params: invalid generators");
    return P;
}

// uniform over {0, ..., S}
inline mpz_class sample_dp(const ClassGroupParams& P, Rng& rng) { return rng.mpz_upto(P.dp_bound); }
// uniform over {0, ..., p*S}
inline mpz_class sample_d(const ClassGroupParams& P, Rng& rng) { return rng.mpz_upto(P.p * P.dp_bound); }

// Deterministic given the rng state. The companion-prime search retries up to
// max_retries candidates; generation time varies with the prime search.
inline ClassGroupParams cl_gen(Profile profile, const mpz_class& p, Rng& rng, unsigned max_retries = 4000) {
    ClassGroupParams P;
    P.profile = profile;
    P.lambda_dist = profile == Profile::Test ? 112 : 128;
    P.p = p;

    const size_t qbits = profile == Profile::Test ? 280 : 1572;
    if (p % 4 != 1) throw SetupError("cl_gen: expected p = 1 mod 4");

    mpz_class q;
    bool found = false;
    for (unsigned tries = 0; tries < max_retries; tries++) {
        mpz_class cand = rng.mpz_below(mpz_class(1) << (qbits - 1));
        cand += mpz_class(1) << (qbits - 1);
        mpz_nextprime(q.get_mpz_t(), cand.get_mpz_t());
        if (q % 4 != 3) continue;  // need p*q = 3 mod 4
        mpz_class pr = p % q;
        if (mpz_legendre(pr.get_mpz_t(), q.get_mpz_t()) != -1) continue;
        if (q <= 4 * p) continue;  // keeps f reduced and Solve parseable
        found = true;
        break;
    }
    if (!found) throw SetupError("cl_gen: no companion prime found within retry budget");

    P.companion = q;
    P.disc_k = -p * q;
    P.disc_p = p * p * P.disc_k;

    // class number bound h(dK) <= sqrt(|dK|) * ln|dK| / pi < sqrt(|dK|) * bits(dK)
    mpz_class abs_dk = -P.disc_k;
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), abs_dk.get_mpz_t());
    P.s_tilde = (root + 1) * static_cast<unsigned long>(mpz_sizeinbase(abs_dk.get_mpz_t(), 2));
    P.dp_bound = (mpz_class(1) << (P.lambda_dist - 2)) * P.s_tilde;

    P.f.a = p * p;
    P.f.b = p;
    P.f.c = (1 - P.disc_k) / 4;
    if (!P.f.is_reduced()) throw SetupError("cl_gen: f not reduced");

    // generator of the p-th power subgroup: lift a small split prime form and
    // raise to 2p
    mpz_class r0 = 2;
    while (true) {
        mpz_nextprime(r0.get_mpz_t(), r0.get_mpz_t());
        if (mpz_divisible_p(p.get_mpz_t(), r0.get_mpz_t()) || mpz_divisible_p(q.get_mpz_t(), r0.get_mpz_t()))
            continue;
        if (mpz_kronecker(P.disc_k.get_mpz_t(), r0.get_mpz_t()) != 1) continue;
        mpz_class b = detail::sqrt_mod(P.disc_k, r0);
        if (mpz_even_p(b.get_mpz_t())) b += r0;  // need b odd: b^2 = dK mod 4 too
        // lift from disc_k to disc_p: b -> b*p (mod 2*r0)
        mpz_class bl = b * p;
        mpz_class tworo = 2 * r0;
        mpz_fdiv_r(bl.get_mpz_t(), bl.get_mpz_t(), tworo.get_mpz_t());
        if (mpz_even_p(bl.get_mpz_t())) throw SetupError("cl_gen: lift parity violated");
        QuadForm lifted;
        lifted.a = r0;
        lifted.b = bl;
        lifted.c = (bl * bl - P.disc_p) / (4 * r0);
        if (lifted.b * lifted.b - 4 * lifted.a * lifted.c != P.disc_p) continue;
        lifted.reduce();
        QuadForm cand = form_exp(lifted, 2 * p);
        if (cand.is_identity()) continue;
        P.h_hat_p = cand;
        break;
    }

    mpz_class t_hat = sample_dp(P, rng);
    P.h_p = form_exp(P.h_hat_p, t_hat);
    if (P.h_p.is_identity()) P.h_p = P.h_hat_p;  // t_hat = 0 corner
    return P;
}

// Discrete log in F: parse the reduced representation and verify.
inline mpz_class cl_solve(const ClassGroupParams& P, const QuadForm& g) {
    if (!P.in_group(g)) throw NotInF("cl_solve: not a group element");
    if (g.is_identity()) return 0;
    if (g.a != P.p * P.p) throw NotInF("cl_solve: not in F");
    if (!mpz_divisible_p(g.b.get_mpz_t(), P.p.get_mpz_t())) throw NotInF("cl_solve: not in F");
    mpz_class L = g.b / P.p;
    mpz_class Lm = L % P.p;
    if (Lm < 0) Lm += P.p;
    mpz_class m;
    if (mpz_invert(m.get_mpz_t(), Lm.get_mpz_t(), P.p.get_mpz_t()) == 0) throw NotInF("cl_solve: singular");
    if (form_exp(P.f, m) == g) return m;
    mpz_class m2 = P.p - m;
    if (form_exp(P.f, m2) == g) return m2;
    throw NotInF("cl_solve: verification failed");
}

}  // namespace vfefl::cl
