#pragma once

// The two sigma protocols of the DVFE scheme and their Fiat-Shamir transforms.
//
// PiEncrypt proves knowledge of (s, x) with
//     V = (u^m)^s * w^x,   score relation on y,   com = v^s,
// where the score relation comes in two flavours: exact (y equals the field
// ratio <x,x0>/<x,x>) and rounded (quantized y_hat plus a public residual rho,
// with a range check 0 <= rho < p_bound).
//
// PiDKeyGenShare proves a functional key share is consistent with the
// broadcast key material (T_i, d_i, com_i) and the public weight y_i; the
// z_t response is computed over the integers.

#include <array>
#include <optional>
#include <vector>

#include "vfefl/algebra.hpp"
#include "vfefl/bls381.hpp"
#include "vfefl/bytes.hpp"
#include "vfefl/classgroup.hpp"
#include "vfefl/oracles.hpp"
#include "vfefl/rng.hpp"

namespace vfefl::zkp {

struct WitnessMismatch : std::runtime_error {
    explicit WitnessMismatch(const std::string& what) : std::runtime_error(what) {}
};

// Append-only, domain-tagged byte log; the challenge is derived from the
// logged bytes only.
class Transcript {
  public:
    explicit Transcript(std::string_view protocol_tag) {
        w_.bytes(protocol_tag);
    }
    void append(std::string_view tag, std::string_view data) {
        w_.bytes(tag);
        w_.bytes(data);
    }
    // challenge in Zp; with nonzero=true rehashes with a counter until != 0
    Fr challenge(bool nonzero) const {
        ByteWriter probe;
        probe.raw(w_.data());
        Fr c = hash_to_scalar(probe.data());
        uint32_t ctr = 0;
        while (nonzero && c.is_zero()) {
            ByteWriter again;
            again.raw(w_.data());
            again.u32(++ctr);
            c = hash_to_scalar(again.data());
        }
        return c;
    }
    const Bytes& bytes() const { return w_.data(); }

  private:
    ByteWriter w_;
};

// ---------------------------------------------------------------------------
// PiEncrypt
// ---------------------------------------------------------------------------

enum class ScoreMode : uint8_t { Exact = 0, Rounded = 1 };

struct EncStatement {
    Bytes ell;                   // round label (base u)
    std::vector<Bytes> ell_enc;  // dimension labels (bases w_j)
    Bytes ell_d;                 // session label (base v)
    G1 V;                        // product of the m ciphertext entries
    G1 com;                      // commitment v^s
    std::vector<int64_t> x0;     // public reference vector

    ScoreMode mode = ScoreMode::Exact;
    Fr y;                 // exact mode: public weight with <x,x0> = y <x,x>
    int64_t y_hat = 0;    // rounded mode: floor(s_y <x,x0> / <x,x>), signed
    mpz_class rho;        // rounded mode: s_y <x,x0> - y_hat <x,x>, in [0, <x,x>)
    mpz_class p_bound;    // rounded mode: public cap on the residual
    uint32_t s_y = 100;   // rounded mode: quantization scale

    size_t m() const { return ell_enc.size(); }
};

struct EncBases {
    std::array<G1, 2> u;   // H1(ell)
    std::array<G1, 2> um;  // u^m
    std::vector<G1> w;     // H1'(ell_enc[j])
    std::array<G1, 2> v;   // H1(ell_d)
};

inline EncBases enc_bases(const Bytes& ell, const std::vector<Bytes>& ell_enc, const Bytes& ell_d) {
    EncBases b;
    b.u = hash_to_g1_pair(ell);
    mpz_class m(static_cast<unsigned long>(ell_enc.size()));
    b.um = {g1_mul(b.u[0], m), g1_mul(b.u[1], m)};
    b.w.reserve(ell_enc.size());
    for (const auto& l : ell_enc) b.w.push_back(hash_to_g1(l));
    b.v = hash_to_g1_pair(ell_d);
    return b;
}

inline EncBases enc_bases(const EncStatement& st) { return enc_bases(st.ell, st.ell_enc, st.ell_d); }

struct EncProof {
    G1 K, T0, T1, T2, T1p, com_star;
    Fr alpha;
    std::array<Fr, 2> tau_alpha;
    std::array<Fr, 2> taup_alpha;
    std::array<Fr, 2> omega;
    std::vector<Fr> L;
    Fr t;
};

inline void enc_statement_write(ByteWriter& w, const EncStatement& st) {
    w.u8(1);  // version
    w.u8(static_cast<uint8_t>(st.mode));
    w.bytes(st.ell);
    w.u32(static_cast<uint32_t>(st.ell_enc.size()));
    for (const auto& l : st.ell_enc) w.bytes(l);
    w.bytes(st.ell_d);
    g1_write(w, st.V);
    g1_write(w, st.com);
    w.u32(static_cast<uint32_t>(st.x0.size()));
    for (int64_t x : st.x0) w.i64(x);
    if (st.mode == ScoreMode::Exact) {
        fr_write(w, st.y);
    } else {
        w.i64(st.y_hat);
        w.mpz_signed(st.rho);
        w.mpz_signed(st.p_bound);
        w.u32(st.s_y);
    }
}

inline void enc_proof_write(ByteWriter& w, const EncProof& pf) {
    w.u8(1);
    g1_write(w, pf.K);
    g1_write(w, pf.T0);
    g1_write(w, pf.T1);
    g1_write(w, pf.T2);
    g1_write(w, pf.T1p);
    g1_write(w, pf.com_star);
    fr_write(w, pf.alpha);
    for (const auto& x : pf.tau_alpha) fr_write(w, x);
    for (const auto& x : pf.taup_alpha) fr_write(w, x);
    for (const auto& x : pf.omega) fr_write(w, x);
    w.u32(static_cast<uint32_t>(pf.L.size()));
    for (const auto& x : pf.L) fr_write(w, x);
    fr_write(w, pf.t);
}

inline EncProof enc_proof_read(ByteReader& r) {
    if (r.u8() != 1) throw ParseError("enc proof: bad version");
    EncProof pf;
    pf.K = g1_read(r);
    pf.T0 = g1_read(r);
    pf.T1 = g1_read(r);
    pf.T2 = g1_read(r);
    pf.T1p = g1_read(r);
    pf.com_star = g1_read(r);
    pf.alpha = fr_read(r);
    for (auto& x : pf.tau_alpha) x = fr_read(r);
    for (auto& x : pf.taup_alpha) x = fr_read(r);
    for (auto& x : pf.omega) x = fr_read(r);
    pf.L.resize(r.u32());
    for (auto& x : pf.L) x = fr_read(r);
    pf.t = fr_read(r);
    return pf;
}

inline Bytes enc_proof_bytes(const EncProof& pf) {
    ByteWriter w;
    enc_proof_write(w, pf);
    return w.take();
}

namespace detail {

inline Bytes enc_commitment_bytes(const EncProof& pf) {
    ByteWriter w;
    g1_write(w, pf.K);
    g1_write(w, pf.T0);
    g1_write(w, pf.T1);
    g1_write(w, pf.T2);
    g1_write(w, pf.T1p);
    g1_write(w, pf.com_star);
    return w.take();
}

inline Fr enc_challenge(const EncStatement& st, const EncProof& pf) {
    ByteWriter sw;
    enc_statement_write(sw, st);
    Transcript tr("PiEncrypt|v1");
    tr.append("stmt", sw.data());
    tr.append("comm", enc_commitment_bytes(pf));
    return tr.challenge(/*nonzero=*/true);
}

// (u^m)^e for e in Zp^2
inline G1 um_pow(const EncBases& b, const std::array<Fr, 2>& e) {
    return g1_add(g1_mul(b.um[0], e[0]), g1_mul(b.um[1], e[1]));
}
inline G1 v_pow(const EncBases& b, const std::array<Fr, 2>& e) {
    return g1_add(g1_mul(b.v[0], e[0]), g1_mul(b.v[1], e[1]));
}

inline mpz_class dot_int(const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
    if (a.size() != b.size()) throw DimensionError("dot_int: length mismatch");
    mpz_class acc = 0;
    for (size_t i = 0; i < a.size(); i++) acc += mpz_class(static_cast<long>(a[i])) * static_cast<long>(b[i]);
    return acc;
}

inline Fr dot_fr_int(const std::vector<Fr>& a, const std::vector<int64_t>& b) {
    if (a.size() != b.size()) throw DimensionError("dot_fr_int: length mismatch");
    Fr acc;
    for (size_t i = 0; i < a.size(); i++) acc = acc + a[i] * Fr::from_i64(b[i]);
    return acc;
}

inline Fr dot_fr(const std::vector<Fr>& a, const std::vector<Fr>& b) {
    if (a.size() != b.size()) throw DimensionError("dot_fr: length mismatch");
    Fr acc;
    for (size_t i = 0; i < a.size(); i++) acc = acc + a[i] * b[i];
    return acc;
}

inline G1 w_pow(const EncBases& b, const std::vector<Fr>& e) {
    return multi_exp(std::span<const G1>(b.w), std::span<const Fr>(e));
}

inline G1 w_pow_int(const EncBases& b, const std::vector<int64_t>& x) {
    G1 acc = G1::infinity();
    for (size_t j = 0; j < x.size(); j++) acc = g1_add(acc, g1_mul(b.w[j], Fr::from_i64(x[j])));
    return acc;
}

}  // namespace detail

struct EncWitness {
    std::array<Fr, 2> s;
    std::vector<int64_t> x;
};

// One prover run with fixed first-move randomness. Splitting the commitment
// and response phases keeps the interactive protocol available for the
// rewinding extractor; the Fiat-Shamir path simply derives the challenge from
// the transcript.
class EncProverSession {
  public:
    EncProverSession(const EncWitness& wit, const EncStatement& st, Rng& rng,
                     const EncBases* cached = nullptr)
        : st_(st), bases_local_(cached ? EncBases{} : enc_bases(st)),
          B_(cached ? *cached : bases_local_), wit_(wit) {
        const size_t m = st.m();
        if (wit.x.size() != m || st.x0.size() != m)
            throw DimensionError("prove_encrypt: dimension mismatch");

        G1 V_check = g1_add(detail::um_pow(B_, wit.s), detail::w_pow_int(B_, wit.x));
        if (!(V_check == st.V)) throw WitnessMismatch("prove_encrypt: V mismatch");
        if (!(detail::v_pow(B_, wit.s) == st.com)) throw WitnessMismatch("prove_encrypt: com mismatch");

        const mpz_class xx = detail::dot_int(wit.x, wit.x);
        const mpz_class xx0 = detail::dot_int(wit.x, st.x0);
        if (st.mode == ScoreMode::Exact) {
            if (!(Fr(xx0) == st.y * Fr(xx)))
                throw WitnessMismatch("prove_encrypt: exact score relation fails");
        } else {
            if (xx <= 0) throw WitnessMismatch("prove_encrypt: degenerate model");
            if (st.rho < 0 || st.rho >= st.p_bound)
                throw WitnessMismatch("prove_encrypt: rho out of range");
            if (st.s_y * xx0 != mpz_class(static_cast<long>(st.y_hat)) * xx + st.rho)
                throw WitnessMismatch("prove_encrypt: rounded score relation fails");
        }

        rho_blind_ = {Fr::random(rng), Fr::random(rng)};
        k_.resize(m);
        for (auto& ki : k_) ki = Fr::random(rng);

        pf_.K = g1_add(detail::um_pow(B_, rho_blind_), detail::w_pow(B_, k_));
        t0_ = Fr(xx);
        t1_ = Fr(2) * detail::dot_fr_int(k_, wit.x);
        t2_ = detail::dot_fr(k_, k_);
        tau0_ = {Fr::random(rng), Fr::random(rng)};
        tau1_ = {Fr::random(rng), Fr::random(rng)};
        tau2_ = {Fr::random(rng), Fr::random(rng)};
        tau1p_ = {Fr::random(rng), Fr::random(rng)};
        const G1& g = g1_generator();
        pf_.T0 = g1_add(g1_mul(g, t0_), detail::um_pow(B_, tau0_));
        pf_.T1 = g1_add(g1_mul(g, t1_), detail::um_pow(B_, tau1_));
        pf_.T2 = g1_add(g1_mul(g, t2_), detail::um_pow(B_, tau2_));
        const Fr t1p = detail::dot_fr_int(k_, st.x0);
        pf_.T1p = g1_add(g1_mul(g, t1p), detail::um_pow(B_, tau1p_));
        pf_.com_star = detail::v_pow(B_, rho_blind_);
    }

    Fr fiat_shamir_challenge() const { return detail::enc_challenge(st_, pf_); }

    EncProof respond(const Fr& alpha) const {
        if (alpha.is_zero()) throw std::invalid_argument("PiEncrypt challenge must be nonzero");
        EncProof pf = pf_;
        pf.alpha = alpha;
        const Fr a2 = alpha * alpha;
        for (int b = 0; b < 2; b++) {
            pf.tau_alpha[b] = tau0_[b] + tau1_[b] * alpha + tau2_[b] * a2;
            if (st_.mode == ScoreMode::Exact) {
                pf.taup_alpha[b] = tau0_[b] * st_.y + tau1p_[b] * alpha;
            } else {
                // scaled so that s_y * taup_alpha = tau0 * y_hat + s_y * tau1p * alpha
                pf.taup_alpha[b] =
                    tau0_[b] * Fr::from_i64(st_.y_hat) * Fr(st_.s_y).inv() + tau1p_[b] * alpha;
            }
            pf.omega[b] = wit_.s[b] + alpha * rho_blind_[b];
        }
        pf.L.resize(st_.m());
        for (size_t j = 0; j < st_.m(); j++) pf.L[j] = Fr::from_i64(wit_.x[j]) + k_[j] * alpha;
        pf.t = t0_ + t1_ * alpha + t2_ * a2;
        return pf;
    }

  private:
    const EncStatement& st_;
    EncBases bases_local_;
    const EncBases& B_;
    EncWitness wit_;
    EncProof pf_;  // commitments only until respond()
    std::array<Fr, 2> rho_blind_, tau0_, tau1_, tau2_, tau1p_;
    std::vector<Fr> k_;
    Fr t0_, t1_, t2_;
};

// Checks the witness against the statement before proving; an inconsistent
// pair raises WitnessMismatch rather than emitting a proof that cannot verify.
inline EncProof prove_encrypt(const EncWitness& wit, const EncStatement& st, Rng& rng,
                              const EncBases* cached = nullptr) {
    EncProverSession session(wit, st, rng, cached);
    return session.respond(session.fiat_shamir_challenge());
}

enum class EncReject : uint8_t {
    None = 0,
    BadChallenge,
    RhoRange,
    InnerProduct,  // t != <L,L>
    EqDegree,      // g^t (u^m)^tau = T0 T1^a T2^(a^2)
    EqScore,       // the y relation
    EqCiphertext,  // w^L (u^m)^omega = V K^a
    EqCommitment,  // v^omega = com com*^a
};

struct EncVerifyResult {
    bool ok = false;
    EncReject reason = EncReject::None;
};

enum class FsMode : uint8_t { Recompute = 0, TrustChallenge = 1 };

inline EncVerifyResult verify_encrypt(const EncStatement& st, const EncProof& pf,
                                      FsMode fs = FsMode::Recompute, const EncBases* cached = nullptr) {
    const EncBases bases_local = cached ? EncBases{} : enc_bases(st);
    const EncBases& B = cached ? *cached : bases_local;
    const size_t m = st.m();
    if (pf.L.size() != m || st.x0.size() != m) return {false, EncReject::BadChallenge};

    if (fs == FsMode::Recompute) {
        if (!(detail::enc_challenge(st, pf) == pf.alpha)) return {false, EncReject::BadChallenge};
    }
    if (pf.alpha.is_zero()) return {false, EncReject::BadChallenge};
    if (st.mode == ScoreMode::Rounded) {
        if (st.rho < 0 || st.rho >= st.p_bound) return {false, EncReject::RhoRange};
    }
    if (!(pf.t == detail::dot_fr(pf.L, pf.L))) return {false, EncReject::InnerProduct};

    const G1& g = g1_generator();
    const Fr& a = pf.alpha;
    const Fr a2 = a * a;

    // g^t (u^m)^tau_alpha == T0 T1^a T2^(a^2)
    G1 lhs = g1_add(g1_mul(g, pf.t), detail::um_pow(B, pf.tau_alpha));
    G1 rhs = g1_add(pf.T0, g1_add(g1_mul(pf.T1, a), g1_mul(pf.T2, a2)));
    if (!(lhs == rhs)) return {false, EncReject::EqDegree};

    const Fr Lx0 = detail::dot_fr_int(pf.L, st.x0);
    if (st.mode == ScoreMode::Exact) {
        // g^<L,x0> (u^m)^taup == T0^y T1p^a
        lhs = g1_add(g1_mul(g, Lx0), detail::um_pow(B, pf.taup_alpha));
        rhs = g1_add(g1_mul(pf.T0, st.y), g1_mul(pf.T1p, a));
    } else {
        // g^(s_y <L,x0>) (u^m)^(s_y taup) == T0^y_hat g^rho (T1p^s_y)^a
        const Fr sy(st.s_y);
        lhs = g1_add(g1_mul(g, sy * Lx0),
                     detail::um_pow(B, {sy * pf.taup_alpha[0], sy * pf.taup_alpha[1]}));
        rhs = g1_add(g1_mul(pf.T0, Fr::from_i64(st.y_hat)),
                     g1_add(g1_mul(g, Fr(st.rho)), g1_mul(pf.T1p, sy * a)));
    }
    if (!(lhs == rhs)) return {false, EncReject::EqScore};

    // w^L (u^m)^omega == V K^a
    lhs = g1_add(detail::w_pow(B, pf.L), detail::um_pow(B, pf.omega));
    rhs = g1_add(st.V, g1_mul(pf.K, a));
    if (!(lhs == rhs)) return {false, EncReject::EqCiphertext};

    // v^omega == com com*^a
    lhs = detail::v_pow(B, pf.omega);
    rhs = g1_add(st.com, g1_mul(pf.com_star, a));
    if (!(lhs == rhs)) return {false, EncReject::EqCommitment};

    return {true, EncReject::None};
}

// Honest-verifier simulator: free components sampled uniformly, the rest
// back-solved from the verification equations for the supplied challenge.
inline EncProof simulate_encrypt(const EncStatement& st, const Fr& alpha, Rng& rng,
                                 const EncBases* cached = nullptr) {
    if (alpha.is_zero()) throw std::invalid_argument("simulate_encrypt: challenge must be nonzero");
    const EncBases bases_local = cached ? EncBases{} : enc_bases(st);
    const EncBases& B = cached ? *cached : bases_local;
    const size_t m = st.m();
    const G1& g = g1_generator();

    EncProof pf;
    pf.alpha = alpha;
    pf.T0 = g1_mul(g, Fr::random(rng));
    pf.T2 = g1_mul(g, Fr::random(rng));
    for (int b = 0; b < 2; b++) {
        pf.tau_alpha[b] = Fr::random(rng);
        pf.taup_alpha[b] = Fr::random(rng);
        pf.omega[b] = Fr::random(rng);
    }
    pf.L.resize(m);
    for (auto& l : pf.L) l = Fr::random(rng);
    pf.t = detail::dot_fr(pf.L, pf.L);

    const Fr ai = alpha.inv();
    const Fr a2 = alpha * alpha;

    // T1 = (g^t (u^m)^tau T0^-1 T2^(-a^2))^(1/a)
    G1 t1base = g1_add(g1_add(g1_mul(g, pf.t), detail::um_pow(B, pf.tau_alpha)),
                       g1_add(pf.T0.neg(), g1_mul(pf.T2, a2).neg()));
    pf.T1 = g1_mul(t1base, ai);

    const Fr Lx0 = detail::dot_fr_int(pf.L, st.x0);
    if (st.mode == ScoreMode::Exact) {
        G1 base = g1_add(g1_add(g1_mul(g, Lx0), detail::um_pow(B, pf.taup_alpha)),
                         g1_mul(pf.T0, st.y).neg());
        pf.T1p = g1_mul(base, ai);
    } else {
        const Fr sy(st.s_y);
        G1 base = g1_add(g1_add(g1_mul(g, sy * Lx0),
                                detail::um_pow(B, {sy * pf.taup_alpha[0], sy * pf.taup_alpha[1]})),
                         g1_add(g1_mul(pf.T0, Fr::from_i64(st.y_hat)).neg(), g1_mul(g, Fr(st.rho)).neg()));
        pf.T1p = g1_mul(base, (sy * alpha).inv());
    }

    // K = (w^L (u^m)^omega V^-1)^(1/a)
    G1 kbase = g1_add(g1_add(detail::w_pow(B, pf.L), detail::um_pow(B, pf.omega)), st.V.neg());
    pf.K = g1_mul(kbase, ai);

    // com* = (v^omega com^-1)^(1/a)
    G1 cbase = g1_add(detail::v_pow(B, pf.omega), st.com.neg());
    pf.com_star = g1_mul(cbase, ai);
    return pf;
}

// ---------------------------------------------------------------------------
// PiDKeyGenShare
// ---------------------------------------------------------------------------

struct DkStatement {
    uint32_t index = 0;                               // client index i (0-based)
    std::vector<std::array<cl::QuadForm, 2>> all_T;   // broadcast T_j for all j
    std::array<cl::QuadForm, 2> d;
    std::array<G2, 2> dk;
    G1 com;
    Fr y;        // public weight (quantized + ReLU'd in the FL pipeline)
    Bytes ell_y; // function label; per-component bases use "ell_y|b"
    Bytes ell_d;

    size_t n() const { return all_T.size(); }
};

struct DkBases {
    std::array<std::array<G2, 2>, 2> vhat;  // vhat[b] = H2(ell_y|b+1)
    std::array<G1, 2> v;                    // H1(ell_d)
};

inline DkBases dk_bases(const Bytes& ell_y, const Bytes& ell_d) {
    DkBases b;
    for (int i = 0; i < 2; i++) {
        Bytes lbl = ell_y;
        lbl += "|";
        lbl += static_cast<char>('1' + i);
        b.vhat[i] = hash_to_g2_pair(lbl);
    }
    b.v = hash_to_g1_pair(ell_d);
    return b;
}

inline DkBases dk_bases(const DkStatement& st) { return dk_bases(st.ell_y, st.ell_d); }

// K_{Sigma,i,b} = prod_{j<i} T_{j,b} * (prod_{j>i} T_{j,b})^{-1}
inline std::array<cl::QuadForm, 2> k_sigma(const std::vector<std::array<cl::QuadForm, 2>>& all_T,
                                           size_t i, const mpz_class& disc) {
    std::array<cl::QuadForm, 2> out{cl::QuadForm::identity(disc), cl::QuadForm::identity(disc)};
    for (int b = 0; b < 2; b++) {
        for (size_t j = 0; j < i; j++) out[b] = cl::form_compose(out[b], all_T[j][b]);
        for (size_t j = i + 1; j < all_T.size(); j++)
            out[b] = cl::form_compose(out[b], all_T[j][b].inverse());
    }
    return out;
}

struct DkProof {
    std::array<cl::QuadForm, 2> R_T, R_d;
    std::array<G2, 2> R_dk;
    G1 R_com;
    Fr beta;
    std::array<Fr, 2> z_k, z_s;
    std::array<mpz_class, 2> z_t;  // over the integers
};

inline void dk_statement_write(ByteWriter& w, const DkStatement& st) {
    w.u8(1);
    w.u32(st.index);
    w.u32(static_cast<uint32_t>(st.all_T.size()));
    for (const auto& T : st.all_T) {
        qf_write(w, T[0]);
        qf_write(w, T[1]);
    }
    qf_write(w, st.d[0]);
    qf_write(w, st.d[1]);
    g2_write(w, st.dk[0]);
    g2_write(w, st.dk[1]);
    g1_write(w, st.com);
    fr_write(w, st.y);
    w.bytes(st.ell_y);
    w.bytes(st.ell_d);
}

inline void dk_proof_write(ByteWriter& w, const DkProof& pf) {
    w.u8(1);
    for (int b = 0; b < 2; b++) qf_write(w, pf.R_T[b]);
    for (int b = 0; b < 2; b++) qf_write(w, pf.R_d[b]);
    for (int b = 0; b < 2; b++) g2_write(w, pf.R_dk[b]);
    g1_write(w, pf.R_com);
    fr_write(w, pf.beta);
    for (int b = 0; b < 2; b++) fr_write(w, pf.z_k[b]);
    for (int b = 0; b < 2; b++) fr_write(w, pf.z_s[b]);
    for (int b = 0; b < 2; b++) w.mpz_signed(pf.z_t[b]);
}

inline DkProof dk_proof_read(ByteReader& r) {
    if (r.u8() != 1) throw ParseError("dk proof: bad version");
    DkProof pf;
    for (int b = 0; b < 2; b++) pf.R_T[b] = cl::qf_read(r);
    for (int b = 0; b < 2; b++) pf.R_d[b] = cl::qf_read(r);
    for (int b = 0; b < 2; b++) pf.R_dk[b] = g2_read(r);
    pf.R_com = g1_read(r);
    pf.beta = fr_read(r);
    for (int b = 0; b < 2; b++) pf.z_k[b] = fr_read(r);
    for (int b = 0; b < 2; b++) pf.z_s[b] = fr_read(r);
    for (int b = 0; b < 2; b++) pf.z_t[b] = r.mpz_signed();
    return pf;
}

inline Bytes dk_proof_bytes(const DkProof& pf) {
    ByteWriter w;
    dk_proof_write(w, pf);
    return w.take();
}

namespace detail {

inline Fr dk_challenge(const DkStatement& st, const DkProof& pf) {
    ByteWriter sw;
    dk_statement_write(sw, st);
    ByteWriter cw;
    for (int b = 0; b < 2; b++) qf_write(cw, pf.R_T[b]);
    for (int b = 0; b < 2; b++) qf_write(cw, pf.R_d[b]);
    for (int b = 0; b < 2; b++) g2_write(cw, pf.R_dk[b]);
    g1_write(cw, pf.R_com);
    Transcript tr("PiDKeyGenShare|v1");
    tr.append("stmt", sw.data());
    tr.append("comm", cw.data());
    return tr.challenge(/*nonzero=*/false);
}

// vhat[b]^e for e in Zp^2, plus h^(k*y) term helper
inline G2 vhat_pow(const DkBases& B, int b, const std::array<Fr, 2>& e) {
    return g2_add(g2_mul(B.vhat[b][0], e[0]), g2_mul(B.vhat[b][1], e[1]));
}

}  // namespace detail

struct DkWitness {
    std::array<Fr, 2> s;
    std::array<Fr, 2> k_hat;
    std::array<mpz_class, 2> t;
};

inline DkProof prove_dkeyshare(const DkWitness& wit, const DkStatement& st,
                               const cl::ClassGroupParams& P, Rng& rng) {
    const DkBases B = dk_bases(st);
    const G2& h = g2_generator();
    auto K = k_sigma(st.all_T, st.index, P.disc_p);

    // r_t over [0, 2^lambda * p * S]
    const mpz_class rt_bound = (mpz_class(1) << P.lambda_dist) * P.p * P.dp_bound;
    std::array<Fr, 2> r_k{Fr::random(rng), Fr::random(rng)};
    std::array<Fr, 2> r_s{Fr::random(rng), Fr::random(rng)};
    std::array<mpz_class, 2> r_t{rng.mpz_upto(rt_bound), rng.mpz_upto(rt_bound)};

    DkProof pf;
    for (int b = 0; b < 2; b++) {
        pf.R_T[b] = cl::form_exp(P.h_p, r_t[b]);
        pf.R_d[b] = cl::form_multi_exp({{&P.f, &r_k[b].v}, {&K[b], &r_t[b]}});
        pf.R_dk[b] = g2_add(detail::vhat_pow(B, b, r_k), g2_mul(h, r_s[b] * st.y));
    }
    pf.R_com = g1_add(g1_mul(B.v[0], r_s[0]), g1_mul(B.v[1], r_s[1]));

    const Fr beta = detail::dk_challenge(st, pf);
    pf.beta = beta;
    for (int b = 0; b < 2; b++) {
        pf.z_k[b] = r_k[b] - beta * wit.k_hat[b];
        pf.z_s[b] = r_s[b] - beta * wit.s[b];
        pf.z_t[b] = r_t[b] - beta.v * wit.t[b];
    }
    return pf;
}

enum class DkReject : uint8_t {
    None = 0,
    NotInGroup,
    BadChallenge,
    ZtRange,
    EqT,
    EqD,
    EqDk,
    EqCom,
};

struct DkVerifyResult {
    bool ok = false;
    DkReject reason = DkReject::None;
};

inline DkVerifyResult verify_dkeyshare(const DkStatement& st, const DkProof& pf,
                                       const cl::ClassGroupParams& P, FsMode fs = FsMode::Recompute,
                                       const DkBases* cached = nullptr) {
    // membership checks come first
    for (const auto& T : st.all_T)
        for (int b = 0; b < 2; b++)
            if (!P.in_group(T[b])) return {false, DkReject::NotInGroup};
    for (int b = 0; b < 2; b++) {
        if (!P.in_group(st.d[b])) return {false, DkReject::NotInGroup};
        if (!P.in_group(pf.R_T[b]) || !P.in_group(pf.R_d[b])) return {false, DkReject::NotInGroup};
    }

    const mpz_class rt_bound = (mpz_class(1) << P.lambda_dist) * P.p * P.dp_bound;
    const mpz_class zt_low = -(P.p * P.dp_bound);
    for (int b = 0; b < 2; b++)
        if (pf.z_t[b] < zt_low || pf.z_t[b] > rt_bound) return {false, DkReject::ZtRange};

    if (fs == FsMode::Recompute) {
        if (!(detail::dk_challenge(st, pf) == pf.beta)) return {false, DkReject::BadChallenge};
    }

    const DkBases bases_local = cached ? DkBases{} : dk_bases(st);
    const DkBases& B = cached ? *cached : bases_local;
    const G2& h = g2_generator();
    auto K = k_sigma(st.all_T, st.index, P.disc_p);
    const mpz_class& beta = pf.beta.v;

    for (int b = 0; b < 2; b++) {
        // R_T = T^beta h_p^z_t
        cl::QuadForm rt = cl::form_multi_exp({{&st.all_T[st.index][b], &beta}, {&P.h_p, &pf.z_t[b]}});
        if (!(rt == pf.R_T[b])) return {false, DkReject::EqT};
        // R_d = d^beta f^z_k K^z_t
        cl::QuadForm rd = cl::form_multi_exp(
            {{&st.d[b], &beta}, {&P.f, &pf.z_k[b].v}, {&K[b], &pf.z_t[b]}});
        if (!(rd == pf.R_d[b])) return {false, DkReject::EqD};
        // R_dk = dk^beta vhat^z_k h^(z_s y)
        G2 rdk = g2_add(g2_mul(st.dk[b], pf.beta),
                        g2_add(detail::vhat_pow(B, b, pf.z_k), g2_mul(h, pf.z_s[b] * st.y)));
        if (!(rdk == pf.R_dk[b])) return {false, DkReject::EqDk};
    }
    // R_com = com^beta v^z_s
    G1 rcom = g1_add(g1_mul(st.com, pf.beta),
                     g1_add(g1_mul(B.v[0], pf.z_s[0]), g1_mul(B.v[1], pf.z_s[1])));
    if (!(rcom == pf.R_com)) return {false, DkReject::EqCom};

    return {true, DkReject::None};
}

}  // namespace vfefl::zkp
