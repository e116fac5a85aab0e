#pragma once

// The decentralized verifiable functional encryption scheme for inner
// products: SetUp, KeyGen (one broadcast round + local finalization), Encrypt,
// VerifyCT, DKeyGenShare, VerifyDK, DKeyComb, Decrypt.
//
// Ciphertexts are deterministic in (ek, x, labels); label freshness per
// (client, round) is the caller's obligation.

#include <functional>
#include <optional>
#include <vector>

#include "vfefl/algebra.hpp"
#include "vfefl/bls381.hpp"
#include "vfefl/classgroup.hpp"
#include "vfefl/oracles.hpp"
#include "vfefl/zkp.hpp"

namespace vfefl::dvfe {

struct MessageTooLarge : std::runtime_error {
    explicit MessageTooLarge(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateModel : std::runtime_error {
    explicit DegenerateModel(const std::string& what) : std::runtime_error(what) {}
};
struct DecryptOutOfRange : std::runtime_error {
    size_t dimension;
    DecryptOutOfRange(size_t dim, const std::string& what)
        : std::runtime_error(what), dimension(dim) {}
};

struct PublicParams {
    cl::ClassGroupParams cg;
    Bytes ell_d;  // initialization label
    uint32_t n = 0;
    uint32_t m = 0;
    uint32_t q_bits = 31;       // messages satisfy |x| < 2^q
    mpz_class bsgs_bound;       // decryption search window (signed)
    uint32_t s_y = 100;         // score quantization scale
    bool two_client_warning = false;

    mpz_class message_bound() const { return mpz_class(1) << q_bits; }
    // public cap on <x,x>, used as the rounded-mode residual bound
    mpz_class norm_cap() const { return mpz_class(m) * (message_bound() * message_bound()); }
};

inline void params_write(ByteWriter& w, const PublicParams& pp) {
    w.u8(1);
    cl::cl_params_write(w, pp.cg);
    w.bytes(pp.ell_d);
    w.u32(pp.n);
    w.u32(pp.m);
    w.u32(pp.q_bits);
    w.mpz_signed(pp.bsgs_bound);
    w.u32(pp.s_y);
}

inline Bytes params_bytes(const PublicParams& pp) {
    ByteWriter w;
    params_write(w, pp);
    return w.take();
}

struct SetupConfig {
    cl::Profile profile = cl::Profile::Test;
    uint32_t q_bits = 31;
    mpz_class bsgs_bound = mpz_class(1) << 32;
    uint32_t s_y = 100;
    Bytes session_id = "session0";
};

// The threat model needs at least two honest clients; n = 2 therefore assumes
// every client is honest, which setup flags as a warning.
inline PublicParams setup(uint32_t n, uint32_t m, const SetupConfig& cfg, Rng& rng) {
    if (n < 2) throw cl::SetupError("setup: need n >= 2 clients");
    PublicParams pp;
    pp.cg = cl::cl_gen(cfg.profile, bls_r(), rng);
    pp.ell_d = "init|" + cfg.session_id;
    pp.n = n;
    pp.m = m;
    pp.q_bits = cfg.q_bits;
    pp.bsgs_bound = cfg.bsgs_bound;
    pp.s_y = cfg.s_y;
    pp.two_client_warning = (n == 2);
    return pp;
}

// label conventions
inline Bytes round_label(uint64_t t) { return "round|" + std::to_string(t); }
inline std::vector<Bytes> enc_labels(uint64_t t, uint32_t m) {
    std::vector<Bytes> out;
    out.reserve(m);
    for (uint32_t j = 1; j <= m; j++) out.push_back("enc|" + std::to_string(t) + "|" + std::to_string(j));
    return out;
}
inline Bytes fn_label(uint64_t t) { return "fn|" + std::to_string(t); }

// ---------------------------------------------------------------------------
// KeyGen
// ---------------------------------------------------------------------------

struct KeygenDraft {
    std::array<Fr, 2> s;               // ek_i
    std::array<Fr, 2> k_hat;
    std::array<mpz_class, 2> t;        // D_p samples
    std::array<cl::QuadForm, 2> T;     // broadcast h_p^t
};

struct ClientKeyMaterial {
    std::array<Fr, 2> s;
    std::array<Fr, 2> k_hat;
    std::array<mpz_class, 2> t;
    std::array<cl::QuadForm, 2> T;
    std::array<cl::QuadForm, 2> d;
    G1 com;
};

inline KeygenDraft keygen_local(const PublicParams& pp, Rng& rng) {
    KeygenDraft d;
    d.s = {Fr::random(rng), Fr::random(rng)};
    d.k_hat = {Fr::random(rng), Fr::random(rng)};
    d.t = {cl::sample_dp(pp.cg, rng), cl::sample_dp(pp.cg, rng)};
    d.T = {cl::form_exp(pp.cg.h_p, d.t[0]), cl::form_exp(pp.cg.h_p, d.t[1])};
    return d;
}

inline ClientKeyMaterial keygen_finalize(const KeygenDraft& draft,
                                         const std::vector<std::array<cl::QuadForm, 2>>& all_T,
                                         size_t index, const PublicParams& pp) {
    if (all_T.size() != pp.n) throw DimensionError("keygen_finalize: wrong T count");
    for (const auto& T : all_T)
        for (int b = 0; b < 2; b++)
            if (!pp.cg.in_group(T[b])) throw cl::NotInGroup("keygen_finalize: T not in class group");

    ClientKeyMaterial out;
    out.s = draft.s;
    out.k_hat = draft.k_hat;
    out.t = draft.t;
    out.T = draft.T;
    auto K = zkp::k_sigma(all_T, index, pp.cg.disc_p);
    for (int b = 0; b < 2; b++)
        out.d[b] = cl::form_compose(cl::form_exp(pp.cg.f, draft.k_hat[b].v),
                                    cl::form_exp(K[b], draft.t[b]));
    auto v = hash_to_g1_pair(pp.ell_d);
    out.com = g1_add(g1_mul(v[0], draft.s[0]), g1_mul(v[1], draft.s[1]));
    return out;
}

struct PkEntry {
    std::array<cl::QuadForm, 2> T, d;
};

struct VerificationKeys {
    std::vector<G1> vk_ct;        // com_i
    std::vector<PkEntry> pk;      // (T_i, d_i)
    // vk_dk is (T_i, d_i, com_i), i.e. pk zipped with vk_ct
};

inline VerificationKeys assemble_keys(const std::vector<ClientKeyMaterial>& keys) {
    VerificationKeys vk;
    for (const auto& k : keys) {
        vk.vk_ct.push_back(k.com);
        vk.pk.push_back({k.T, k.d});
    }
    return vk;
}

// ---------------------------------------------------------------------------
// Encrypt / VerifyCT
// ---------------------------------------------------------------------------

struct LabeledCiphertext {
    Bytes ell;
    std::vector<Bytes> ell_enc;
    std::vector<G1> entries;  // C_{l,i,j} = u^{s_i} w_j^{x_j}
    zkp::ScoreMode mode = zkp::ScoreMode::Exact;
    Fr y;             // exact mode public weight
    int64_t y_hat = 0;  // rounded mode: signed quantized score
    mpz_class rho;      // rounded mode residual
    zkp::EncProof proof;
};

inline void ciphertext_write(ByteWriter& w, const LabeledCiphertext& ct) {
    w.u8(1);
    w.bytes(ct.ell);
    w.u32(static_cast<uint32_t>(ct.ell_enc.size()));
    for (const auto& l : ct.ell_enc) w.bytes(l);
    w.u32(static_cast<uint32_t>(ct.entries.size()));
    for (const auto& e : ct.entries) g1_write(w, e);
    w.u8(static_cast<uint8_t>(ct.mode));
    fr_write(w, ct.y);
    w.i64(ct.y_hat);
    w.mpz_signed(ct.rho);
    zkp::enc_proof_write(w, ct.proof);
}

inline Bytes ciphertext_bytes(const LabeledCiphertext& ct) {
    ByteWriter w;
    ciphertext_write(w, ct);
    return w.take();
}

inline zkp::EncStatement make_enc_statement(const LabeledCiphertext& ct, const G1& com,
                                            const std::vector<int64_t>& x0, const PublicParams& pp) {
    zkp::EncStatement st;
    st.ell = ct.ell;
    st.ell_enc = ct.ell_enc;
    st.ell_d = pp.ell_d;
    G1 V = G1::infinity();
    for (const auto& e : ct.entries) V = g1_add(V, e);
    st.V = V;
    st.com = com;
    st.x0 = x0;
    st.mode = ct.mode;
    st.y = ct.y;
    st.y_hat = ct.y_hat;
    st.rho = ct.rho;
    st.p_bound = pp.norm_cap();
    st.s_y = pp.s_y;
    return st;
}

// Ciphertext entries plus the public statement, proof left empty; lets the
// CLI time encryption and proof generation separately.
inline std::pair<LabeledCiphertext, zkp::EncStatement> encrypt_core(
    const std::array<Fr, 2>& ek, const std::vector<int64_t>& x, const std::vector<int64_t>& x0,
    const Bytes& ell, const std::vector<Bytes>& ell_enc, const PublicParams& pp,
    zkp::ScoreMode mode, std::optional<Fr> y_exact, const zkp::EncBases* cached = nullptr) {
    if (x.size() != pp.m || ell_enc.size() != pp.m || x0.size() != pp.m)
        throw DimensionError("encrypt: dimension mismatch");
    const mpz_class bound = pp.message_bound();
    for (int64_t xi : x)
        if (mpz_class(static_cast<long>(xi < 0 ? -xi : xi)) >= bound)
            throw MessageTooLarge("encrypt: |x| >= 2^q");

    LabeledCiphertext ct;
    ct.ell = ell;
    ct.ell_enc = ell_enc;
    ct.mode = mode;

    if (mode == zkp::ScoreMode::Exact) {
        if (!y_exact) throw std::invalid_argument("encrypt: exact mode needs y");
        ct.y = *y_exact;
    } else {
        mpz_class xx = zkp::detail::dot_int(x, x);
        if (xx == 0) throw DegenerateModel("encrypt: zero model vector in rounded mode");
        mpz_class num = pp.s_y * zkp::detail::dot_int(x, x0);
        mpz_class q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), xx.get_mpz_t());
        if (!q.fits_slong_p()) throw MessageTooLarge("encrypt: quantized score overflow");
        ct.y_hat = mpz_get_si(q.get_mpz_t());
        ct.rho = r;
    }

    const zkp::EncBases bases_local =
        cached ? zkp::EncBases{} : zkp::enc_bases(ell, ell_enc, pp.ell_d);
    const zkp::EncBases& B = cached ? *cached : bases_local;
    G1 U = g1_add(g1_mul(B.u[0], ek[0]), g1_mul(B.u[1], ek[1]));
    ct.entries.reserve(pp.m);
    for (uint32_t j = 0; j < pp.m; j++)
        ct.entries.push_back(g1_add(U, g1_mul(B.w[j], Fr::from_i64(x[j]))));

    G1 com = g1_add(g1_mul(B.v[0], ek[0]), g1_mul(B.v[1], ek[1]));
    zkp::EncStatement st = make_enc_statement(ct, com, x0, pp);
    return {std::move(ct), std::move(st)};
}

// Exact mode: the caller supplies y with <x,x0> = y <x,x> in Zp.
// Rounded mode: the quantized score floor(s_y <x,x0> / <x,x>) and its residual
// are computed here and become part of the public statement.
inline LabeledCiphertext encrypt(const std::array<Fr, 2>& ek, const std::vector<int64_t>& x,
                                 const std::vector<int64_t>& x0, const Bytes& ell,
                                 const std::vector<Bytes>& ell_enc, const PublicParams& pp,
                                 zkp::ScoreMode mode, std::optional<Fr> y_exact, Rng& rng,
                                 const zkp::EncBases* cached = nullptr) {
    const zkp::EncBases bases_local =
        cached ? zkp::EncBases{} : zkp::enc_bases(ell, ell_enc, pp.ell_d);
    const zkp::EncBases& B = cached ? *cached : bases_local;
    auto [ct, st] = encrypt_core(ek, x, x0, ell, ell_enc, pp, mode, std::move(y_exact), &B);
    ct.proof = zkp::prove_encrypt({ek, x}, st, rng, &B);
    return ct;
}

struct CtVerdict {
    bool accept = true;
    std::vector<uint32_t> flagged;  // CC_CT
    std::vector<zkp::EncReject> reasons;
};

// x0_for(i) supplies each client's public reference vector (shared in the FL
// pipeline, per-instance in crypto tests).
inline CtVerdict verify_ct(const std::vector<LabeledCiphertext>& cts, const std::vector<G1>& vk_ct,
                           const std::function<const std::vector<int64_t>&(size_t)>& x0_for,
                           const PublicParams& pp) {
    CtVerdict verdict;
    if (cts.size() != vk_ct.size()) throw DimensionError("verify_ct: key/ciphertext count mismatch");
    // bases are label-derived, so clients sharing the round labels share them
    std::optional<zkp::EncBases> shared;
    for (size_t i = 0; i < cts.size(); i++) {
        if (cts[i].entries.size() != pp.m || cts[i].ell_enc.size() != pp.m) {
            verdict.accept = false;
            verdict.flagged.push_back(static_cast<uint32_t>(i));
            verdict.reasons.push_back(zkp::EncReject::BadChallenge);
            continue;
        }
        zkp::EncStatement st = make_enc_statement(cts[i], vk_ct[i], x0_for(i), pp);
        const zkp::EncBases* cached = nullptr;
        if (cts[i].ell == cts[0].ell && cts[i].ell_enc == cts[0].ell_enc) {
            if (!shared) shared = zkp::enc_bases(st);
            cached = &*shared;
        }
        auto res = zkp::verify_encrypt(st, cts[i].proof, zkp::FsMode::Recompute, cached);
        if (!res.ok) {
            verdict.accept = false;
            verdict.flagged.push_back(static_cast<uint32_t>(i));
            verdict.reasons.push_back(res.reason);
        }
    }
    return verdict;
}

// ---------------------------------------------------------------------------
// DKeyGenShare / VerifyDK / DKeyComb / Decrypt
// ---------------------------------------------------------------------------

struct KeyShare {
    std::array<G2, 2> dk;
    Fr y;  // public weight bound by the proof
    Bytes ell_y;
    zkp::DkProof proof;
};

inline void keyshare_write(ByteWriter& w, const KeyShare& ks) {
    w.u8(1);
    g2_write(w, ks.dk[0]);
    g2_write(w, ks.dk[1]);
    fr_write(w, ks.y);
    w.bytes(ks.ell_y);
    zkp::dk_proof_write(w, ks.proof);
}

inline Bytes keyshare_bytes(const KeyShare& ks) {
    ByteWriter w;
    keyshare_write(w, ks);
    return w.take();
}

inline std::vector<std::array<cl::QuadForm, 2>> all_T_of(const std::vector<PkEntry>& pk) {
    std::vector<std::array<cl::QuadForm, 2>> out;
    out.reserve(pk.size());
    for (const auto& e : pk) out.push_back(e.T);
    return out;
}

// Share computation without the proof; the statement comes back so the proof
// can be produced (and timed) separately.
inline std::pair<KeyShare, zkp::DkStatement> dkeygen_share_core(const ClientKeyMaterial& sk,
                                                                const std::vector<PkEntry>& pk,
                                                                size_t index, const Fr& y,
                                                                const Bytes& ell_y,
                                                                const PublicParams& pp) {
    KeyShare ks;
    ks.y = y;
    ks.ell_y = ell_y;

    zkp::DkStatement st;
    st.index = static_cast<uint32_t>(index);
    st.all_T = all_T_of(pk);
    st.d = pk[index].d;
    st.y = y;
    st.ell_y = ell_y;
    st.ell_d = pp.ell_d;
    const zkp::DkBases B = zkp::dk_bases(st);
    const G2& h = g2_generator();
    for (int b = 0; b < 2; b++) {
        G2 vk = g2_add(g2_mul(B.vhat[b][0], sk.k_hat[0]), g2_mul(B.vhat[b][1], sk.k_hat[1]));
        ks.dk[b] = g2_add(vk, g2_mul(h, sk.s[b] * y));
    }
    st.dk = ks.dk;
    // re-commit s_i
    st.com = g1_add(g1_mul(B.v[0], sk.s[0]), g1_mul(B.v[1], sk.s[1]));
    return {ks, st};
}

inline KeyShare dkeygen_share(const ClientKeyMaterial& sk, const std::vector<PkEntry>& pk,
                              size_t index, const Fr& y, const Bytes& ell_y, const PublicParams& pp,
                              Rng& rng) {
    auto [ks, st] = dkeygen_share_core(sk, pk, index, y, ell_y, pp);
    ks.proof = zkp::prove_dkeyshare({sk.s, sk.k_hat, sk.t}, st, pp.cg, rng);
    return ks;
}

struct DkVerdict {
    bool accept = true;
    std::vector<uint32_t> flagged;  // CC_DK
    std::vector<zkp::DkReject> reasons;
};

inline DkVerdict verify_dk(const std::vector<KeyShare>& shares, const std::vector<PkEntry>& pk,
                           const std::vector<G1>& vk_ct, const PublicParams& pp) {
    DkVerdict verdict;
    if (shares.size() != pk.size() || shares.size() != vk_ct.size())
        throw DimensionError("verify_dk: count mismatch");
    auto all_T = all_T_of(pk);
    std::optional<zkp::DkBases> shared;
    for (size_t i = 0; i < shares.size(); i++) {
        zkp::DkStatement st;
        st.index = static_cast<uint32_t>(i);
        st.all_T = all_T;
        st.d = pk[i].d;
        st.dk = shares[i].dk;
        st.com = vk_ct[i];
        st.y = shares[i].y;
        st.ell_y = shares[i].ell_y;
        st.ell_d = pp.ell_d;
        const zkp::DkBases* cached = nullptr;
        if (shares[i].ell_y == shares[0].ell_y) {
            if (!shared) shared = zkp::dk_bases(st);
            cached = &*shared;
        }
        auto res = zkp::verify_dkeyshare(st, shares[i].proof, pp.cg, zkp::FsMode::Recompute, cached);
        if (!res.ok) {
            verdict.accept = false;
            verdict.flagged.push_back(static_cast<uint32_t>(i));
            verdict.reasons.push_back(res.reason);
        }
    }
    return verdict;
}

struct FunctionalKey {
    std::array<G2, 2> fk;  // h^{dk_y}
};

// Combines all n shares; the telescoping product of the d_i lands in F and its
// easy discrete log removes the vhat component.
inline FunctionalKey dkey_comb(const std::vector<KeyShare>& shares, const Bytes& ell_y,
                               const std::vector<PkEntry>& pk, const PublicParams& pp) {
    if (shares.size() != pp.n || pk.size() != pp.n) throw DimensionError("dkey_comb: need all n shares");
    std::array<mpz_class, 2> d;
    for (int b = 0; b < 2; b++) {
        cl::QuadForm prod = pp.cg.identity();
        for (const auto& e : pk) prod = cl::form_compose(prod, e.d[b]);
        d[b] = cl::cl_solve(pp.cg, prod);  // NotInF signals a corrupted pk
    }
    std::array<std::array<G2, 2>, 2> vhat;
    for (int b = 0; b < 2; b++) {
        Bytes lbl = ell_y;
        lbl += "|";
        lbl += static_cast<char>('1' + b);
        vhat[b] = hash_to_g2_pair(lbl);
    }
    FunctionalKey out;
    for (int b = 0; b < 2; b++) {
        G2 prod = G2::infinity();
        for (const auto& s : shares) prod = g2_add(prod, s.dk[b]);
        G2 vd = g2_add(g2_mul(vhat[b][0], d[0]), g2_mul(vhat[b][1], d[1]));
        out.fk[b] = g2_add(prod, vd.neg());
    }
    return out;
}

// Decrypt all m dimensions: per j the pairing ratio equals e(w_j,h)^<x_j, y>
// and the exponent is recovered over the signed window [-bound, bound).
inline std::vector<int64_t> decrypt(const std::vector<LabeledCiphertext>& cts, const FunctionalKey& fk,
                                    const std::vector<Fr>& y, const PublicParams& pp,
                                    BsgsSolver& solver) {
    if (cts.empty() || cts.size() != y.size()) throw DimensionError("decrypt: count mismatch");
    const Bytes& ell = cts[0].ell;
    for (const auto& ct : cts)
        if (ct.ell != ell || ct.entries.size() != pp.m) throw DimensionError("decrypt: label mismatch");

    auto u = hash_to_g1_pair(ell);
    Gt den = pairing(u[0], fk.fk[0]) * pairing(u[1], fk.fk[1]);
    Gt den_inv = den.inv();
    const G2& h = g2_generator();

    if (!pp.bsgs_bound.fits_ulong_p()) throw std::invalid_argument("decrypt: bsgs bound too large");
    uint64_t bound = mpz_get_ui(pp.bsgs_bound.get_mpz_t());

    std::vector<int64_t> out(pp.m);
    for (uint32_t j = 0; j < pp.m; j++) {
        G1 acc = G1::infinity();
        for (size_t i = 0; i < cts.size(); i++) acc = g1_add(acc, g1_mul(cts[i].entries[j], y[i]));
        Gt ratio = pairing(acc, h) * den_inv;
        Gt Ej = pairing(hash_to_g1(cts[0].ell_enc[j]), h);
        try {
            out[j] = solver.solve_signed(Ej, ratio, bound);
        } catch (const BsgsOutOfRange&) {
            throw DecryptOutOfRange(j, "decrypt: aggregate outside BSGS window at dimension " +
                                           std::to_string(j));
        }
    }
    return out;
}

}  // namespace vfefl::dvfe
