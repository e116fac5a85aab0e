#include <gtest/gtest.h>

#include "vfefl/zkp.hpp"
#include "testutil.hpp"

using namespace vfefl;
using namespace vfefl::zkp;

namespace {

// Honest exact-mode statement + witness + proof for dimension m.
struct EncFixture {
    EncStatement st;
    EncWitness wit;
    EncProof pf;
};

EncFixture make_enc_fixture(uint32_t m, Rng& rng, ScoreMode mode = ScoreMode::Exact) {
    auto pp = test::make_pp(3, m);
    auto inst = test::exact_instance(m, rng);
    std::array<Fr, 2> s{Fr::random(rng), Fr::random(rng)};

    EncFixture fx;
    fx.wit = {s, inst.x};
    fx.st.ell = "round|7";
    fx.st.ell_enc = dvfe::enc_labels(7, m);
    fx.st.ell_d = pp.ell_d;
    fx.st.x0 = inst.x0;
    fx.st.mode = mode;
    if (mode == ScoreMode::Exact) {
        fx.st.y = Fr::from_i64(inst.y);
    } else {
        mpz_class xx = zkp::detail::dot_int(inst.x, inst.x);
        mpz_class num = 100 * zkp::detail::dot_int(inst.x, inst.x0);
        mpz_class q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), xx.get_mpz_t());
        fx.st.y_hat = mpz_get_si(q.get_mpz_t());
        fx.st.rho = r;
        fx.st.p_bound = pp.norm_cap();
        fx.st.s_y = 100;
    }
    EncBases B = enc_bases(fx.st);
    fx.st.V = g1_add(zkp::detail::um_pow(B, s), zkp::detail::w_pow_int(B, inst.x));
    fx.st.com = zkp::detail::v_pow(B, s);
    fx.pf = prove_encrypt(fx.wit, fx.st, rng, &B);
    return fx;
}

}  // namespace

TEST(PiEncrypt, CompletenessAcrossDimensions) {
    Rng rng(100);
    for (uint32_t m : {1u, 2u, 4u, 8u, 16u, 32u}) {
        auto fx = make_enc_fixture(m, rng);
        auto res = verify_encrypt(fx.st, fx.pf);
        EXPECT_TRUE(res.ok) << "exact m=" << m << " reason " << static_cast<int>(res.reason);
        auto fxr = make_enc_fixture(m, rng, ScoreMode::Rounded);
        auto resr = verify_encrypt(fxr.st, fxr.pf);
        EXPECT_TRUE(resr.ok) << "rounded m=" << m << " reason " << static_cast<int>(resr.reason);
    }
}

TEST(PiEncrypt, RatioOneCase) {
    Rng rng(101);
    auto pp = test::make_pp(2, 4);
    std::vector<int64_t> x{3, -2, 7, 1};
    std::array<Fr, 2> s{Fr::random(rng), Fr::random(rng)};
    EncStatement st;
    st.ell = "round|1";
    st.ell_enc = dvfe::enc_labels(1, 4);
    st.ell_d = pp.ell_d;
    st.x0 = x;  // x0 = x so the ratio is exactly 1
    st.y = Fr::one();
    EncBases B = enc_bases(st);
    st.V = g1_add(zkp::detail::um_pow(B, s), zkp::detail::w_pow_int(B, x));
    st.com = zkp::detail::v_pow(B, s);
    EncProof pf = prove_encrypt({s, x}, st, rng, &B);
    EXPECT_TRUE(verify_encrypt(st, pf, FsMode::Recompute, &B).ok);
}

TEST(PiEncrypt, InconsistentWitnessRefusesToProve) {
    Rng rng(102);
    auto fx = make_enc_fixture(4, rng);
    EncWitness bad = fx.wit;
    bad.s[0] = bad.s[0] + Fr::one();
    EXPECT_THROW(prove_encrypt(bad, fx.st, rng), WitnessMismatch);
    EncWitness badx = fx.wit;
    badx.x[0] += 1;
    EXPECT_THROW(prove_encrypt(badx, fx.st, rng), WitnessMismatch);
}

TEST(PiEncrypt, ForcedInnerProductFailure) {
    Rng rng(103);
    auto fx = make_enc_fixture(4, rng);
    EncProof bad = fx.pf;
    bad.t = bad.t + Fr::one();
    auto res = verify_encrypt(fx.st, bad);
    EXPECT_FALSE(res.ok);
    EXPECT_EQ(res.reason, EncReject::InnerProduct);
}

TEST(PiEncrypt, MutationsAllReject) {
    Rng rng(104);
    auto fx = make_enc_fixture(6, rng);
    ASSERT_TRUE(verify_encrypt(fx.st, fx.pf).ok);
    for (int trial = 0; trial < 40; trial++) {
        EncProof bad = fx.pf;
        switch (rng.below(8)) {
            case 0: bad.K = g1_mul(g1_generator(), Fr::random(rng)); break;
            case 1: bad.T0 = g1_mul(g1_generator(), Fr::random(rng)); break;
            case 2: bad.T1 = g1_mul(g1_generator(), Fr::random(rng)); break;
            case 3: bad.T2 = g1_mul(g1_generator(), Fr::random(rng)); break;
            case 4: bad.com_star = g1_mul(g1_generator(), Fr::random(rng)); break;
            case 5: bad.omega[rng.below(2)] = Fr::random(rng); break;
            case 6: bad.L[rng.below(bad.L.size())] = Fr::random(rng); break;
            default: bad.tau_alpha[rng.below(2)] = Fr::random(rng); break;
        }
        EXPECT_FALSE(verify_encrypt(fx.st, bad).ok) << "mutation " << trial << " accepted";
    }
}

TEST(PiEncrypt, SimulatorSatisfiesEquations) {
    Rng rng(105);
    for (int i = 0; i < 5; i++) {
        auto fx = make_enc_fixture(4, rng);
        Fr alpha = Fr::random(rng);
        while (alpha.is_zero()) alpha = Fr::random(rng);
        EncProof sim = simulate_encrypt(fx.st, alpha, rng);
        auto res = verify_encrypt(fx.st, sim, FsMode::TrustChallenge);
        EXPECT_TRUE(res.ok) << "reason " << static_cast<int>(res.reason);
        // rounded-mode simulator as well
        auto fxr = make_enc_fixture(4, rng, ScoreMode::Rounded);
        EncProof simr = simulate_encrypt(fxr.st, alpha, rng);
        EXPECT_TRUE(verify_encrypt(fxr.st, simr, FsMode::TrustChallenge).ok);
    }
}

TEST(PiEncrypt, SimulationsAreRandomized) {
    Rng rng(106);
    auto fx = make_enc_fixture(4, rng);
    Fr alpha(5);
    EncProof a = simulate_encrypt(fx.st, alpha, rng);
    EncProof b = simulate_encrypt(fx.st, alpha, rng);
    EXPECT_FALSE(enc_proof_bytes(a) == enc_proof_bytes(b));
}

TEST(PiEncrypt, RewindingExtractorRecoversWitness) {
    Rng rng(107);
    for (int i = 0; i < 50; i++) {
        uint32_t m = 1 + static_cast<uint32_t>(rng.below(8));
        auto pp = test::make_pp(2, m);
        auto inst = test::exact_instance(m, rng);
        std::array<Fr, 2> s{Fr::random(rng), Fr::random(rng)};
        EncStatement st;
        st.ell = "round|9";
        st.ell_enc = dvfe::enc_labels(9, m);
        st.ell_d = pp.ell_d;
        st.x0 = inst.x0;
        st.y = Fr::from_i64(inst.y);
        EncBases B = enc_bases(st);
        st.V = g1_add(zkp::detail::um_pow(B, s), zkp::detail::w_pow_int(B, inst.x));
        st.com = zkp::detail::v_pow(B, s);

        EncProverSession session({s, inst.x}, st, rng, &B);
        Fr a1 = Fr::random(rng), a2 = Fr::random(rng);
        while (a1.is_zero()) a1 = Fr::random(rng);
        while (a2.is_zero() || a2 == a1) a2 = Fr::random(rng);
        EncProof p1 = session.respond(a1);
        EncProof p2 = session.respond(a2);
        ASSERT_TRUE(verify_encrypt(st, p1, FsMode::TrustChallenge, &B).ok);
        ASSERT_TRUE(verify_encrypt(st, p2, FsMode::TrustChallenge, &B).ok);

        auto ext = test::extract_witness(p1, p2);
        // extracted witness satisfies the statement
        G1 V = g1_add(zkp::detail::um_pow(B, ext.s),
                      multi_exp(std::span<const G1>(B.w), std::span<const Fr>(ext.x)));
        EXPECT_TRUE(V == st.V);
        EXPECT_TRUE(zkp::detail::v_pow(B, ext.s) == st.com);
        for (uint32_t j = 0; j < m; j++) EXPECT_TRUE(ext.x[j] == Fr::from_i64(inst.x[j]));
        for (int b = 0; b < 2; b++) EXPECT_TRUE(ext.s[b] == s[b]);
    }
}

TEST(FiatShamir, DeterministicAndAvalanche) {
    Transcript t1("demo");
    t1.append("stmt", "hello");
    t1.append("comm", "world");
    Transcript t2("demo");
    t2.append("stmt", "hello");
    t2.append("comm", "world");
    EXPECT_TRUE(t1.challenge(true) == t2.challenge(true));

    Rng rng(108);
    int changed = 0;
    Bytes base = "statement-bytes-for-avalanche-romp";
    Fr c0;
    {
        Transcript t("demo");
        t.append("stmt", base);
        c0 = t.challenge(false);
    }
    for (int i = 0; i < 1000; i++) {
        Bytes mut = base;
        mut[rng.below(mut.size())] ^= static_cast<char>(1 + rng.below(255));
        Transcript t("demo");
        t.append("stmt", mut);
        if (!(t.challenge(false) == c0)) changed++;
    }
    EXPECT_EQ(changed, 1000);
}

TEST(FiatShamir, EmptyCommitmentTranscriptIsTotal) {
    Transcript t("demo");
    t.append("stmt", "only-statement");
    t.append("comm", "");
    Fr c = t.challenge(true);
    EXPECT_FALSE(c.is_zero());
}

namespace {

struct DkFixture {
    DkStatement st;
    DkWitness wit;
    DkProof pf;
};

DkFixture make_dk_fixture(uint32_t n, Rng& rng) {
    auto pp = test::make_pp(n, 2);
    auto party = test::keygen_all(pp, rng);
    uint32_t i = n / 2;
    Fr y = Fr::from_i64(static_cast<int64_t>(rng.below(100)));
    auto [ks, st] = dvfe::dkeygen_share_core(party.keys[i], party.vk.pk, i, y, "fn|3", pp);
    DkFixture fx;
    fx.st = st;
    fx.wit = {party.keys[i].s, party.keys[i].k_hat, party.keys[i].t};
    fx.pf = prove_dkeyshare(fx.wit, fx.st, pp.cg, rng);
    return fx;
}

}  // namespace

TEST(PiDKeyGenShare, CompletenessN3) {
    Rng rng(109);
    auto fx = make_dk_fixture(3, rng);
    auto res = verify_dkeyshare(fx.st, fx.pf, test::shared_class_group());
    EXPECT_TRUE(res.ok) << "reason " << static_cast<int>(res.reason);
}

TEST(PiDKeyGenShare, TamperedShareRejects) {
    Rng rng(110);
    auto fx = make_dk_fixture(3, rng);
    DkStatement bad = fx.st;
    bad.dk[0] = g2_add(bad.dk[0], g2_generator());
    auto res = verify_dkeyshare(bad, fx.pf, test::shared_class_group());
    EXPECT_FALSE(res.ok);
}

TEST(PiDKeyGenShare, WrongFunctionLabelRejects) {
    Rng rng(111);
    auto fx = make_dk_fixture(3, rng);
    DkStatement other = fx.st;
    other.ell_y = "fn|4";
    EXPECT_FALSE(verify_dkeyshare(other, fx.pf, test::shared_class_group()).ok);
}

TEST(PiDKeyGenShare, MutationsAllReject) {
    Rng rng(112);
    auto fx = make_dk_fixture(3, rng);
    const auto& P = test::shared_class_group();
    ASSERT_TRUE(verify_dkeyshare(fx.st, fx.pf, P).ok);
    for (int trial = 0; trial < 20; trial++) {
        DkProof bad = fx.pf;
        switch (rng.below(6)) {
            case 0: bad.R_T[rng.below(2)] = cl::form_exp(P.h_p, rng.mpz_below(P.p)); break;
            case 1: bad.R_d[rng.below(2)] = cl::form_exp(P.h_p, rng.mpz_below(P.p)); break;
            case 2: bad.R_dk[rng.below(2)] = g2_mul(g2_generator(), Fr::random(rng)); break;
            case 3: bad.z_k[rng.below(2)] = Fr::random(rng); break;
            case 4: bad.z_s[rng.below(2)] = Fr::random(rng); break;
            default: bad.z_t[rng.below(2)] += 1; break;
        }
        EXPECT_FALSE(verify_dkeyshare(fx.st, bad, P).ok) << "mutation " << trial << " accepted";
    }
}

TEST(PiDKeyGenShare, ZtRangeWindow) {
    Rng rng(113);
    auto fx = make_dk_fixture(2, rng);
    const auto& P = test::shared_class_group();
    // honest z_t values sit inside the slack window
    const mpz_class hi = (mpz_class(1) << P.lambda_dist) * P.p * P.dp_bound;
    for (int b = 0; b < 2; b++) {
        EXPECT_LE(fx.pf.z_t[b], hi);
        EXPECT_GE(fx.pf.z_t[b], -(P.p * P.dp_bound));
    }
    DkProof bad = fx.pf;
    bad.z_t[0] = hi + 1;
    auto res = verify_dkeyshare(fx.st, bad, P);
    EXPECT_FALSE(res.ok);
    EXPECT_EQ(res.reason, DkReject::ZtRange);
}

TEST(PiDKeyGenShare, MalformedTIsNotInGroup) {
    Rng rng(114);
    auto fx = make_dk_fixture(3, rng);
    DkStatement bad = fx.st;
    bad.all_T[0][0].a += 1;  // breaks the discriminant
    auto res = verify_dkeyshare(bad, fx.pf, test::shared_class_group());
    EXPECT_FALSE(res.ok);
    EXPECT_EQ(res.reason, DkReject::NotInGroup);
}

TEST(ProofSerialization, RoundtripsAndGolden) {
    Rng rng(115);
    auto fx = make_enc_fixture(3, rng);
    Bytes b = enc_proof_bytes(fx.pf);
    ByteReader r(b);
    EncProof back = enc_proof_read(r);
    EXPECT_EQ(enc_proof_bytes(back), b);

    auto dk = make_dk_fixture(2, rng);
    Bytes b2 = dk_proof_bytes(dk.pf);
    ByteReader r2(b2);
    DkProof back2 = dk_proof_read(r2);
    EXPECT_EQ(dk_proof_bytes(back2), b2);

    // frozen seeded digests: serialization or transcript changes show up here
    Rng grng(0xBEEF);
    auto gfx = make_enc_fixture(2, grng);
    EXPECT_EQ(to_hex(sha256(enc_proof_bytes(gfx.pf)).substr(0, 8)), "e38781db359ca35d");
}
