#include <gtest/gtest.h>

#include "vfefl/aggregation.hpp"
#include "vfefl/algebra.hpp"
#include "vfefl/bls381.hpp"
#include "vfefl/rng.hpp"

using namespace vfefl;
using namespace vfefl::agg;

TEST(FixedPoint, EncodeExamples) {
    FixedPointCodec codec;
    EXPECT_EQ(codec.encode1(1.23), 123);
    EXPECT_EQ(codec.encode1(0.0), 0);
    EXPECT_EQ(codec.encode1(-0.5), -50);
    EXPECT_EQ(codec.encode1(0.005), 1);    // half away from zero
    EXPECT_EQ(codec.encode1(-0.005), -1);
    EXPECT_DOUBLE_EQ(codec.decode1(123), 1.23);
    FixedPointCodec tight;
    tight.q_bits = 8;
    EXPECT_THROW(tight.encode1(3.0), Overflow);
}

TEST(FixedPoint, SignEmbeddingRoundtripsThroughExponent) {
    // negative values embed as p - |v| in the exponent; BSGS recovers the sign
    FixedPointCodec codec;
    int64_t enc = codec.encode1(-0.5);
    Gt base = pairing(g1_generator(), g2_generator());
    Gt target = base.pow(Fr::from_i64(enc).v);
    BsgsSolver solver;
    EXPECT_EQ(solver.solve_signed(base, target, 1 << 12), -50);
}

TEST(TrustScore, SpecExamples) {
    TrustScore a = trust_score({100, 200}, {100, 200});
    EXPECT_EQ(a.y_hat, 100);
    EXPECT_EQ(a.rho, 0);

    TrustScore b = trust_score({100, 0}, {0, 100});
    EXPECT_EQ(b.y_hat, 0);

    TrustScore c = trust_score({200, 0}, {100, 100});
    EXPECT_EQ(c.y_hat, 50);
    EXPECT_EQ(c.rho, 0);
}

TEST(TrustScore, NegativeCorrelationGatesToZero) {
    TrustScore ts = trust_score({100, 50}, {-100, -50});
    EXPECT_LT(ts.q_signed, 0);
    EXPECT_EQ(ts.y_hat, 0);
    // residual of the signed floor stays canonical
    EXPECT_GE(ts.rho, 0);
    EXPECT_LT(ts.rho, ts.den);
    EXPECT_EQ(100 * ts.num, ts.q_signed * ts.den + ts.rho);
    EXPECT_THROW(trust_score({0, 0}, {1, 1}), DegenerateModel);
}

TEST(Aggregate, Examples) {
    std::vector<ModelVector> models{{10, 20}, {30, -40}};
    std::vector<TrustScore> zero{trust_score({1, 0}, {0, 1}), trust_score({0, 1}, {1, 0})};
    EXPECT_EQ(aggregate_plain(models, zero), (ModelVector{0, 0}));

    std::vector<ModelVector> one{{7, -3}};
    std::vector<TrustScore> full{trust_score({7, -3}, {7, -3})};
    ASSERT_EQ(full[0].y_hat, 100);
    EXPECT_EQ(aggregate_plain(one, full), (ModelVector{700, -300}));
}

TEST(Aggregate, MatchesManualWeightedSum) {
    Rng rng(1);
    for (int trial = 0; trial < 20; trial++) {
        std::vector<ModelVector> models;
        std::vector<TrustScore> scores;
        ModelVector w0(6);
        for (auto& v : w0) v = static_cast<int64_t>(rng.below(400)) - 200;
        for (int i = 0; i < 3; i++) {
            ModelVector w(6);
            for (auto& v : w) v = static_cast<int64_t>(rng.below(400)) - 200;
            if (dot(w, w) == 0) w[0] = 1;
            models.push_back(w);
            scores.push_back(trust_score(w, w0));
        }
        ModelVector got = aggregate_plain(models, scores);
        for (int j = 0; j < 6; j++) {
            int64_t want = 0;
            for (int i = 0; i < 3; i++) want += scores[i].y_hat * models[i][j];
            EXPECT_EQ(got[j], want);
        }
    }
}

TEST(Normalize, Examples) {
    FixedPointCodec codec;
    // W* equal to W0 (at the combined scale) keeps W0
    ModelVector w0{100, 200};  // floats (1, 2)
    ModelVector star{100 * 100 * 100, 200 * 100 * 100};
    auto r = normalize(star, w0, codec);
    EXPECT_FALSE(r.degenerate);
    EXPECT_EQ(r.model, w0);

    // W* float (300, 400) against ||W0|| = 1 scales to (0.6, 0.8)
    ModelVector w0_unit{100, 0};
    ModelVector star2{300 * 10000, 400 * 10000};
    auto r2 = normalize(star2, w0_unit, codec);
    EXPECT_EQ(r2.model, (ModelVector{60, 80}));

    // all-gated round: fall back to the baseline and flag it
    auto r3 = normalize(ModelVector{0, 0}, w0, codec);
    EXPECT_TRUE(r3.degenerate);
    EXPECT_EQ(r3.model, w0);
}

TEST(Normalize, NormBandProperty) {
    FixedPointCodec codec;
    Rng rng(2);
    for (int trial = 0; trial < 50; trial++) {
        size_t m = 2 + rng.below(14);
        ModelVector w0(m), star(m);
        for (auto& v : w0) v = static_cast<int64_t>(rng.below(1200)) - 600;
        for (auto& v : star) v = static_cast<int64_t>(rng.below(2000000)) - 1000000;
        double n0 = 0;
        for (auto v : w0) n0 += double(v) * v / (100.0 * 100.0);
        n0 = std::sqrt(n0);
        if (n0 < 2.0) {
            w0[0] += 600;
            n0 = 0;
            for (auto v : w0) n0 += double(v) * v / (100.0 * 100.0);
            n0 = std::sqrt(n0);
        }
        bool all_zero = std::all_of(star.begin(), star.end(), [](int64_t v) { return v == 0; });
        if (all_zero) star[0] = 12345;
        auto r = normalize(star, w0, codec);
        double nr = 0;
        for (auto v : r.model) nr += double(v) * v / (100.0 * 100.0);
        nr = std::sqrt(nr);
        EXPECT_GE(nr, n0 * (1 - 2.0 / 100));
        EXPECT_LE(nr, n0 * (1 + 2.0 / 100));
    }
}

TEST(Relu, RationalExamples) {
    EXPECT_EQ(relu(mpq_class(-3)), 0);
    EXPECT_EQ(relu(mpq_class(0)), 0);
    EXPECT_EQ(relu(mpq_class(7, 2)), mpq_class(7, 2));
}

TEST(TrustScore, ScaleAttackNeutralization) {
    Rng rng(3);
    for (int trial = 0; trial < 30; trial++) {
        ModelVector w(8), w0(8);
        for (auto& v : w) v = static_cast<int64_t>(rng.below(200)) - 100;
        for (auto& v : w0) v = static_cast<int64_t>(rng.below(200)) - 100;
        if (dot(w, w) == 0) w[0] = 3;
        if (dot(w, w0) <= 0) continue;  // gate handles the rest
        for (int64_t c : {2, 5, 10}) {
            ModelVector cw(8);
            for (int j = 0; j < 8; j++) cw[j] = c * w[j];
            TrustScore base = trust_score(w, w0);
            TrustScore scaled = trust_score(cw, w0);
            // ratio scales by 1/c exactly
            EXPECT_EQ(scaled.ratio() * c, base.ratio());
            // contribution shift bounded by quantization slack
            int64_t winf = 0;
            for (auto v : w) winf = std::max<int64_t>(winf, std::llabs(v));
            for (int j = 0; j < 8; j++) {
                // contributions in decoded units: y_hat * w / s_y
                double diff = std::fabs(double(scaled.y_hat) * double(cw[j]) -
                                        double(base.y_hat) * double(w[j])) /
                              100.0;
                EXPECT_LE(diff, double(c) * double(winf) / 100.0 + 1e-9);
            }
        }
    }
}

TEST(TrustScore, ReluGateZeroContribution) {
    Rng rng(4);
    for (int trial = 0; trial < 30; trial++) {
        ModelVector w0(6), w(6);
        for (auto& v : w0) v = static_cast<int64_t>(rng.below(200)) - 100;
        for (int j = 0; j < 6; j++) w[j] = -w0[j];  // anti-correlated
        if (dot(w, w) == 0) continue;
        TrustScore ts = trust_score(w, w0);
        EXPECT_EQ(ts.y_hat, 0);
        ModelVector agg = aggregate_plain({w}, {ts});
        EXPECT_EQ(agg, ModelVector(6, 0));
    }
}
