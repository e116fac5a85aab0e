#include <gtest/gtest.h>

#include "vfefl/classgroup.hpp"
#include "testutil.hpp"

using namespace vfefl;
using namespace vfefl::cl;

namespace {
const ClassGroupParams& P() { return test::shared_class_group(); }
}  // namespace

TEST(ClassGroupGen, SubgroupOrderAndShape) {
    EXPECT_TRUE(form_exp(P().f, P().p).is_identity());
    EXPECT_FALSE(P().f.is_identity());
    EXPECT_TRUE(P().f.is_reduced());
    EXPECT_TRUE(P().in_group(P().h_p));
    EXPECT_GT(P().companion, 4 * P().p);
    EXPECT_EQ(P().disc_k % 4, 1 - 4);  // dK = 1 mod 4, negative
}

TEST(ClassGroupGen, SeededDeterminism) {
    Rng r1(99), r2(99);
    ClassGroupParams a = cl_gen(Profile::Test, bls_r(), r1);
    ClassGroupParams b = cl_gen(Profile::Test, bls_r(), r2);
    ByteWriter wa, wb;
    cl_params_write(wa, a);
    cl_params_write(wb, b);
    EXPECT_EQ(wa.data(), wb.data());
}

TEST(ClassGroupGen, RetryBudgetSurfacesAsError) {
    Rng rng(1);
    EXPECT_THROW(cl_gen(Profile::Test, bls_r(), rng, 0), SetupError);
}

TEST(ClassGroupGen, ParamsSerializationRoundtrip) {
    ByteWriter w;
    cl_params_write(w, P());
    ByteReader r(w.data());
    ClassGroupParams q = cl_params_read(r);
    EXPECT_TRUE(q.f == P().f && q.h_p == P().h_p && q.h_hat_p == P().h_hat_p);
    EXPECT_EQ(q.dp_bound, P().dp_bound);
}

TEST(Solve, ForwardExponentiationOracle) {
    Rng rng(10);
    for (int i = 0; i < 100; i++) {
        mpz_class m = rng.mpz_below(P().p);
        EXPECT_EQ(cl_solve(P(), form_exp(P().f, m)), m);
    }
}

TEST(Solve, IdentityAndRejects) {
    EXPECT_EQ(cl_solve(P(), P().identity()), 0);
    EXPECT_THROW(cl_solve(P(), form_exp(P().h_hat_p, mpz_class(7))), NotInF);
    Rng rng(11);
    EXPECT_THROW(cl_solve(P(), form_exp(P().h_p, sample_dp(P(), rng))), NotInF);
}

TEST(Solve, Homomorphism) {
    Rng rng(12);
    for (int i = 0; i < 20; i++) {
        mpz_class a = rng.mpz_below(P().p), b = rng.mpz_below(P().p);
        QuadForm prod = form_compose(form_exp(P().f, a), form_exp(P().f, b));
        EXPECT_EQ(cl_solve(P(), prod), (a + b) % P().p);
    }
}

TEST(FormArithmetic, ExpExamples) {
    QuadForm x = form_exp(P().h_p, mpz_class(987654));
    EXPECT_TRUE(form_exp(x, 0).is_identity());
    EXPECT_TRUE(form_exp(x, 1) == x);
    QuadForm lhs = form_exp(x, mpz_class(123 + 456));
    QuadForm rhs = form_compose(form_exp(x, mpz_class(123)), form_exp(x, mpz_class(456)));
    EXPECT_TRUE(lhs == rhs);
    EXPECT_TRUE(form_compose(x, x.inverse()).is_identity());
}

TEST(FormArithmetic, CompositionsStayReduced) {
    Rng rng(13);
    QuadForm z = P().h_p;
    for (int i = 0; i < 50; i++) {
        z = form_compose(z, form_exp(P().h_p, rng.mpz_below(mpz_class(1) << 64)));
        EXPECT_TRUE(z.is_reduced());
        EXPECT_EQ(z.disc(), P().disc_p);
    }
}

TEST(FormArithmetic, FastComposeMatchesReferenceOracle) {
    Rng rng(14);
    QuadForm a = form_exp(P().h_p, rng.mpz_below(P().p));
    for (int i = 0; i < 200; i++) {
        QuadForm b = form_exp(P().h_p, rng.mpz_below(P().p));
        QuadForm fast = form_compose(a, b);
        QuadForm ref = form_compose_reference(a, b);
        EXPECT_TRUE(fast == ref);
        // f-coset elements exercise the e > 1 branches
        QuadForm fa = form_compose(a, form_exp(P().f, rng.mpz_below(P().p)));
        EXPECT_TRUE(form_compose(fa, b) == form_compose_reference(fa, b));
        a = fast;
    }
}

TEST(FormArithmetic, SerializationRoundtrip) {
    Rng rng(15);
    QuadForm x = form_exp(P().h_p, rng.mpz_below(P().p));
    Bytes b = qf_bytes(x);
    ByteReader r(b);
    EXPECT_TRUE(qf_read(r) == x);
}

TEST(Distributions, DpBoundsAndMean) {
    Rng rng(16);
    mpz_class sum = 0;
    const int N = 10000;
    for (int i = 0; i < N; i++) {
        mpz_class s = sample_dp(P(), rng);
        ASSERT_GE(s, 0);
        ASSERT_LE(s, P().dp_bound);
        sum += s;
    }
    // empirical mean within 5% of S/2
    mpz_class half_n = P().dp_bound * N / 2;
    mpz_class diff = sum > half_n ? sum - half_n : half_n - sum;
    EXPECT_LT(diff * 20, P().dp_bound * N);
}

TEST(Distributions, DBoundAndSeededReproducibility) {
    Rng rng(17);
    for (int i = 0; i < 100; i++) {
        mpz_class s = sample_d(P(), rng);
        ASSERT_LE(s, P().p * P().dp_bound);
    }
    Rng a(18), b(18);
    for (int i = 0; i < 10; i++) EXPECT_EQ(sample_dp(P(), a), sample_dp(P(), b));
}

TEST(HsmStructure, ProjectionRecoversFComponent) {
    // h = f * h_p; stripping the h_p component of h^x leaves f^(x mod p)
    Rng rng(19);
    QuadForm h = form_compose(P().f, P().h_p);
    mpz_class x = rng.mpz_below(P().p * 3) + P().p;
    QuadForm proj = form_compose(form_exp(h, x), form_exp(P().h_p, x).inverse());
    EXPECT_EQ(cl_solve(P(), proj), x % P().p);
}
