#include "test_support.hpp"

namespace qrd {
namespace {

using testing::kind_of;

bool is_state(const HermitianOperator& a) {
    return std::abs(a.trace() - 1) <= 1e-10 && a.min_eigenvalue() >= -1e-10;
}

TEST(GenA2, OverlapIdentityAndStates) {
    for (long long n : {1LL, 5LL, 12LL, 20LL}) {
        const StatePair s = gen_a2(1, n);
        EXPECT_TRUE(is_state(s.rho));
        EXPECT_TRUE(is_state(s.sigma));
        EXPECT_LE(s.identity_residual, 1e-10) << n;
    }
}

TEST(GenA2, DmaxDecreasesAlongSchedule) {
    double prev = INFINITY;
    for (long long n = 5; n <= 20; ++n) {
        const StatePair s = gen_a2(1, n);
        const double v = d_max(s.rho, s.sigma).value();
        EXPECT_LT(v, prev) << n;
        prev = v;
    }
    EXPECT_LT(prev, 0.05);
}

TEST(GenA2, PetzValueGrowsAboveThreshold) {
    double prev = 0;
    for (long long n : {5LL, 10LL, 15LL, 20LL}) {
        const StatePair s = gen_a2(1, n);
        const double v = d_alpha_z(s.rho, s.sigma, DivergenceParams::finite(3.5, 1)).d_value.value();
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(GenA2, CustomSchedule) {
    const StatePair s = gen_a2(0.5, 3, [](long long n) { return 1 - 1.0 / (n + 1); });
    EXPECT_LE(s.identity_residual, 1e-10);
    EXPECT_EQ(kind_of([] { gen_a2(1, 3, [](long long) { return 1.5; }); }), ErrorKind::BadParams);
}

TEST(GenPure, ClosedFormAndLimits) {
    EXPECT_NEAR(d_max(gen_pure(1, 1e-6).rho, gen_pure(1, 1e-6).sigma).value(), std::log(2.0), 1e-5);
    const StatePair c2 = gen_pure(2, 1e-7);
    EXPECT_NEAR(d_max(c2.rho, c2.sigma).value(), std::log(1.5), 1e-5);
    const StatePair s = gen_pure(1, 0.1);
    EXPECT_LE(s.identity_residual, 1e-12);
    EXPECT_NEAR(d_alpha_z(s.rho, s.sigma, DivergenceParams::finite(2, 1)).d_value.value(), d_max(s.rho, s.sigma).value(),
                1e-9);
    EXPECT_EQ(gen_pure(1, 0).identity_residual, 0.0);
    EXPECT_EQ(kind_of([] { gen_pure(2, 0.6); }), ErrorKind::BadParams);
}

TEST(GenKappa, LogLambdaLimit) {
    const StatePair s = gen_kappa(1, 2, 1e-6, 2);
    EXPECT_NEAR(d_alpha_z(s.rho, s.sigma, DivergenceParams::finite(2, 1)).d_value.value(), std::log(2.0), 1e-3);
    EXPECT_NEAR(d_max(s.rho, s.sigma).value(), std::log(2.0), 1e-5);
}

TEST(GenKappa, SmallKappaDmaxGrows) {
    double prev = 0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const StatePair s = gen_kappa(0.5, 2, eps, 2);
        const double v = d_max(s.rho, s.sigma).value();
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(GenKappa, EmbeddingResiduals) {
    for (int dim : {2, 3, 4}) {
        const StatePair s = gen_kappa(0.7, 3, 1e-3, dim);
        EXPECT_EQ(s.rho.dim(), dim);
        EXPECT_TRUE(is_state(s.rho));
        EXPECT_TRUE(is_state(s.sigma));
        EXPECT_LE(s.identity_residual, 1e-9) << dim;
    }
}

TEST(GenAppE, ClosedFormsAtHalf) {
    const StatePair s = gen_appE(0.5, 1e-5);
    EXPECT_LE(s.identity_residual, 1e-9);
    EXPECT_NEAR(d_max(s.rho, s.sigma).value(), std::log((1.5 + std::sqrt(1.25)) / 2), 1e-3);
    EXPECT_GE(q_alpha_z(s.rho, s.sigma, DivergenceParams::finite(2, 1)).value(), 1.25 - 1e-3);
}

TEST(GenAppE, StatesConvergeToTheSameProjector) {
    const StatePair s = gen_appE(0.3, 1e-7);
    const HermitianOperator e0 = testing::diag2(1, 0);
    EXPECT_LT(testing::max_abs_diff(s.rho, e0), 1e-5);
    EXPECT_LT(testing::max_abs_diff(s.sigma, e0), 1e-5);
}

TEST(FamilySpec, TagsRoundTrip) {
    for (const char* name : {"a2", "pure", "kappa", "appE", "knife"})
        EXPECT_EQ(FamilySpec::tag_name(FamilySpec::parse_tag(name)), name);
    EXPECT_EQ(kind_of([] { FamilySpec::parse_tag("nope"); }), ErrorKind::BadParams);
}

TEST(FamilySpec, GenerateDispatches) {
    FamilySpec spec;
    spec.tag = FamilySpec::Tag::Knife;
    spec.c = spec.d = 1;
    spec.beta = 1;
    spec.gamma = 2;
    const StatePair s = generate(spec, 1000);
    EXPECT_NEAR(s.rho.min_eigenvalue(), 1e-3, 1e-15);
    EXPECT_NEAR(s.sigma.min_eigenvalue(), 1e-6, 1e-18);
}

} // namespace
} // namespace qrd
