#include "test_support.hpp"

namespace qrd {
namespace {

using testing::diag2;
using testing::kind_of;

TEST(Povm, Validation) {
    EXPECT_NO_THROW(POVM({diag2(1, 0), diag2(0, 1)}));
    EXPECT_EQ(kind_of([] { POVM({diag2(1, 0), diag2(0, 0.9)}); }), ErrorKind::BadParams);
    EXPECT_EQ(kind_of([] { POVM({diag2(1.2, 0.5), diag2(-0.2, 0.5)}); }), ErrorKind::NotPSD);
}

TEST(ApplyPovm, Examples) {
    const WeightVector w = apply_povm(POVM({diag2(1, 0), diag2(0, 1)}), diag2(0.75, 0.25));
    EXPECT_NEAR(w[0], 0.75, 1e-15);
    EXPECT_NEAR(w[1], 0.25, 1e-15);
    const HermitianOperator rho = testing::fixed_rho().scaled(0.3);
    EXPECT_NEAR(apply_povm(POVM({HermitianOperator::identity(2)}), rho)[0], 0.3, 1e-14);
}

TEST(ApplyPovm, RandomBasisPreservesMass) {
    Rng rng = make_rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const HermitianOperator rho = random_state(3, rng).scaled(uniform(rng, 0.1, 2));
        EXPECT_NEAR(apply_povm(POVM::from_basis(random_unitary(3, rng)), rho).total(), rho.trace(), 1e-12);
    }
}

TEST(MeasuredRenyi, CommutingPairReachesClassicalValue) {
    const HermitianOperator rho = testing::diag3(0.5, 0.3, 0.2), sigma = testing::diag3(0.2, 0.2, 0.6);
    for (double alpha : {0.5, 2.0, 3.0}) {
        const double classical =
            classical_renyi(WeightVector({0.5, 0.3, 0.2}), WeightVector({0.2, 0.2, 0.6}), alpha).value();
        EXPECT_NEAR(measured_renyi_lower(rho, sigma, alpha, 2, 1).value.value(), classical, 1e-4);
    }
}

TEST(MeasuredRenyi, EqualStatesGiveZero) {
    const HermitianOperator rho = testing::fixed_rho();
    EXPECT_NEAR(measured_renyi_lower(rho, rho, 2, 2, 1).value.value(), 0, 1e-10);
}

TEST(MeasuredRenyi, ValueIsReproducedByPovm) {
    const HermitianOperator rho = testing::fixed_rho(), sigma = testing::fixed_sigma();
    const MeasuredResult r = measured_renyi_lower(rho, sigma, 2, 3, 7);
    const double replay = classical_renyi(apply_povm(r.povm, rho), apply_povm(r.povm, sigma), 2).value();
    EXPECT_NEAR(replay, r.value.value(), 1e-12);
}

TEST(MeasuredRenyi, DeterministicForSeed) {
    const HermitianOperator rho = testing::fixed_rho(), sigma = testing::fixed_sigma();
    EXPECT_EQ(measured_renyi_lower(rho, sigma, 1.5, 3, 9).value.value(),
              measured_renyi_lower(rho, sigma, 1.5, 3, 9).value.value());
}

// Property: measured and test-measured values never exceed the sandwiched divergence.
TEST(MeasuredRenyi, BelowSandwiched) {
    Rng rng = make_rng(62);
    for (int trial = 0; trial < 8; ++trial) {
        const HermitianOperator rho = random_state(2, rng), sigma = random_invertible_state(2, rng);
        for (double alpha : {0.5, 0.8, 2.0}) {
            const double sandwiched = d_alpha_z(rho, sigma, DivergenceParams::finite(alpha, alpha)).d_value.value();
            const double measured = measured_renyi_lower(rho, sigma, alpha, 2, trial).value.value();
            const double tested = test_measured(rho, sigma, alpha, 2, trial).value.value();
            EXPECT_LE(measured, sandwiched + 1e-9);
            EXPECT_LE(tested, sandwiched + 1e-9);
            EXPECT_LE(tested, measured + 1e-6);
        }
    }
}

TEST(MeasuredRenyi, UnsupportedMassIsInfinite) {
    EXPECT_TRUE(measured_renyi_lower(diag2(0.5, 0.5), diag2(1, 0), 2, 1, 1).value.is_infinite());
}

TEST(MeasuredRenyi, RejectsNonpositiveAlpha) {
    EXPECT_EQ(kind_of([] { measured_renyi_lower(testing::fixed_rho(), testing::fixed_sigma(), 0, 1, 1); }),
              ErrorKind::BadAlpha);
}

TEST(TestMeasured, EqualStatesGiveZero) {
    const HermitianOperator rho = testing::fixed_rho();
    EXPECT_NEAR(test_measured(rho, rho, 2, 1, 1).value.value(), 0, 1e-9);
}

TEST(TestMeasured, LargeAlphaApproachesDmaxOnCommutingPair) {
    const HermitianOperator rho = testing::diag3(0.5, 0.3, 0.2), sigma = testing::diag3(0.2, 0.2, 0.6);
    EXPECT_NEAR(test_measured(rho, sigma, 64, 2, 1).value.value(), d_max(rho, sigma).value(), 5e-2);
}

TEST(TestMeasured, TwoOutcomes) {
    EXPECT_EQ(test_measured(testing::fixed_rho(), testing::fixed_sigma(), 2, 1, 1).povm.size(), 2u);
}

TEST(RegularizedMeasured, CommutingPairIsConstant) {
    const HermitianOperator rho = diag2(0.7, 0.3), sigma = diag2(0.4, 0.6);
    const double classical = classical_renyi(WeightVector({0.7, 0.3}), WeightVector({0.4, 0.6}), 2).value();
    for (const auto& [n, v] : regularized_measured_estimate(rho, sigma, 2, 2, 1, 3))
        EXPECT_NEAR(v.value(), classical, 1e-4) << "n=" << n;
}

TEST(RegularizedMeasured, NondecreasingAndBelowSandwiched) {
    const HermitianOperator rho = testing::fixed_rho(), sigma = testing::fixed_sigma();
    const auto seq = regularized_measured_estimate(rho, sigma, 2, 2, 1, 5);
    ASSERT_EQ(seq.size(), 2u);
    EXPECT_GE(seq[1].second.value(), seq[0].second.value() - 1e-3);
    const double sandwiched = d_alpha_z(rho, sigma, DivergenceParams::finite(2, 2)).d_value.value();
    for (const auto& [n, v] : seq) EXPECT_LE(v.value(), sandwiched + 1e-9);
}

TEST(RegularizedMeasured, DimensionCap) {
    EXPECT_EQ(kind_of([] {
                  regularized_measured_estimate(testing::diag3(0.5, 0.3, 0.2), testing::diag3(0.3, 0.3, 0.4), 2, 4, 1, 1);
              }),
              ErrorKind::DimTooLarge);
}

} // namespace
} // namespace qrd
