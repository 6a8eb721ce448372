#include "test_support.hpp"

namespace qrd {
namespace {

using testing::kind_of;

WeightVector w(std::initializer_list<double> v) { return WeightVector(std::vector<double>(v)); }

TEST(ClassicalRenyi, EqualWeightsGiveZero) {
    for (double alpha : {0.3, 1.0, 2.0, 7.0}) EXPECT_NEAR(classical_renyi(w({0.5, 0.5}), w({0.5, 0.5}), alpha).value(), 0, 1e-15);
}

TEST(ClassicalRenyi, DirectFormula) {
    EXPECT_NEAR(classical_renyi(w({0.75, 0.25}), w({0.5, 0.5}), 2).value(), std::log(1.25), 1e-15);
}

TEST(ClassicalRenyi, UnsupportedMassIsInfiniteAboveOne) {
    EXPECT_TRUE(classical_renyi(w({1, 1e-3}), w({1, 0}), 2).is_infinite());
    EXPECT_TRUE(classical_renyi(w({1, 1e-3}), w({1, 0}), 1).is_infinite());
    EXPECT_TRUE(classical_renyi(w({1, 1e-3}), w({1, 0}), 0.5).is_finite());
}

TEST(ClassicalRenyi, KullbackLeiblerAtOne) {
    const double expected = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);
    EXPECT_NEAR(classical_renyi(w({0.75, 0.25}), w({0.5, 0.5}), 1).value(), expected, 1e-15);
}

TEST(ClassicalRenyi, NormalizesByMass) {
    // Scaling p by t shifts D by log t.
    const double base = classical_renyi(w({0.6, 0.4}), w({0.3, 0.7}), 1.7).value();
    EXPECT_NEAR(classical_renyi(w({1.2, 0.8}), w({0.3, 0.7}), 1.7).value(), base + std::log(2.0), 1e-14);
}

TEST(ClassicalRenyi, Errors) {
    EXPECT_EQ(kind_of([] { classical_renyi(w({1, 0}), w({0.5, 0.5}), 0); }), ErrorKind::BadAlpha);
    EXPECT_EQ(kind_of([] { classical_renyi(w({1, 0}), w({1}), 2); }), ErrorKind::DimMismatch);
    EXPECT_EQ(kind_of([] { w({-0.1, 1}); }), ErrorKind::BadParams);
    EXPECT_EQ(kind_of([] { w({0, 0}); }), ErrorKind::ZeroOperator);
}

TEST(ClassicalRenyi, MonotoneInAlpha) {
    Rng rng = make_rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> p(4), q(4);
        for (int i = 0; i < 4; ++i) {
            p[i] = uniform(rng, 0.01, 1);
            q[i] = uniform(rng, 0.01, 1);
        }
        double prev = -1e300;
        for (double alpha : {0.2, 0.5, 0.9, 1.0, 1.3, 2.0, 5.0}) {
            const double v = classical_renyi(WeightVector(p), WeightVector(q), alpha).value();
            EXPECT_GE(v, prev - 1e-12);
            prev = v;
        }
    }
}

TEST(Perspective, Examples) {
    const ConvexFunctionSpec square = ConvexFunctionSpec::power(2);
    EXPECT_NEAR(perspective(square, 2, 1).value(), 4, 1e-15);
    EXPECT_TRUE(perspective(square, 1, 0).is_infinite());
    EXPECT_EQ(perspective(ConvexFunctionSpec::eta(), 0, 5).value(), 0.0);
    EXPECT_EQ(perspective(square, 0, 0).value(), 0.0);
}

TEST(Perspective, SubOneBranchIsNegativeAndHomogeneous) {
    const ConvexFunctionSpec half = ConvexFunctionSpec::power(0.5);
    EXPECT_NEAR(perspective(half, 4, 1).value(), -2, 1e-15);
    EXPECT_NEAR(perspective(half, 8, 2).value(), 2 * perspective(half, 4, 1).value(), 1e-14);
    EXPECT_EQ(perspective(half, 3, 0).value(), 0.0);
}

TEST(ClassicalFdiv, Examples) {
    EXPECT_NEAR(classical_fdiv(ConvexFunctionSpec::power(2), w({0.2, 0.8}), w({0.2, 0.8})).value(), 1.0, 1e-15);
    EXPECT_NEAR(classical_fdiv(ConvexFunctionSpec::eta(), w({0.75, 0.25}), w({0.5, 0.5})).value(),
                0.75 * std::log(1.5) + 0.25 * std::log(0.5), 1e-15);
    EXPECT_TRUE(classical_fdiv(ConvexFunctionSpec::power(1.5), w({0.5, 0.5}), w({1, 0})).is_infinite());
}

TEST(ClassicalFdiv, CustomFunction) {
    const auto f = ConvexFunctionSpec::custom_function([](double t) { return (t - 1) * (t - 1); }, 1.0,
                                                       ExtendedReal::infinity());
    // chi-squared divergence
    EXPECT_NEAR(classical_fdiv(f, w({0.75, 0.25}), w({0.5, 0.5})).value(), 0.25, 1e-15);
}

TEST(ClassicalFdiv, DataProcessingUnderMerging) {
    Rng rng = make_rng(22);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> p(3), q(3);
        for (int i = 0; i < 3; ++i) {
            p[i] = uniform(rng, 0.01, 1);
            q[i] = uniform(rng, 0.01, 1);
        }
        const WeightVector merged_p({p[0] + p[1], p[2]}), merged_q({q[0] + q[1], q[2]});
        for (const auto& f : {ConvexFunctionSpec::power(2), ConvexFunctionSpec::power(0.4), ConvexFunctionSpec::eta()})
            EXPECT_LE(classical_fdiv(f, merged_p, merged_q).value(),
                      classical_fdiv(f, WeightVector(p), WeightVector(q)).value() + 1e-12);
    }
}

TEST(KnifeEdge, CriticalRatioTendsToClosedForm) {
    // beta / gamma = 1 - 1/alpha at alpha = 2
    const auto [p, q] = knife_edge_family(1, 1, 1, 2, 1000000);
    EXPECT_NEAR(classical_renyi(p, q, 2).value(), std::log(2.0), 1e-5);
    const auto [p3, q3] = knife_edge_family(2, 1, 1, 1.5, 1000000);  // alpha = 3
    EXPECT_NEAR(classical_renyi(p3, q3, 3).value(), 0.5 * std::log(1 + 8.0), 1e-3);
}

TEST(KnifeEdge, AboveCriticalVanishes) {
    const auto [p, q] = knife_edge_family(1, 1, 1, 1, 1000000);
    EXPECT_LT(classical_renyi(p, q, 2).value(), 1e-5);
}

TEST(KnifeEdge, BelowCriticalGrows) {
    double prev = 0;
    for (long long n : {10LL, 1000LL, 100000LL}) {
        const auto [p, q] = knife_edge_family(1, 1, 0.5, 2, n);
        const double v = classical_renyi(p, q, 2).value();
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(KnifeEdge, Errors) {
    EXPECT_EQ(kind_of([] { knife_edge_family(0, 1, 1, 1, 5); }), ErrorKind::BadParams);
    EXPECT_EQ(kind_of([] { knife_edge_family(2, 1, 1, 1, 1); }), ErrorKind::BadParams);
}

} // namespace
} // namespace qrd
