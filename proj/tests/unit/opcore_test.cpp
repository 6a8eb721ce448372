#include "test_support.hpp"

namespace qrd {
namespace {

using testing::diag2;
using testing::kind_of;
using testing::max_abs_diff;

TEST(HermitianOperator, RejectsNonHermitianInput) {
    Matrix m(2, 2);
    m << 1, 0.5, 0, 1;
    EXPECT_EQ(kind_of([&] { HermitianOperator h(m); }), ErrorKind::MalformedInput);
}

TEST(HermitianOperator, SymmetrizesTinyAntiHermitianNoise) {
    Matrix m(2, 2);
    m << 1, Complex(0.5, 1e-13), Complex(0.5, 0), 1;
    HermitianOperator h(m);
    EXPECT_NEAR(h.matrix()(0, 1).imag(), 5e-14, 1e-20);
    EXPECT_NEAR(h.max_eigenvalue(), 1.5, 1e-12);
}

TEST(SupportedPower, IdentityIsFixed) {
    EXPECT_LT(max_abs_diff(supported_power(HermitianOperator::identity(3), -3), HermitianOperator::identity(3)), 1e-14);
}

TEST(SupportedPower, ActsOnSupportOnly) {
    EXPECT_LT(max_abs_diff(supported_power(diag2(4, 0), 0.5), diag2(2, 0)), 1e-14);
}

TEST(SupportedPower, ZeroesBelowCutoff) {
    EXPECT_LT(max_abs_diff(supported_power(diag2(9, 1e-20), -1), diag2(1.0 / 9, 0)), 1e-15);
}

TEST(SupportedPower, ZeroExponentGivesSupportProjection) {
    Rng rng = make_rng(3);
    const HermitianOperator a = random_state(3, rng, 2);
    EXPECT_LT(max_abs_diff(supported_power(a, 0), support_projection(a).op()), 1e-12);
}

TEST(SupportedPower, InversePairGivesSupportProperty) {
    Rng rng = make_rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator a = random_state(3, rng, 1 + trial % 3);
        const double x = uniform(rng, -2, 2);
        const Matrix prod = supported_power(a, -x).matrix() * supported_power(a, x).matrix();
        EXPECT_LT((prod - support_projection(a).op().matrix()).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(SupportedPower, NegativeEigenvalueIsNotPsd) {
    EXPECT_EQ(kind_of([] { supported_power(diag2(1, -0.1), 0.5); }), ErrorKind::NotPSD);
}

TEST(SupportedPower, RoundingNegativesAreClamped) {
    EXPECT_NO_THROW(supported_power(diag2(1, -1e-11), 0.5));
}

TEST(SupportProjection, Examples) {
    EXPECT_EQ(support_projection(HermitianOperator::zero(2)).rank(), 0);
    Rng rng = make_rng(5);
    EXPECT_LT(max_abs_diff(support_projection(random_invertible_state(3, rng)).op(), HermitianOperator::identity(3)),
              1e-10);
    const HermitianOperator v = testing::ket_projector(random_unit_vector(3, rng));
    EXPECT_LT(max_abs_diff(support_projection(v).op(), v), 1e-10);
}

TEST(ProjectionMeet, Examples) {
    Rng rng = make_rng(6);
    const Projection p = support_projection(random_state(3, rng, 2));
    EXPECT_LT(max_abs_diff(projection_meet(p, p).op(), p.op()), 1e-10);
    EXPECT_EQ(projection_meet(support_projection(diag2(1, 0)), support_projection(diag2(0, 1))).rank(), 0);
    const Projection full = support_projection(HermitianOperator::identity(3));
    EXPECT_LT(max_abs_diff(projection_meet(full, p).op(), p.op()), 1e-10);
}

TEST(ProjectionMeet, IntersectionOfTwoPlanesIsALine) {
    // span{e0, e1} and span{e1, e2} in C^3 meet in span{e1}
    const Projection a = support_projection(testing::diag3(1, 1, 0));
    const Projection b = support_projection(testing::diag3(0, 1, 1));
    const Projection m = projection_meet(a, b);
    ASSERT_EQ(m.rank(), 1);
    EXPECT_NEAR(std::abs(m.op().matrix()(1, 1)), 1.0, 1e-10);
}

TEST(PsdLeq, Examples) {
    Rng rng = make_rng(7);
    const HermitianOperator rho = random_state(3, rng);
    EXPECT_TRUE(psd_leq(rho, rho.scaled(2)));
    EXPECT_FALSE(psd_leq(diag2(1, 0), diag2(0, 1)));
}

TEST(PsdLeq, OptimalLambdaFromDmax) {
    const StatePair pair = gen_pure(1, 0.25);
    const double lambda = std::exp(d_max(pair.rho, pair.sigma).value());
    EXPECT_TRUE(psd_leq(pair.rho, pair.sigma.scaled(lambda + 1e-6)));
    EXPECT_FALSE(psd_leq(pair.rho, pair.sigma.scaled(lambda - 1e-3)));
}

TEST(Logn, Examples) {
    EXPECT_LT(logn(HermitianOperator::identity(2)).matrix().cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT(max_abs_diff(logn(diag2(std::exp(1.0), 0)), diag2(1, 0)), 1e-14);
    Rng rng = make_rng(8);
    const HermitianOperator p = support_projection(random_state(3, rng, 2)).op();
    EXPECT_LT(max_abs_diff(logn(p.scaled(std::exp(1.0))), p), 1e-10);
}

TEST(PinchExp, Examples) {
    const HermitianOperator half = diag2(0.5, 0.5);
    EXPECT_NEAR(pinch_exp(half, half, 2).value(), 1.0, 1e-14);
    EXPECT_NEAR(pinch_exp(diag2(0.75, 0.25), half, 2).value(), 1.25, 1e-14);
    EXPECT_TRUE(pinch_exp(diag2(0.5, 0.5), diag2(1, 0), 1.5).is_infinite());
}

TEST(PinchExp, EmptyMeetForSmallAlphaIsZero) {
    EXPECT_EQ(pinch_exp(diag2(1, 0), diag2(0, 1), 0.5).value(), 0.0);
}

TEST(TracePower, Examples) {
    EXPECT_NEAR(trace_power(HermitianOperator::identity(4), 2.7), 4.0, 1e-13);
    EXPECT_NEAR(trace_power(diag2(4, 1), 0.5), 3.0, 1e-14);
    EXPECT_EQ(kind_of([] { trace_power(diag2(1, 1), 0); }), ErrorKind::BadParams);
}

// Compression by a projection never increases Tr A^z.
TEST(TracePower, CompressionInequality) {
    Rng rng = make_rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + trial % 3;
        const HermitianOperator a = random_state(d, rng);
        const Projection p = support_projection(random_state(d, rng, 1 + trial % (d - 1)));
        const HermitianOperator pap(Matrix(p.op().matrix() * a.matrix() * p.op().matrix()));
        for (double z : {0.3, 1.0, 2.5})
            EXPECT_LE(trace_power(pap, z), trace_power(a, z) * (1 + 1e-12) + 1e-15);
    }
}

TEST(GradedSpectrum, MatchesDenseProductAtModerateExponents) {
    Rng rng = make_rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator a = random_state(3, rng), b = random_invertible_state(3, rng);
        const double p = uniform(rng, 0.2, 2), q = uniform(rng, -2, 1);
        const Matrix ap = supported_power(a, p).matrix();
        const HermitianOperator dense(Matrix(ap * supported_power(b, q).matrix() * ap));
        const std::vector<double> logs = graded_sandwich_log_spectrum(a, p, b, q);
        for (int i = 0; i < 3; ++i) {
            const double expected = dense.eigenvalues()(i);
            if (expected > 1e-8 * dense.max_eigenvalue())
                EXPECT_NEAR(std::exp(logs[i]), expected, 1e-9 * dense.max_eigenvalue());
        }
    }
}

TEST(GradedSpectrum, KeepsRelativeAccuracyForHugeExponents) {
    // Commuting diagonal case: eigenvalues are a_i^{2p} b_i^{q} exactly.
    const HermitianOperator a = testing::diag3(0.6, 0.3, 0.1), b = testing::diag3(0.2, 0.5, 0.3);
    const std::vector<double> logs = graded_sandwich_log_spectrum(a, 250, b, -400);
    std::vector<double> expected{500 * std::log(0.6) - 400 * std::log(0.2), 500 * std::log(0.3) - 400 * std::log(0.5),
                                 500 * std::log(0.1) - 400 * std::log(0.3)};
    std::sort(expected.begin(), expected.end(), std::greater<double>());
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(logs[i], expected[i], 1e-9 * std::abs(expected[i]));
}

TEST(Kron, DimensionsAndTensorPower) {
    const HermitianOperator a = diag2(0.25, 0.75);
    const HermitianOperator t = tensor_power(a, 3);
    EXPECT_EQ(t.dim(), 8);
    EXPECT_NEAR(t.trace(), 1.0, 1e-14);
    EXPECT_NEAR(t.max_eigenvalue(), 0.75 * 0.75 * 0.75, 1e-14);
    EXPECT_EQ(kind_of([&] { tensor_power(a, 0); }), ErrorKind::BadParams);
}

TEST(TraceProduct, MatchesMatrixTrace) {
    Rng rng = make_rng(11);
    const HermitianOperator a = random_state(3, rng), b = random_state(3, rng);
    EXPECT_NEAR(trace_product(a, b), (a.matrix() * b.matrix()).trace().real(), 1e-14);
}

} // namespace
} // namespace qrd
