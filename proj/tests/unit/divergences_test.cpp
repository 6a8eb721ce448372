#include "frozen_values.hpp"
#include "test_support.hpp"

namespace qrd {
namespace {

using testing::diag2;
using testing::fixed_rho;
using testing::fixed_sigma;
using testing::kind_of;
namespace frozen = testing::frozen;

double daz(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha, double z) {
    return d_alpha_z(rho, sigma, DivergenceParams::finite(alpha, z)).d_value.value();
}

TEST(DivergenceParams, Validation) {
    EXPECT_EQ(kind_of([] { DivergenceParams::finite(0, 1); }), ErrorKind::BadAlpha);
    EXPECT_EQ(kind_of([] { DivergenceParams::finite(2, 0); }), ErrorKind::BadParams);
    EXPECT_EQ(kind_of([] { DivergenceParams::finite(2, -1); }), ErrorKind::BadParams);
    EXPECT_NO_THROW(DivergenceParams::infinite(0.5));
}

TEST(QAlphaZ, Examples) {
    Rng rng = make_rng(31);
    const HermitianOperator rho = random_state(3, rng);
    EXPECT_NEAR(q_alpha_z(rho.scaled(0.4), rho.scaled(0.4), DivergenceParams::finite(1.7, 0.6)).value(), 0.4, 1e-12);
    EXPECT_NEAR(q_alpha_z(diag2(0.75, 0.25), diag2(0.5, 0.5), DivergenceParams::finite(2, 7)).value(), 1.25, 1e-13);
    EXPECT_TRUE(q_alpha_z(diag2(0.5, 0.5), diag2(1, 0), DivergenceParams::finite(2, 1)).is_infinite());
}

TEST(QAlphaZ, SymmetricFormAgrees) {
    Rng rng = make_rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator rho = random_state(3, rng), sigma = random_invertible_state(3, rng);
        // z < 1 blows up rounding in the tiny eigenvalues of the product formed here
        const double alpha = uniform(rng, 0.2, 3), z = uniform(rng, 1, 3);
        const Matrix s = supported_power(sigma, (1 - alpha) / (2 * z)).matrix();
        const HermitianOperator other(Matrix(s * supported_power(rho, alpha / z).matrix() * s));
        const double q = q_alpha_z(rho, sigma, DivergenceParams::finite(alpha, z)).value();
        EXPECT_NEAR(trace_power(other, z), q, 1e-9 * q);
    }
}

TEST(QAlphaZ, InputErrors) {
    EXPECT_EQ(kind_of([] { q_alpha_z(diag2(1, 0), testing::diag3(1, 0, 0), DivergenceParams::finite(2, 1)); }),
              ErrorKind::DimMismatch);
    EXPECT_EQ(kind_of([] { q_alpha_z(diag2(1, -0.5), diag2(1, 1), DivergenceParams::finite(2, 1)); }),
              ErrorKind::NotPSD);
    EXPECT_EQ(kind_of([] { q_alpha_z(HermitianOperator::zero(2), diag2(1, 1), DivergenceParams::finite(2, 1)); }),
              ErrorKind::ZeroOperator);
}

TEST(DAlphaZ, FrozenReferenceValues) {
    const HermitianOperator rho = fixed_rho(), sigma = fixed_sigma();
    EXPECT_NEAR(daz(rho, sigma, 2, 2), frozen::kSandwiched2, 1e-12);
    EXPECT_NEAR(daz(rho, sigma, 2, 1), frozen::kPetz2, 1e-12);
    EXPECT_NEAR(daz(rho, sigma, 0.5, 0.5), frozen::kSandwichedHalf, 1e-12);
    EXPECT_NEAR(daz(rho, sigma, 0.5, 1), frozen::kPetzHalf, 1e-12);
    EXPECT_NEAR(daz(rho, sigma, 1.5, 0.75), frozen::kAlpha15Z075, 1e-12);
    EXPECT_NEAR(daz(rho, sigma, 3, 2), frozen::kAlpha3Z2, 1e-12);
    EXPECT_NEAR(daz(rho, sigma, 0.7, 3), frozen::kAlpha07Z3, 1e-12);
    EXPECT_NEAR(d_alpha_z(rho, sigma, DivergenceParams::infinite(2)).d_value.value(), frozen::kInfZ2, 1e-12);
    EXPECT_NEAR(d_alpha_z(rho, sigma, DivergenceParams::infinite(0.5)).d_value.value(), frozen::kInfZHalf, 1e-12);
    EXPECT_NEAR(umegaki(rho, sigma).value(), frozen::kUmegaki, 1e-12);
    EXPECT_NEAR(d_max(rho, sigma).value(), frozen::kDMax, 1e-12);
    EXPECT_NEAR(d_hat_alpha(rho, sigma, 2).value.value(), frozen::kDHat2, 1e-12);
    EXPECT_NEAR(d_hat_alpha(rho, sigma, 1.5).value.value(), frozen::kDHat15, 1e-12);
}

TEST(DAlphaZ, EqualArgumentsGiveZero) {
    Rng rng = make_rng(33);
    const HermitianOperator rho = random_state(3, rng, 2);
    for (double alpha : {0.4, 1.0, 2.5})
        for (double z : {0.5, 1.0, 3.0}) EXPECT_NEAR(daz(rho, rho, alpha, z), 0, 1e-10);
}

TEST(DAlphaZ, PureFamilyAtZEqualAlphaMinusOne) {
    const StatePair pair = gen_pure(1, 0.1);
    EXPECT_NEAR(daz(pair.rho, pair.sigma, 2, 1), std::log(2.0), 1e-12);
}

TEST(DAlphaZ, SandwichedBelowUmegakiForSmallAlpha) {
    Rng rng = make_rng(34);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator rho = random_state(2, rng), sigma = random_state(2, rng);
        EXPECT_LE(daz(rho, sigma, 0.5, 0.5), umegaki(rho, sigma).value() + 1e-12);
    }
}

TEST(DAlphaZ, ScalingLaw) {
    // D(t rho || s sigma) = D(rho || sigma) + log t - log s
    const HermitianOperator rho = fixed_rho(), sigma = fixed_sigma();
    for (double alpha : {0.6, 1.8})
        EXPECT_NEAR(daz(rho.scaled(3), sigma.scaled(0.5), alpha, 1.3), daz(rho, sigma, alpha, 1.3) + std::log(6.0),
                    1e-12);
}

TEST(DAlphaZ, OrthogonalSupports) {
    const DivergenceValue low = d_alpha_z(diag2(1, 0), diag2(0, 1), DivergenceParams::finite(0.5, 1));
    EXPECT_TRUE(low.d_value.is_infinite());
    EXPECT_FALSE(low.psi_value.has_value());
    EXPECT_TRUE(d_alpha_z(diag2(1, 0), diag2(0, 1), DivergenceParams::finite(2, 1)).d_value.is_infinite());
}

TEST(DAlphaZ, EmptyMeetAtInfiniteZIsFlagged) {
    const DivergenceValue v = d_alpha_z(diag2(1, 0), diag2(0, 1), DivergenceParams::infinite(0.5));
    EXPECT_TRUE(v.d_value.is_infinite());
    EXPECT_NE(std::find(v.flags.begin(), v.flags.end(), "empty_support_meet"), v.flags.end());
}

TEST(DAlphaZ, ContinuousAcrossAlphaOne) {
    Rng rng = make_rng(35);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator rho = random_invertible_state(2 + trial % 2, rng),
                                sigma = random_invertible_state(2 + trial % 2, rng);
        const double um = umegaki(rho, sigma).value();
        for (double z : {1.0, 0.3})
            for (double alpha : {1 - 1e-4, 1 + 1e-4}) EXPECT_NEAR(daz(rho, sigma, alpha, z), um, 2e-3);
    }
}

// Property: for alpha > 1 the divergence decreases in z, for alpha < 1 it increases.
TEST(DAlphaZ, MonotoneInZ) {
    Rng rng = make_rng(36);
    for (int trial = 0; trial < 30; ++trial) {
        const HermitianOperator rho = random_state(3, rng), sigma = random_invertible_state(3, rng);
        for (double alpha : {0.4, 2.2}) {
            double prev = daz(rho, sigma, alpha, 0.25);
            for (double z : {0.5, 1.0, 2.0, 8.0}) {
                const double v = daz(rho, sigma, alpha, z);
                if (alpha > 1) EXPECT_LE(v, prev + 1e-9 * std::max(1.0, prev));
                else EXPECT_GE(v, prev - 1e-9 * std::max(1.0, std::abs(prev)));
                prev = v;
            }
        }
    }
}

// Property: sandwiched (z = alpha) obeys data processing under a random unital pinching.
TEST(DAlphaZ, SandwichedDataProcessingUnderPinching) {
    Rng rng = make_rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator rho = random_state(3, rng), sigma = random_invertible_state(3, rng);
        const Matrix u = random_unitary(3, rng);
        auto pinch = [&](const HermitianOperator& a) {
            Matrix b = u.adjoint() * a.matrix() * u;
            Matrix diag = Matrix::Zero(3, 3);
            diag.diagonal() = b.diagonal();
            return HermitianOperator(diag);
        };
        for (double alpha : {0.6, 1.5, 3.0})
            EXPECT_LE(daz(pinch(rho), pinch(sigma), alpha, alpha), daz(rho, sigma, alpha, alpha) + 1e-10);
    }
}

TEST(Umegaki, Examples) {
    EXPECT_NEAR(umegaki(fixed_rho(), fixed_rho()).value(), 0, 1e-13);
    EXPECT_NEAR(umegaki(diag2(0.75, 0.25), diag2(0.5, 0.5)).value(), 0.75 * std::log(1.5) + 0.25 * std::log(0.5),
                1e-14);
    EXPECT_TRUE(umegaki(diag2(0.5, 0.5), diag2(1, 0)).is_infinite());
}

TEST(DMax, Examples) {
    EXPECT_NEAR(d_max(fixed_rho(), fixed_rho()).value(), 0, 1e-12);
    const StatePair pair = gen_pure(1, 0.25);
    EXPECT_NEAR(d_max(pair.rho, pair.sigma).value(), std::log(2.0), 1e-12);
    EXPECT_NEAR(d_max(diag2(0.75, 0.25), diag2(0.5, 0.5)).value(), std::log(1.5), 1e-14);
    EXPECT_TRUE(d_max(diag2(0.5, 0.5), diag2(1, 0)).is_infinite());
}

TEST(DMax, BisectionAgrees) {
    Rng rng = make_rng(38);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator rho = random_state(3, rng), sigma = random_invertible_state(3, rng);
        EXPECT_NEAR(d_max(rho, sigma).value(), d_max_bisection(rho, sigma).value(), 1e-9);
    }
}

TEST(DHat, Examples) {
    EXPECT_NEAR(d_hat_alpha(fixed_rho(), fixed_rho(), 1.5).value.value(), 0, 1e-12);
    const StatePair pair = gen_pure(1.5, 0.2);
    EXPECT_NEAR(d_hat_alpha(pair.rho, pair.sigma, 0.7).value.value(), d_max(pair.rho, pair.sigma).value(), 1e-10);
    EXPECT_NEAR(d_hat_alpha(diag2(0.75, 0.25), diag2(0.5, 0.5), 2.5).value.value(),
                classical_renyi(WeightVector({0.75, 0.25}), WeightVector({0.5, 0.5}), 2.5).value(), 1e-13);
}

TEST(DHat, ExactnessFlag) {
    EXPECT_TRUE(d_hat_alpha(fixed_rho(), fixed_sigma(), 1.5).exact);
    EXPECT_FALSE(d_hat_alpha(fixed_rho(), fixed_sigma(), 3).exact);
}

// Property: D_hat dominates the sandwiched divergence.
TEST(DHat, DominatesSandwiched) {
    Rng rng = make_rng(39);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator rho = random_state(2, rng), sigma = random_invertible_state(2, rng);
        for (double alpha : {0.5, 1.5, 2.0})
            EXPECT_GE(d_hat_alpha(rho, sigma, alpha).value.value(), daz(rho, sigma, alpha, alpha) - 1e-10);
    }
}

TEST(DAlphaZero, FrozenReferenceValues) {
    EXPECT_NEAR(d_alpha_zero(fixed_rho(), fixed_sigma(), 0.5).value.value(), frozen::kZeroHalf, 1e-10);
    EXPECT_NEAR(d_alpha_zero(fixed_rho(), fixed_sigma(), 2).value.value(), frozen::kZero2, 1e-10);
}

TEST(DAlphaZero, PureStateClosedForms) {
    Rng rng = make_rng(40);
    const HermitianOperator sigma = random_invertible_state(3, rng);
    const HermitianOperator psi = testing::ket_projector(random_unit_vector(3, rng));
    EXPECT_NEAR(d_alpha_zero(psi, sigma, 0.5).value.value(), -std::log(sigma.max_eigenvalue()), 1e-8);
    EXPECT_NEAR(d_alpha_zero(psi, sigma, 2).value.value(), -std::log(sigma.min_eigenvalue()), 1e-8);
}

TEST(DAlphaZero, CommutingPairIsClassical) {
    // every z gives the classical value here, so the limit keeps the diagonal pairing
    const HermitianOperator rho = testing::diag3(0.5, 0.3, 0.2), sigma = testing::diag3(0.6, 0.3, 0.1);
    const double q = std::pow(0.5, 1.5) * std::pow(0.6, -0.5) + std::pow(0.3, 1.5) * std::pow(0.3, -0.5) +
                     std::pow(0.2, 1.5) * std::pow(0.1, -0.5);
    EXPECT_NEAR(d_alpha_zero(rho, sigma, 1.5).value.value(), 2 * std::log(q), 1e-10);
}

TEST(DAlphaZero, ExtrapolationOracleAgrees) {
    Rng rng = make_rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator rho = random_state(3, rng), sigma = random_invertible_state(3, rng);
        for (double alpha : {0.7, 2.0}) {
            const double spectral = d_alpha_zero(rho, sigma, alpha).q_value.value();
            EXPECT_NEAR(q_alpha_zero_extrapolated(rho, sigma, alpha).value(), spectral, 1e-4 * spectral);
        }
    }
}

TEST(NussbaumSzkola, DiagonalPair) {
    const auto [p, q] = nussbaum_szkola(diag2(0.75, 0.25), diag2(0.75, 0.25));
    ASSERT_EQ(p.size(), 4u);
    double on_diagonal = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(p[i], q[i], 1e-15);
        if (i == 0 || i == 3) on_diagonal += p[i];
    }
    EXPECT_NEAR(on_diagonal, 1.0, 1e-15);
}

TEST(NussbaumSzkola, PetzIdentity) {
    Rng rng = make_rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const HermitianOperator rho = random_state(2 + trial % 3, rng), sigma = random_state(2 + trial % 3, rng);
        const auto [p, q] = nussbaum_szkola(rho, sigma);
        for (double alpha : {0.3, 0.8, 1.5, 3.0}) {
            const double quantum = q_alpha_z(rho, sigma, DivergenceParams::finite(alpha, 1)).value();
            EXPECT_NEAR(classical_q(p, q, alpha).value(), quantum, 1e-10 * quantum);
        }
    }
}

TEST(Variational, Examples) {
    const HermitianOperator rho = fixed_rho(), sigma = fixed_sigma();
    const DivergenceParams params = DivergenceParams::finite(2, 2);
    EXPECT_EQ(variational_objective(rho, sigma, params, HermitianOperator::zero(2)), 0.0);
    const HermitianOperator h = variational_optimizer_H(rho, sigma, params);
    EXPECT_NEAR(variational_objective(rho, sigma, params, h), q_alpha_z(rho, sigma, params).value(), 1e-12);

    const HermitianOperator mixed = HermitianOperator::identity(3).scaled(1.0 / 3);
    const DivergenceParams p15 = DivergenceParams::finite(1.5, 1.5);
    EXPECT_NEAR(variational_objective(mixed, mixed, p15, variational_optimizer_H(mixed, mixed, p15)), 1.0, 1e-12);

    const HermitianOperator hd = variational_optimizer_H(diag2(0.7, 0.3), diag2(0.4, 0.6), p15);
    EXPECT_LT(std::abs(hd.matrix()(0, 1)), 1e-14);
}

TEST(Variational, ParameterRange) {
    EXPECT_EQ(kind_of([] { variational_objective(fixed_rho(), fixed_sigma(), DivergenceParams::finite(2.5, 1),
                                                 HermitianOperator::zero(2)); }),
              ErrorKind::BadAlpha);
    EXPECT_EQ(kind_of([] { variational_optimizer_H(diag2(0.5, 0.5), diag2(1, 0), DivergenceParams::finite(2, 1)); }),
              ErrorKind::SupportViolation);
}

TEST(AltChain, Examples) {
    const AltChain same = alt_chain(fixed_rho(), fixed_sigma(), 1.7, 1.2, 1.2);
    EXPECT_TRUE(same.holds);
    EXPECT_NEAR(same.q_z1.value(), same.q_z2.value(), 1e-14);
    const AltChain equal = alt_chain(fixed_rho(), fixed_rho(), 1.7, 0.7, 1.7);
    EXPECT_TRUE(equal.holds);
    EXPECT_NEAR(equal.q_z1.value(), 1.0, 1e-10);
    const AltChain strict = alt_chain(fixed_rho(), fixed_sigma(), 1.7, 0.7, 1.7);
    EXPECT_TRUE(strict.holds);
    EXPECT_LT(strict.q_z2.value(), strict.q_z1.value());
    EXPECT_LT(strict.q_z1.value(), strict.upper.value());
}

TEST(DmaxDomination, Examples) {
    Rng rng = make_rng(43);
    const HermitianOperator sigma = random_invertible_state(3, rng);
    const HermitianOperator psi = testing::ket_projector(random_unit_vector(3, rng));
    const DmaxDomination below = dmax_domination_check(psi, sigma, DivergenceParams::finite(3, 1.5));
    EXPECT_FALSE(below.dominated);
    EXPECT_GT(below.d_az.value() - below.d_max.value(), 1e-6);
    EXPECT_TRUE(dmax_domination_check(psi, sigma, DivergenceParams::finite(3, 2)).dominated);
    for (double z : {0.1, 1.0, 10.0}) EXPECT_TRUE(dmax_domination_check(psi, sigma, DivergenceParams::finite(0.5, z)).dominated);
}

TEST(Smoothing, EqualStatesRiseToZero) {
    const SmoothingCurve c = epsilon_smoothing_curve(fixed_rho(), fixed_rho(), DivergenceParams::finite(2, 1),
                                                     {1e-1, 1e-3, 1e-5, 1e-8});
    EXPECT_TRUE(c.monotone);
    for (const auto& v : c.values) EXPECT_LE(v.value(), 1e-12);
    ASSERT_TRUE(c.converged.has_value());
    EXPECT_TRUE(*c.converged);
}

TEST(Smoothing, UnsupportedPairDiverges) {
    const SmoothingCurve c = epsilon_smoothing_curve(diag2(0.5, 0.5), diag2(1, 0), DivergenceParams::finite(2, 1),
                                                     {1e-1, 1e-3, 1e-5, 1e-8});
    EXPECT_TRUE(c.monotone);
    EXPECT_TRUE(c.unsmoothed.is_infinite());
    EXPECT_FALSE(c.converged.has_value());
    EXPECT_GT(c.values.back().value(), c.values.front().value() + 5);
}

TEST(Smoothing, GridErrors) {
    EXPECT_EQ(kind_of([] { epsilon_smoothing_curve(fixed_rho(), fixed_sigma(), DivergenceParams::finite(2, 1), {}); }),
              ErrorKind::BadParams);
    EXPECT_EQ(kind_of([] { epsilon_smoothing_curve(fixed_rho(), fixed_sigma(), DivergenceParams::finite(2, 1), {-1}); }),
              ErrorKind::BadParams);
}

} // namespace
} // namespace qrd
