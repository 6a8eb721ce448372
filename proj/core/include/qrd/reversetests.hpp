#pragma once

#include <cstdint>
#include <vector>

#include "qrd/classical.hpp"
#include "qrd/opcore.hpp"

namespace qrd {

// Classical-to-quantum preparation: column i prepares omegas[i]; (p, q) are the classical
// inputs whose images should be (rho, sigma).
struct ReverseTest {
    std::vector<HermitianOperator> omegas;
    WeightVector p;
    WeightVector q;

    // Checks shapes, unit traces (1e-10) and PSD columns; does not bind a target pair.
    ReverseTest(std::vector<HermitianOperator> omegas, WeightVector p, WeightVector q);

    std::size_t size() const { return omegas.size(); }
    int dim() const { return omegas.front().dim(); }
    HermitianOperator image_p() const;
    HermitianOperator image_q() const;
};

// Both reconstruction identities within 1e-9 (max entry deviation).
bool validate_reverse_test(const ReverseTest& rt, const HermitianOperator& rho, const HermitianOperator& sigma);

ExtendedReal rt_f_divergence(const ReverseTest& rt, const ConvexFunctionSpec& f);

// Removes one column lying in the convex hull of the others, folding its weights into
// them. Columns are tried from last to first. Throws NoConvexWitness if none qualifies.
ReverseTest caratheodory_reduce(const ReverseTest& rt);

// Eigen-decomposition test: columns sigma^1/2 |r><r| sigma^1/2 / <r|sigma|r> over the
// eigenvectors r of the ratio operator, plus one column carrying the part of rho that
// sigma does not dominate. Attains the maximal divergence for alpha <= 2.
ReverseTest spectral_reverse_test(const HermitianOperator& rho, const HermitianOperator& sigma);

struct MaximalDivergenceBound {
    ExtendedReal value;
    ReverseTest rt;
    bool exact;
};

// alpha <= 2: the spectral test, exact. alpha > 2: local search over tests with d^2+1 columns,
// never worse than the spectral start; an upper bound only.
MaximalDivergenceBound maximal_divergence_upper(const HermitianOperator& rho, const HermitianOperator& sigma,
                                                double alpha, int restarts, std::uint64_t seed);

// Lawson-Hanson: argmin ||A x - b|| over x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = 500);

} // namespace qrd
