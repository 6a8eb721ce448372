#pragma once

#include <vector>

#include "qrd/opcore.hpp"

namespace qrd {

// Eigen-data of a pair with block boundaries of equal eigenvalues.
// Boundaries are cumulative counts: 0 = i_0 < i_1 < ... < i_l = d.
struct SpectralProfile {
    RVector a;
    RVector b;
    Matrix v;
    Matrix w;
    std::vector<int> rho_blocks;
    std::vector<int> sigma_blocks;
    bool near_degenerate = false;  // some gap is too small to call equal or distinct

    static SpectralProfile build(const HermitianOperator& rho, const HermitianOperator& sigma);
    int dim() const { return static_cast<int>(a.size()); }
};

struct MinorWitness {
    int k;
    std::vector<int> rows;  // 0-based indices into the rho eigenbasis
    std::vector<int> cols;  // 0-based indices into the sigma eigenbasis
    double magnitude;
};

struct GenericityReport {
    bool holds = true;
    bool undetermined = false;
    int failing_k = 0;  // first k without an admissible nonzero minor (1-based size)
    std::vector<MinorWitness> witnesses;
};

GenericityReport genericity_condition_b(const SpectralProfile& profile);
GenericityReport genericity_condition_b_prime(const SpectralProfile& profile);

// Eigenvalues of the z -> 0 limit operator, descending.
RVector z_alpha_eigenvalues(const SpectralProfile& profile, double alpha);

enum class LimitDirection { Below, Above };

struct EqualityCaseReport {
    double gap;
    bool commuting_aligned;
    bool consistent;  // gap <= 1e-8 exactly when commuting_aligned
};
EqualityCaseReport equality_case_check(const HermitianOperator& rho, const HermitianOperator& sigma,
                                       LimitDirection direction);

struct ReducingSubspaceReport {
    bool trace_attains_topk;
    bool reduces;
    bool consistent;  // trace_attains_topk implies reduces
};
ReducingSubspaceReport reducing_subspace_check(const HermitianOperator& a, const Projection& p);

} // namespace qrd
