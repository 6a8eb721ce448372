#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qrd/classical.hpp"
#include "qrd/opcore.hpp"

namespace qrd {

class POVM {
public:
    // Elements must be PSD (slack 1e-10) and sum to the identity within 1e-9.
    explicit POVM(std::vector<HermitianOperator> elements);

    // Rank-one projective measurement onto the columns of a unitary.
    static POVM from_basis(const Matrix& unitary);

    const std::vector<HermitianOperator>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    int dim() const { return elements_.front().dim(); }

private:
    std::vector<HermitianOperator> elements_;
};

WeightVector apply_povm(const POVM& povm, const HermitianOperator& rho);

struct MeasuredResult {
    ExtendedReal value;  // certified lower bound, reproduced by re-applying povm
    POVM povm;
    int restarts_used;
    bool converged;
};

struct MeasuredOptions {
    int max_iterations = 300;
    double gradient_step = 1e-6;
};

// Maximizes D^cl over d^2-outcome POVMs M_i = S^-1/2 A_i A_i^dag S^-1/2, S = sum A_i A_i^dag,
// starting from structured projective seeds and `restarts` random factor sets. Above d = 4 only the
// projective seeds are scored (restarts_used reports 0).
MeasuredResult measured_renyi_lower(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha,
                                    int restarts, std::uint64_t seed, const MeasuredOptions& options = {});

// Two-outcome version over tests 0 <= T <= I.
MeasuredResult test_measured(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha,
                             int restarts, std::uint64_t seed);

// (n, lower bound on D^meas(rho^n || sigma^n) / n) for n = 1..max_n.
std::vector<std::pair<int, ExtendedReal>> regularized_measured_estimate(const HermitianOperator& rho,
                                                                       const HermitianOperator& sigma, double alpha,
                                                                       int max_n, int restarts, std::uint64_t seed);

} // namespace qrd
