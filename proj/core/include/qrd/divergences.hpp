#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrd/classical.hpp"
#include "qrd/opcore.hpp"

namespace qrd {

class DivergenceParams {
public:
    enum class ZKind { Finite, Infinite, ZeroLimit };

    static DivergenceParams finite(double alpha, double z);
    static DivergenceParams infinite(double alpha);
    static DivergenceParams zero_limit(double alpha);

    double alpha() const { return alpha_; }
    ZKind z_kind() const { return kind_; }
    // Only meaningful for ZKind::Finite.
    double z() const { return z_; }

    std::string describe() const;

private:
    DivergenceParams(double alpha, ZKind kind, double z);

    double alpha_;
    ZKind kind_;
    double z_;
};

struct DivergenceValue {
    ExtendedReal q_value;
    ExtendedReal d_value;
    // log Q; nullopt encodes -inf (Q = 0, possible only for alpha < 1).
    std::optional<ExtendedReal> psi_value;
    std::vector<std::string> flags;
};

// Rejects dimension mismatch, non-PSD and zero operators.
void require_valid_pair(const HermitianOperator& rho, const HermitianOperator& sigma);

ExtendedReal q_alpha_z(const HermitianOperator& rho, const HermitianOperator& sigma, const DivergenceParams& params);
DivergenceValue d_alpha_z(const HermitianOperator& rho, const HermitianOperator& sigma, const DivergenceParams& params);

// Tr(A^p B^q A^p)^z through the graded spectrum when the supports are small, the
// plain product otherwise.
double sandwich_trace_power(const HermitianOperator& a, double p, const HermitianOperator& b, double q, double z);

ExtendedReal umegaki(const HermitianOperator& rho, const HermitianOperator& sigma);
ExtendedReal d_max(const HermitianOperator& rho, const HermitianOperator& sigma);
// log inf{lambda : rho <= lambda sigma} by bisection on psd_leq; independent of d_max.
ExtendedReal d_max_bisection(const HermitianOperator& rho, const HermitianOperator& sigma, double tol = 1e-12);

struct DHatResult {
    ExtendedReal value;
    bool exact;  // false for alpha > 2, where only an upper bound on the maximal divergence
};
DHatResult d_hat_alpha(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha);

struct ZeroLimitResult {
    ExtendedReal value;
    ExtendedReal q_value;
    bool extrapolated;  // spectral formula unavailable, value came from the z-extrapolation
};
ZeroLimitResult d_alpha_zero(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha);

// Q_{alpha,z} at z in {1e-2, 5e-3, 2.5e-3}, Richardson-extrapolated to z = 0.
ExtendedReal q_alpha_zero_extrapolated(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha);

std::pair<WeightVector, WeightVector> nussbaum_szkola(const HermitianOperator& rho, const HermitianOperator& sigma);

double variational_objective(const HermitianOperator& rho, const HermitianOperator& sigma,
                             const DivergenceParams& params, const HermitianOperator& h);
HermitianOperator variational_optimizer_H(const HermitianOperator& rho, const HermitianOperator& sigma,
                                          const DivergenceParams& params);
// inf{lambda : rho^(alpha/z) <= lambda sigma^(alpha/z)}
double variational_bound_lambda(const HermitianOperator& rho, const HermitianOperator& sigma,
                                const DivergenceParams& params);

struct AltChain {
    ExtendedReal q_z2;
    ExtendedReal q_z1;
    ExtendedReal upper;
    bool holds;  // both inequalities within 1e-9 relative
};
AltChain alt_chain(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha, double z1, double z2);

struct DmaxDomination {
    ExtendedReal d_az;
    ExtendedReal d_max;
    bool dominated;
};
DmaxDomination dmax_domination_check(const HermitianOperator& rho, const HermitianOperator& sigma,
                                     const DivergenceParams& params);

struct SmoothingCurve {
    std::vector<double> eps;
    std::vector<ExtendedReal> values;
    ExtendedReal unsmoothed;
    bool monotone;                   // nondecreasing as eps shrinks, within 1e-10
    std::optional<bool> converged;   // set when unsmoothed is finite and the grid reaches 1e-8
};
SmoothingCurve epsilon_smoothing_curve(const HermitianOperator& rho, const HermitianOperator& sigma,
                                       const DivergenceParams& params, const std::vector<double>& eps_grid);

} // namespace qrd
