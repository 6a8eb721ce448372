#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qrd/errors.hpp"
#include "qrd/extended_real.hpp"

namespace qrd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Eigenvalues at or below relative_tau * lambda_max count as exact zeros.
struct SupportCutoff {
    double relative_tau = 1e-12;
};

class HermitianOperator {
public:
    // Rejects input whose anti-Hermitian part exceeds 1e-10 * max(1, max|entry|),
    // then symmetrizes and caches a descending eigendecomposition.
    explicit HermitianOperator(const Matrix& entries);

    static HermitianOperator identity(int d);
    static HermitianOperator zero(int d);
    static HermitianOperator diagonal(const RVector& diag);
    static HermitianOperator projector(const CVector& psi);  // |psi><psi|, psi not normalized
    static HermitianOperator from_spectrum(const RVector& eigenvalues, const Matrix& eigenvectors);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    const RVector& eigenvalues() const { return evals_; }
    const Matrix& eigenvectors() const { return evecs_; }

    double trace() const { return evals_.sum(); }
    double max_eigenvalue() const { return evals_.size() ? evals_(0) : 0.0; }
    double min_eigenvalue() const { return evals_.size() ? evals_(evals_.size() - 1) : 0.0; }
    double spectral_norm() const;

    // U f(lambda) U^dagger on the cached eigenbasis.
    template <class F>
    HermitianOperator map_spectrum(F f) const {
        RVector mapped(evals_.size());
        for (Eigen::Index i = 0; i < evals_.size(); ++i) mapped(i) = f(evals_(i));
        return from_spectrum(mapped, evecs_);
    }

    HermitianOperator scaled(double s) const;
    HermitianOperator operator+(const HermitianOperator& other) const;
    HermitianOperator operator-(const HermitianOperator& other) const;

private:
    struct Trusted {};
    HermitianOperator(Trusted, Matrix entries, RVector evals, Matrix evecs);
    void decompose();

    Matrix m_;
    RVector evals_;
    Matrix evecs_;
};

class Projection {
public:
    // Orthonormal columns spanning the range.
    static Projection from_basis(const Matrix& basis, int dim);

    const HermitianOperator& op() const { return op_; }
    const Matrix& basis() const { return basis_; }
    int rank() const { return static_cast<int>(basis_.cols()); }
    int dim() const { return op_.dim(); }

private:
    Projection(HermitianOperator op, Matrix basis) : op_(std::move(op)), basis_(std::move(basis)) {}

    HermitianOperator op_;
    Matrix basis_;
};

// Throws NotPSD when the smallest eigenvalue is below -1e-8 * lambda_max.
void require_psd(const HermitianOperator& a);

// Eigenvalues with negatives clamped and sub-cutoff values set to exactly 0.
RVector clamped_spectrum(const HermitianOperator& a, const SupportCutoff& cutoff = {});

HermitianOperator supported_power(const HermitianOperator& a, double x, const SupportCutoff& cutoff = {});
Projection support_projection(const HermitianOperator& a, const SupportCutoff& cutoff = {});
Projection projection_meet(const Projection& p, const Projection& q);

// min eig(B - A) >= -slack, slack defaulting to 1e-10 * ||B||.
bool psd_leq(const HermitianOperator& a, const HermitianOperator& b, std::optional<double> slack = std::nullopt);

// rho^0 <= sigma^0 with projection slack 1e-8.
bool support_leq(const HermitianOperator& rho, const HermitianOperator& sigma, const SupportCutoff& cutoff = {});

HermitianOperator logn(const HermitianOperator& a, const SupportCutoff& cutoff = {});

// Tr P exp(alpha P logn(rho) P + (1-alpha) P logn(sigma) P) with P the support meet;
// +inf for alpha > 1 unless rho^0 <= sigma^0.
ExtendedReal pinch_exp(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha,
                       const SupportCutoff& cutoff = {});

double trace_power(const HermitianOperator& a, double z, const SupportCutoff& cutoff = {});

// Natural logs of the eigenvalues (descending, -inf for zeros) of A^p B^q A^p with
// supported powers. Computed from compound matrices of the graded factor
// diag(a^p) V^dag W diag(b^(q/2)) in log scale, so tiny eigenvalues keep full relative
// accuracy even for exponents in the hundreds. Meant for ranks up to about 8.
std::vector<double> graded_sandwich_log_spectrum(const HermitianOperator& a, double p,
                                                 const HermitianOperator& b, double q,
                                                 const SupportCutoff& cutoff = {});

Matrix kron(const Matrix& a, const Matrix& b);
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator tensor_power(const HermitianOperator& a, int n);

// V A V^dagger for an isometry V.
HermitianOperator conjugate(const HermitianOperator& a, const Matrix& v);

// Tr A B for Hermitian A, B (real part).
double trace_product(const HermitianOperator& a, const HermitianOperator& b);

} // namespace qrd
