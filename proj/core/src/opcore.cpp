#include "qrd/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/KroneckerProduct>

namespace qrd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_same_dim(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "operator dimensions differ");
}

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i < n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

} // namespace

HermitianOperator::HermitianOperator(const Matrix& entries) {
    if (entries.rows() == 0 || entries.rows() != entries.cols())
        throw Error(ErrorKind::DimMismatch, "operator must be a nonempty square matrix");
    if (!entries.allFinite()) throw Error(ErrorKind::MalformedInput, "non-finite matrix entry");
    const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
    const double skew = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
    if (skew > 1e-10 * scale) throw Error(ErrorKind::MalformedInput, "matrix is not Hermitian");
    m_ = (entries + entries.adjoint()) / 2.0;
    decompose();
}

HermitianOperator::HermitianOperator(Trusted, Matrix entries, RVector evals, Matrix evecs)
    : m_(std::move(entries)), evals_(std::move(evals)), evecs_(std::move(evecs)) {}

void HermitianOperator::decompose() {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::MalformedInput, "eigensolver failed");
    // Eigen returns ascending order; reversing keeps tied columns in a fixed order.
    evals_ = es.eigenvalues().reverse();
    evecs_ = es.eigenvectors().rowwise().reverse();
}

HermitianOperator HermitianOperator::identity(int d) {
    return diagonal(RVector::Ones(d));
}

HermitianOperator HermitianOperator::zero(int d) {
    return diagonal(RVector::Zero(d));
}

HermitianOperator HermitianOperator::diagonal(const RVector& diag) {
    return HermitianOperator(Matrix(diag.cast<Complex>().asDiagonal()));
}

HermitianOperator HermitianOperator::projector(const CVector& psi) {
    return HermitianOperator(Matrix(psi * psi.adjoint()));
}

HermitianOperator HermitianOperator::from_spectrum(const RVector& eigenvalues, const Matrix& eigenvectors) {
    Matrix m = eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
    m = (m + m.adjoint()).eval() / 2.0;
    // The spectrum is known, so skip a second eigensolve: sort it and carry the vectors.
    std::vector<int> order(eigenvalues.size());
    for (int i = 0; i < static_cast<int>(order.size()); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return eigenvalues(i) > eigenvalues(j); });
    RVector ev(eigenvalues.size());
    Matrix vecs(eigenvectors.rows(), eigenvectors.cols());
    for (int i = 0; i < static_cast<int>(order.size()); ++i) {
        ev(i) = eigenvalues(order[i]);
        vecs.col(i) = eigenvectors.col(order[i]);
    }
    return HermitianOperator(Trusted{}, std::move(m), std::move(ev), std::move(vecs));
}

double HermitianOperator::spectral_norm() const {
    if (evals_.size() == 0) return 0.0;
    return std::max(std::abs(evals_(0)), std::abs(evals_(evals_.size() - 1)));
}

HermitianOperator HermitianOperator::scaled(double s) const {
    if (s >= 0) return HermitianOperator(Trusted{}, m_ * s, evals_ * s, evecs_);
    return HermitianOperator(Matrix(m_ * s));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
    require_same_dim(*this, other);
    return HermitianOperator(Matrix(m_ + other.m_));
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
    require_same_dim(*this, other);
    return HermitianOperator(Matrix(m_ - other.m_));
}

Projection Projection::from_basis(const Matrix& basis, int dim) {
    if (basis.cols() > 0 && basis.rows() != dim) throw Error(ErrorKind::DimMismatch, "projection basis rows");
    const Eigen::Index r = basis.cols();
    Matrix b = r > 0 ? basis : Matrix(dim, 0);
    RVector ev = RVector::Zero(dim);
    ev.head(r).setOnes();
    // Complete the basis so the cached decomposition stays unitary.
    Matrix vecs = Matrix::Identity(dim, dim);
    if (r > 0) {
        Eigen::HouseholderQR<Matrix> qr(b);
        Matrix full = qr.householderQ() * Matrix::Identity(dim, dim);
        vecs.leftCols(r) = b;
        vecs.rightCols(dim - r) = full.rightCols(dim - r);
    }
    return Projection(HermitianOperator::from_spectrum(ev, vecs), b);
}

void require_psd(const HermitianOperator& a) {
    const double scale = a.spectral_norm();
    if (a.min_eigenvalue() < -1e-8 * scale)
        throw Error(ErrorKind::NotPSD, "operator has a negative eigenvalue " + std::to_string(a.min_eigenvalue()));
}

RVector clamped_spectrum(const HermitianOperator& a, const SupportCutoff& cutoff) {
    require_psd(a);
    RVector ev = a.eigenvalues();
    const double top = std::max(0.0, a.max_eigenvalue());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) <= cutoff.relative_tau * top) ev(i) = 0.0;
    return ev;
}

HermitianOperator supported_power(const HermitianOperator& a, double x, const SupportCutoff& cutoff) {
    RVector ev = clamped_spectrum(a, cutoff);
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > 0 ? (x == 0 ? 1.0 : std::pow(ev(i), x)) : 0.0;
    return HermitianOperator::from_spectrum(ev, a.eigenvectors());
}

Projection support_projection(const HermitianOperator& a, const SupportCutoff& cutoff) {
    RVector ev = clamped_spectrum(a, cutoff);
    int rank = 0;
    while (rank < ev.size() && ev(rank) > 0) ++rank;
    return Projection::from_basis(a.eigenvectors().leftCols(rank), a.dim());
}

Projection projection_meet(const Projection& p, const Projection& q) {
    if (p.dim() != q.dim()) throw Error(ErrorKind::DimMismatch, "projection dimensions differ");
    HermitianOperator sum = p.op() + q.op();
    int rank = 0;
    while (rank < sum.dim() && std::abs(sum.eigenvalues()(rank) - 2.0) <= 1e-8) ++rank;
    return Projection::from_basis(sum.eigenvectors().leftCols(rank), p.dim());
}

bool psd_leq(const HermitianOperator& a, const HermitianOperator& b, std::optional<double> slack) {
    require_same_dim(a, b);
    const double s = slack.value_or(1e-10 * b.spectral_norm());
    return (b - a).min_eigenvalue() >= -s;
}

bool support_leq(const HermitianOperator& rho, const HermitianOperator& sigma, const SupportCutoff& cutoff) {
    return psd_leq(support_projection(rho, cutoff).op(), support_projection(sigma, cutoff).op(), 1e-8);
}

HermitianOperator logn(const HermitianOperator& a, const SupportCutoff& cutoff) {
    RVector ev = clamped_spectrum(a, cutoff);
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > 0 ? std::log(ev(i)) : 0.0;
    return HermitianOperator::from_spectrum(ev, a.eigenvectors());
}

ExtendedReal pinch_exp(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha,
                       const SupportCutoff& cutoff) {
    require_same_dim(rho, sigma);
    require_psd(rho);
    require_psd(sigma);
    if (alpha > 1 && !support_leq(rho, sigma, cutoff)) return ExtendedReal::infinity();
    Projection meet = projection_meet(support_projection(rho, cutoff), support_projection(sigma, cutoff));
    if (meet.rank() == 0) return 0.0;
    const Matrix& b = meet.basis();
    Matrix x = alpha * (b.adjoint() * logn(rho, cutoff).matrix() * b) +
               (1 - alpha) * (b.adjoint() * logn(sigma, cutoff).matrix() * b);
    HermitianOperator compressed(Matrix((x + x.adjoint()) / 2.0));
    double total = 0;
    for (Eigen::Index i = 0; i < compressed.eigenvalues().size(); ++i) total += std::exp(compressed.eigenvalues()(i));
    return total;
}

double trace_power(const HermitianOperator& a, double z, const SupportCutoff& cutoff) {
    if (!(z > 0)) throw Error(ErrorKind::BadParams, "trace_power needs z > 0");
    RVector ev = clamped_spectrum(a, cutoff);
    double total = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > 0) total += std::pow(ev(i), z);
    return total;
}

std::vector<double> graded_sandwich_log_spectrum(const HermitianOperator& a, double p,
                                                 const HermitianOperator& b, double q,
                                                 const SupportCutoff& cutoff) {
    require_same_dim(a, b);
    const int d = a.dim();
    RVector ea = clamped_spectrum(a, cutoff);
    RVector eb = clamped_spectrum(b, cutoff);
    int ra = 0, rb = 0;
    while (ra < d && ea(ra) > 0) ++ra;
    while (rb < d && eb(rb) > 0) ++rb;

    std::vector<double> out(d, kNegInf);
    const int r = std::min(ra, rb);
    if (r == 0) return out;

    Matrix overlap = a.eigenvectors().leftCols(ra).adjoint() * b.eigenvectors().leftCols(rb);
    std::vector<double> la(ra), lb(rb);
    for (int i = 0; i < ra; ++i) la[i] = p * std::log(ea(i));
    for (int j = 0; j < rb; ++j) lb[j] = 0.5 * q * std::log(eb(j));

    // log of the product of the top-k eigenvalues, k = 1..r
    std::vector<double> log_top(r + 1, 0.0);
    int rank = r;
    for (int k = 1; k <= r; ++k) {
        auto rows = subsets(ra, k);
        auto cols = subsets(rb, k);
        Eigen::MatrixXd logmag(rows.size(), cols.size());
        Matrix phase(rows.size(), cols.size());
        double top = kNegInf;
        for (size_t s = 0; s < rows.size(); ++s) {
            double row_weight = 0;
            for (int i : rows[s]) row_weight += la[i];
            for (size_t t = 0; t < cols.size(); ++t) {
                Matrix minor(k, k);
                for (int u = 0; u < k; ++u)
                    for (int v = 0; v < k; ++v) minor(u, v) = overlap(rows[s][u], cols[t][v]);
                const Complex det = minor.determinant();
                // Overlap minors are O(1) quantities; anything at rounding level is a
                // structural zero, and keeping it would let the grading amplify noise.
                const double mag = std::abs(det) > 1e-13 ? std::abs(det) : 0.0;
                double col_weight = 0;
                for (int j : cols[t]) col_weight += lb[j];
                logmag(s, t) = mag > 0 ? row_weight + col_weight + std::log(mag) : kNegInf;
                phase(s, t) = mag > 0 ? det / mag : Complex(0, 0);
                top = std::max(top, logmag(s, t));
            }
        }
        if (top == kNegInf) {
            rank = k - 1;
            break;
        }
        Matrix scaled(rows.size(), cols.size());
        for (Eigen::Index s = 0; s < scaled.rows(); ++s)
            for (Eigen::Index t = 0; t < scaled.cols(); ++t)
                // Entries below e^-200 cannot move the top singular value, and leaving them in
                // produces subnormal products that derail the Jacobi sweeps.
                scaled(s, t) = logmag(s, t) - top < -200 ? Complex(0, 0) : phase(s, t) * std::exp(logmag(s, t) - top);
        Eigen::JacobiSVD<Matrix> svd(scaled);
        const double smax = svd.singularValues()(0);
        if (!(smax > 0)) {
            rank = k - 1;
            break;
        }
        log_top[k] = 2.0 * (top + std::log(smax));
    }
    for (int k = 1; k <= rank; ++k) out[k - 1] = log_top[k] - log_top[k - 1];
    std::sort(out.begin(), out.end(), std::greater<double>());
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(kron(a.matrix(), b.matrix()));
}

HermitianOperator tensor_power(const HermitianOperator& a, int n) {
    if (n < 1) throw Error(ErrorKind::BadParams, "tensor power needs n >= 1");
    Matrix m = a.matrix();
    for (int i = 1; i < n; ++i) m = kron(m, a.matrix());
    return HermitianOperator(m);
}

HermitianOperator conjugate(const HermitianOperator& a, const Matrix& v) {
    if (v.cols() != a.dim()) throw Error(ErrorKind::DimMismatch, "isometry columns must match operator dim");
    Matrix m = v * a.matrix() * v.adjoint();
    return HermitianOperator(Matrix((m + m.adjoint()) / 2.0));
}

double trace_product(const HermitianOperator& a, const HermitianOperator& b) {
    require_same_dim(a, b);
    return (a.matrix().cwiseProduct(b.matrix().transpose())).sum().real();
}

} // namespace qrd
