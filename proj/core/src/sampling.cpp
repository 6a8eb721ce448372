#include "qrd/sampling.hpp"

#include <cmath>

namespace qrd {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
    return Rng(seq);
}

double uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

Matrix random_ginibre(int rows, int cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    return g;
}

Matrix random_unitary(int d, Rng& rng) {
    Matrix g = random_ginibre(d, d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix column phases so the distribution is Haar.
    for (int i = 0; i < d; ++i) {
        const double mag = std::abs(r(i, i));
        if (mag > 0) q.col(i) *= r(i, i) / mag;
    }
    return q;
}

CVector random_unit_vector(int d, Rng& rng) {
    CVector v = random_ginibre(d, 1, rng).col(0);
    return v / v.norm();
}

HermitianOperator random_state(int d, Rng& rng, int rank) {
    if (rank < 0) rank = d;
    Matrix g = random_ginibre(d, rank, rng);
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    return HermitianOperator(Matrix((m + m.adjoint()) / 2.0));
}

HermitianOperator random_invertible_state(int d, Rng& rng, double floor) {
    HermitianOperator base = random_state(d, rng);
    // Mix toward I/d until the floor holds; floor * d < 1 is assumed.
    const double t = std::min(1.0, floor * d);
    Matrix m = (1 - t) * base.matrix() + (t / d) * Matrix::Identity(d, d);
    return HermitianOperator(m);
}

HermitianOperator random_with_spectrum(const RVector& spectrum, Rng& rng) {
    Matrix u = random_unitary(static_cast<int>(spectrum.size()), rng);
    Matrix m = u * spectrum.cast<Complex>().asDiagonal() * u.adjoint();
    return HermitianOperator(Matrix((m + m.adjoint()) / 2.0));
}

} // namespace qrd
