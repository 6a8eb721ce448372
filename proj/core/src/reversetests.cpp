#include "qrd/reversetests.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "qrd/divergences.hpp"
#include "qrd/sampling.hpp"

namespace qrd {

namespace {

HermitianOperator hermitian_part(const Matrix& m) { return HermitianOperator(Matrix((m + m.adjoint()) / 2.0)); }

// d^2 real coordinates of a Hermitian matrix: diagonal, then real/imag of the upper triangle.
Eigen::VectorXd real_coordinates(const Matrix& m) {
    const int d = static_cast<int>(m.rows());
    Eigen::VectorXd out(d * d);
    int at = 0;
    for (int i = 0; i < d; ++i) out(at++) = m(i, i).real();
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            out(at++) = m(i, j).real();
            out(at++) = m(i, j).imag();
        }
    return out;
}

Eigen::MatrixXd column_map(const std::vector<Matrix>& omegas) {
    const int d = static_cast<int>(omegas.front().rows());
    Eigen::MatrixXd a(d * d, omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = real_coordinates(omegas[i]);
    return a;
}

double max_deviation(const HermitianOperator& a, const HermitianOperator& b) {
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

std::vector<double> clamp_nonnegative(std::vector<double> v) {
    for (double& x : v) x = std::max(x, 0.0);
    return v;
}

void require_alpha(double alpha) {
    if (!(alpha > 0) || alpha == 1.0 || !std::isfinite(alpha))
        throw Error(ErrorKind::BadAlpha, "alpha must lie in (0,1) or (1,inf)");
}

// Mutable working copy used by the local search.
struct Working {
    std::vector<Matrix> omegas;
    std::vector<double> p;
    std::vector<double> q;
};

double working_value(const std::vector<double>& p, const std::vector<double>& q, double alpha) {
    try {
        return classical_renyi(WeightVector(clamp_nonnegative(p)), WeightVector(clamp_nonnegative(q)), alpha)
            .as_double();
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

Eigen::MatrixXd null_basis(const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cut = 1e-10 * (s.size() ? s(0) : 1.0);
    int rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    return svd.matrixV().rightCols(a.cols() - rank);
}

// Minimizes the value along weights + t * dir inside the nonnegative orthant; the
// objective is convex in t, so golden-section search is enough.
bool line_search(std::vector<double>& weights, const Eigen::VectorXd& dir,
                 const std::function<double(const std::vector<double>&)>& value, double& current) {
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double v = dir(static_cast<Eigen::Index>(i));
        if (v > 1e-15) lo = std::max(lo, -weights[i] / v);
        if (v < -1e-15) hi = std::min(hi, -weights[i] / v);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi - lo < 1e-15) return false;
    auto at = [&](double t) {
        std::vector<double> w = weights;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::max(0.0, w[i] + t * dir(static_cast<Eigen::Index>(i)));
        return value(w);
    };
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi;
    double c = b - g * (b - a), e = a + g * (b - a);
    double fc = at(c), fe = at(e);
    for (int it = 0; it < 80; ++it) {
        if (fc < fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = at(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = at(e);
        }
    }
    const double t = (a + b) / 2;
    const double ft = at(t);
    if (!(ft < current - 1e-14)) return false;
    for (std::size_t i = 0; i < weights.size(); ++i)
        weights[i] = std::max(0.0, weights[i] + t * dir(static_cast<Eigen::Index>(i)));
    current = ft;
    return true;
}

// Re-optimizes p and q for fixed columns along the null directions of the column map.
double weight_descent(Working& w, double alpha) {
    const Eigen::MatrixXd nulls = null_basis(column_map(w.omegas));
    double current = working_value(w.p, w.q, alpha);
    auto by_p = [&](const std::vector<double>& p) { return working_value(p, w.q, alpha); };
    auto by_q = [&](const std::vector<double>& q) { return working_value(w.p, q, alpha); };
    for (int sweep = 0; sweep < 30 && nulls.cols() > 0; ++sweep) {
        const double before = current;
        for (Eigen::Index c = 0; c < nulls.cols(); ++c) {
            line_search(w.p, nulls.col(c), by_p, current);
            line_search(w.q, nulls.col(c), by_q, current);
        }
        if (!(current < before - 1e-13)) break;
    }
    return current;
}

// Largest t with omega + t * h still PSD, found by bisection on the smallest eigenvalue.
double max_psd_step(const Matrix& omega, const Matrix& h) {
    auto ok = [&](double t) { return hermitian_part(omega + t * h).min_eigenvalue() >= 0; };
    double hi = 1.0;
    while (ok(hi) && hi < 1e6) hi *= 2;
    double lo = 0;
    for (int it = 0; it < 40; ++it) {
        const double mid = (lo + hi) / 2;
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

// Moves three columns along c_m * H with sum c_m p_m = sum c_m q_m = 0 and H traceless,
// which keeps both reconstructions and every trace fixed.
bool column_move(Working& w, Rng& rng) {
    const int n = static_cast<int>(w.omegas.size());
    const int d = static_cast<int>(w.omegas.front().rows());
    if (n < 3) return false;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    const int pick[3] = {idx[0], idx[1], idx[2]};
    Eigen::MatrixXd rows(2, 3);
    for (int m = 0; m < 3; ++m) {
        rows(0, m) = w.p[pick[m]];
        rows(1, m) = w.q[pick[m]];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
    const Eigen::Vector3d c = svd.matrixV().col(2);
    Matrix h = random_ginibre(d, d, rng);
    h = (h + h.adjoint()) / 2.0;
    h -= (h.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
    h /= h.norm();
    if (uniform(rng) < 0.5) h = -h;
    double step = std::numeric_limits<double>::infinity();
    for (int m = 0; m < 3; ++m)
        if (std::abs(c(m)) > 1e-14) step = std::min(step, max_psd_step(w.omegas[pick[m]], c(m) * h));
    if (!std::isfinite(step) || step <= 0) return false;
    const double t = uniform(rng, 0.05, 1.0) * step;
    for (int m = 0; m < 3; ++m) w.omegas[pick[m]] = hermitian_part(w.omegas[pick[m]] + t * c(m) * h).matrix();
    return true;
}

Working to_working(const ReverseTest& rt) {
    Working w;
    for (const auto& o : rt.omegas) w.omegas.push_back(o.matrix());
    w.p = rt.p.values();
    w.q = rt.q.values();
    return w;
}

ReverseTest from_working(const Working& w) {
    std::vector<HermitianOperator> omegas;
    for (const auto& o : w.omegas) omegas.push_back(hermitian_part(o / o.trace().real()));
    return ReverseTest(std::move(omegas), WeightVector(clamp_nonnegative(w.p)), WeightVector(clamp_nonnegative(w.q)));
}

// Splits the heaviest column into identical halves until there are `target` columns.
void pad_columns(Working& w, std::size_t target) {
    while (w.omegas.size() < target) {
        std::size_t heavy = 0;
        for (std::size_t i = 1; i < w.p.size(); ++i)
            if (w.p[i] + w.q[i] > w.p[heavy] + w.q[heavy]) heavy = i;
        w.p[heavy] /= 2;
        w.q[heavy] /= 2;
        w.omegas.push_back(w.omegas[heavy]);
        w.p.push_back(w.p[heavy]);
        w.q.push_back(w.q[heavy]);
    }
}

} // namespace

ReverseTest::ReverseTest(std::vector<HermitianOperator> omegas_in, WeightVector p_in, WeightVector q_in)
    : omegas(std::move(omegas_in)), p(std::move(p_in)), q(std::move(q_in)) {
    if (omegas.empty()) throw Error(ErrorKind::BadParams, "reverse test needs at least one column");
    if (p.size() != omegas.size() || q.size() != omegas.size())
        throw Error(ErrorKind::DimMismatch, "weight vectors must match the number of columns");
    const int d = omegas.front().dim();
    for (const auto& o : omegas) {
        if (o.dim() != d) throw Error(ErrorKind::DimMismatch, "reverse test columns differ in dimension");
        if (o.min_eigenvalue() < -1e-10) throw Error(ErrorKind::NotPSD, "reverse test column is not PSD");
        if (std::abs(o.trace() - 1.0) > 1e-10) throw Error(ErrorKind::BadParams, "reverse test column is not unit trace");
    }
}

HermitianOperator ReverseTest::image_p() const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (std::size_t i = 0; i < size(); ++i) m += p[i] * omegas[i].matrix();
    return hermitian_part(m);
}

HermitianOperator ReverseTest::image_q() const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (std::size_t i = 0; i < size(); ++i) m += q[i] * omegas[i].matrix();
    return hermitian_part(m);
}

bool validate_reverse_test(const ReverseTest& rt, const HermitianOperator& rho, const HermitianOperator& sigma) {
    if (rt.dim() != rho.dim() || rt.dim() != sigma.dim())
        throw Error(ErrorKind::DimMismatch, "reverse test and target dimensions differ");
    return max_deviation(rt.image_p(), rho) <= 1e-9 && max_deviation(rt.image_q(), sigma) <= 1e-9;
}

ExtendedReal rt_f_divergence(const ReverseTest& rt, const ConvexFunctionSpec& f) {
    return classical_fdiv(f, rt.p, rt.q);
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations) {
    const Eigen::Index n = a.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff());
    for (int outer = 0; outer < max_iterations; ++outer) {
        const Eigen::VectorXd grad = a.transpose() * (b - a * x);
        Eigen::Index j = -1;
        for (Eigen::Index i = 0; i < n; ++i)
            if (!passive[static_cast<std::size_t>(i)] && grad(i) > tol && (j < 0 || grad(i) > grad(j))) j = i;
        if (j < 0) break;
        passive[static_cast<std::size_t>(j)] = true;
        for (int inner = 0; inner < max_iterations; ++inner) {
            std::vector<Eigen::Index> cols;
            for (Eigen::Index i = 0; i < n; ++i)
                if (passive[static_cast<std::size_t>(i)]) cols.push_back(i);
            Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
            for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
            const Eigen::VectorXd sol = sub.colPivHouseholderQr().solve(b);
            Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
            for (std::size_t c = 0; c < cols.size(); ++c) s(cols[c]) = sol(static_cast<Eigen::Index>(c));
            bool positive = true;
            for (Eigen::Index i : cols)
                if (s(i) <= 0) positive = false;
            if (positive) {
                x = s;
                break;
            }
            double step = 1.0;
            for (Eigen::Index i : cols)
                if (s(i) <= 0) step = std::min(step, x(i) / (x(i) - s(i)));
            x += step * (s - x);
            for (Eigen::Index i : cols)
                if (x(i) <= tol) {
                    x(i) = 0;
                    passive[static_cast<std::size_t>(i)] = false;
                }
        }
    }
    return x;
}

ReverseTest caratheodory_reduce(const ReverseTest& rt) {
    const std::size_t n = rt.size();
    if (n < 2) throw Error(ErrorKind::NoConvexWitness, "a single column cannot be reduced");
    std::vector<Matrix> mats;
    for (const auto& o : rt.omegas) mats.push_back(o.matrix());
    const Eigen::MatrixXd coords = column_map(mats);
    const Eigen::Index rows = coords.rows();
    for (std::size_t k = n; k-- > 0;) {
        // Convex weights over the other columns reproducing column k: omega rows plus sum(lambda) = 1.
        Eigen::MatrixXd a(rows + 1, static_cast<Eigen::Index>(n - 1));
        Eigen::VectorXd b(rows + 1);
        b.head(rows) = coords.col(static_cast<Eigen::Index>(k));
        b(rows) = 1.0;
        std::vector<std::size_t> others;
        for (std::size_t i = 0; i < n; ++i)
            if (i != k) others.push_back(i);
        for (std::size_t c = 0; c < others.size(); ++c) {
            a.block(0, static_cast<Eigen::Index>(c), rows, 1) = coords.col(static_cast<Eigen::Index>(others[c]));
            a(rows, static_cast<Eigen::Index>(c)) = 1.0;
        }
        Eigen::VectorXd lambda = nnls(a, b);
        if ((a * lambda - b).norm() > 1e-9) continue;
        lambda /= lambda.sum();
        std::vector<HermitianOperator> omegas;
        std::vector<double> p, q;
        for (std::size_t c = 0; c < others.size(); ++c) {
            omegas.push_back(rt.omegas[others[c]]);
            p.push_back(rt.p[others[c]] + lambda(static_cast<Eigen::Index>(c)) * rt.p[k]);
            q.push_back(rt.q[others[c]] + lambda(static_cast<Eigen::Index>(c)) * rt.q[k]);
        }
        return ReverseTest(std::move(omegas), WeightVector(std::move(p)), WeightVector(std::move(q)));
    }
    throw Error(ErrorKind::NoConvexWitness, "no column lies in the convex hull of the others");
}

ReverseTest spectral_reverse_test(const HermitianOperator& rho, const HermitianOperator& sigma) {
    require_valid_pair(rho, sigma);
    const int d = rho.dim();
    const Projection sp = support_projection(sigma);
    const Matrix s_basis = sp.basis();
    const bool dominated = support_leq(rho, sigma);

    // The part of rho living on supp(sigma) that sigma can dominate: the compression when
    // rho^0 <= sigma^0, the shorted operator otherwise.
    Matrix reduced = s_basis.adjoint() * rho.matrix() * s_basis;
    if (!dominated) {
        const HermitianOperator complement = HermitianOperator::identity(d) - sp.op();
        const Matrix k_basis = support_projection(complement).basis();
        const Matrix b = s_basis.adjoint() * rho.matrix() * k_basis;
        const Matrix c = k_basis.adjoint() * rho.matrix() * k_basis;
        reduced -= b * supported_power(hermitian_part(c), -1.0).matrix() * b.adjoint();
    }
    const HermitianOperator sc = hermitian_part(s_basis.adjoint() * sigma.matrix() * s_basis);
    const Matrix s_half = supported_power(sc, 0.5).matrix();
    const Matrix s_inv_half = supported_power(sc, -0.5).matrix();
    const HermitianOperator ratio = hermitian_part(s_inv_half * reduced * s_inv_half);

    std::vector<HermitianOperator> omegas;
    std::vector<double> p, q;
    Matrix covered = Matrix::Zero(d, d);
    for (int j = 0; j < ratio.dim(); ++j) {
        const CVector lifted = s_basis * (s_half * ratio.eigenvectors().col(j));
        const double weight = lifted.squaredNorm();
        const double t = std::max(ratio.eigenvalues()(j), 0.0);
        omegas.push_back(HermitianOperator::projector(lifted / std::sqrt(weight)));
        q.push_back(weight);
        p.push_back(t * weight);
        covered += p.back() * omegas.back().matrix();
    }
    if (!dominated) {
        const HermitianOperator leftover =
            hermitian_part(rho.matrix() - covered).map_spectrum([](double x) { return std::max(x, 0.0); });
        const double mass = leftover.trace();
        if (mass > 1e-14 * rho.trace()) {
            omegas.push_back(leftover.scaled(1.0 / mass));
            p.push_back(mass);
            q.push_back(0.0);
        }
    }
    return ReverseTest(std::move(omegas), WeightVector(std::move(p)), WeightVector(std::move(q)));
}

MaximalDivergenceBound maximal_divergence_upper(const HermitianOperator& rho, const HermitianOperator& sigma,
                                                double alpha, int restarts, std::uint64_t seed) {
    require_alpha(alpha);
    require_valid_pair(rho, sigma);
    if (alpha > 1 && !support_leq(rho, sigma))
        throw Error(ErrorKind::SupportViolation, "alpha > 1 needs rho^0 <= sigma^0");
    const ReverseTest spectral = spectral_reverse_test(rho, sigma);
    const ExtendedReal spectral_value = classical_renyi(spectral.p, spectral.q, alpha);
    if (alpha <= 2) return {spectral_value, spectral, true};

    const int d = rho.dim();
    const std::size_t columns = static_cast<std::size_t>(d) * d + 1;
    ReverseTest best = spectral;
    double best_value = spectral_value.as_double();
    for (int r = 0; r < std::max(1, restarts); ++r) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
        Working w = to_working(spectral);
        pad_columns(w, columns);
        // Later restarts begin from a randomly displaced copy of the spectral test.
        if (r > 0)
            for (int m = 0; m < 10; ++m) column_move(w, rng);
        double value = weight_descent(w, alpha);
        for (int it = 0; it < 150; ++it) {
            Working trial = w;
            if (!column_move(trial, rng)) continue;
            const double tv = weight_descent(trial, alpha);
            if (tv < value - 1e-13) {
                w = std::move(trial);
                value = tv;
            }
        }
        if (!(value < best_value)) continue;
        try {
            ReverseTest candidate = from_working(w);
            if (!validate_reverse_test(candidate, rho, sigma)) continue;
            const double cv = classical_renyi(candidate.p, candidate.q, alpha).as_double();
            if (cv < best_value) {
                best = std::move(candidate);
                best_value = cv;
            }
        } catch (const Error&) {
        }
    }
    return {classical_renyi(best.p, best.q, alpha), best, false};
}

} // namespace qrd
