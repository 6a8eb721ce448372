#include "qrd/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrd/measured.hpp"
#include "qrd/sampling.hpp"

namespace qrd {

namespace {

HermitianOperator hermitian_part(const Matrix& m) { return HermitianOperator(Matrix((m + m.adjoint()) / 2.0)); }

// vec(K) with vec(K)[i * d_out + j] = K(j, i), so (I (x) K)|Omega> = vec(K).
CVector vectorize(const Matrix& k) {
    const Eigen::Index d_out = k.rows(), d_in = k.cols();
    CVector v(d_in * d_out);
    for (Eigen::Index i = 0; i < d_in; ++i)
        for (Eigen::Index j = 0; j < d_out; ++j) v(i * d_out + j) = k(j, i);
    return v;
}

Matrix unvectorize(const CVector& v, int d_in, int d_out) {
    Matrix k(d_out, d_in);
    for (int i = 0; i < d_in; ++i)
        for (int j = 0; j < d_out; ++j) k(j, i) = v(i * d_out + j);
    return k;
}

void require_same_shape(const Channel& a, const Channel& b) {
    if (a.d_in() != b.d_in() || a.d_out() != b.d_out())
        throw Error(ErrorKind::DimMismatch, "channels differ in input or output dimension");
}

void require_whitelisted(const ChannelDivergenceSpec& spec) {
    if (!whitelisted(spec))
        throw Error(ErrorKind::KindNotWhitelisted, "divergence kind is not monotone under channels in this range");
}

double as_score(const ExtendedReal& v) {
    return v.is_infinite() ? std::numeric_limits<double>::infinity() : v.value();
}

CVector from_real(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size() / 2;
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(x(2 * i), x(2 * i + 1));
    return v;
}

Eigen::VectorXd to_real(const CVector& v) {
    Eigen::VectorXd x(2 * v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        x(2 * i) = v(i).real();
        x(2 * i + 1) = v(i).imag();
    }
    return x;
}

struct SphereOutcome {
    Eigen::VectorXd point;
    double value;
    bool converged;
};

// Gradient ascent on the unit sphere: central differences, tangent projection, renormalizing retraction.
template <class F>
SphereOutcome sphere_ascent(Eigen::VectorXd x, F&& f) {
    x.normalize();
    double value = f(x);
    double step = 0.1;
    const double h = 1e-6;
    for (int it = 0; it < 200; ++it) {
        if (std::isinf(value) && value > 0) return {x, value, true};
        Eigen::VectorXd grad(x.size());
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            Eigen::VectorXd up = x, down = x;
            up(j) += h;
            down(j) -= h;
            const double fu = f(up.normalized()), fd = f(down.normalized());
            grad(j) = std::isfinite(fu) && std::isfinite(fd) ? (fu - fd) / (2 * h) : 0.0;
        }
        grad -= grad.dot(x) * x;
        const double norm = grad.norm();
        if (norm < 1e-10) return {x, value, true};
        bool moved = false;
        while (step > 1e-12) {
            const Eigen::VectorXd trial = (x + step * grad / norm).normalized();
            const double tv = f(trial);
            if (tv > value) {
                const double gain = tv - value;
                x = trial;
                value = tv;
                moved = true;
                step = std::min(2 * step, 1.0);
                if (gain < 1e-13 * (1 + std::abs(value))) return {x, value, true};
                break;
            }
            step /= 2;
        }
        if (!moved) return {x, value, true};
    }
    return {x, value, false};
}

} // namespace

Channel::Channel(std::vector<Matrix> kraus, int d_in, int d_out) : kraus_(std::move(kraus)), d_in_(d_in), d_out_(d_out) {
    Matrix c = Matrix::Zero(d_in * d_out, d_in * d_out);
    for (const auto& k : kraus_) {
        const CVector v = vectorize(k);
        c += v * v.adjoint();
    }
    choi_ = hermitian_part(c);
}

Channel Channel::from_kraus(std::vector<Matrix> kraus) {
    if (kraus.empty()) throw Error(ErrorKind::BadParams, "channel needs at least one Kraus operator");
    const Eigen::Index d_out = kraus.front().rows(), d_in = kraus.front().cols();
    if (d_in < 1 || d_out < 1) throw Error(ErrorKind::BadParams, "Kraus operators must be nonempty");
    for (const auto& k : kraus)
        if (k.rows() != d_out || k.cols() != d_in)
            throw Error(ErrorKind::DimMismatch, "Kraus operators differ in shape");
    return Channel(std::move(kraus), static_cast<int>(d_in), static_cast<int>(d_out));
}

Channel Channel::from_choi(const HermitianOperator& choi, int d_in, int d_out) {
    if (d_in < 1 || d_out < 1 || choi.dim() != d_in * d_out)
        throw Error(ErrorKind::DimMismatch, "Choi matrix size must be d_in * d_out");
    require_psd(choi);
    std::vector<Matrix> kraus;
    const RVector ev = clamped_spectrum(choi);
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > 0) kraus.push_back(std::sqrt(ev(i)) * unvectorize(choi.eigenvectors().col(i), d_in, d_out));
    if (kraus.empty()) kraus.push_back(Matrix::Zero(d_out, d_in));
    return Channel(std::move(kraus), d_in, d_out);
}

Channel Channel::identity(int d) { return from_kraus({Matrix::Identity(d, d)}); }

Channel Channel::depolarizing(int d, double p) {
    if (!(p >= 0 && p <= 1)) throw Error(ErrorKind::BadParams, "depolarizing probability must lie in [0,1]");
    const CVector omega = vectorize(Matrix::Identity(d, d));
    const Matrix c = (1 - p) * omega * omega.adjoint() + (p / d) * Matrix::Identity(d * d, d * d);
    return from_choi(hermitian_part(c), d, d);
}

Channel Channel::classical(const Eigen::MatrixXd& w) {
    if (w.size() == 0 || w.minCoeff() < 0) throw Error(ErrorKind::BadParams, "transition matrix must be nonnegative");
    for (Eigen::Index x = 0; x < w.cols(); ++x)
        if (std::abs(w.col(x).sum() - 1.0) > 1e-9)
            throw Error(ErrorKind::BadParams, "transition matrix columns must sum to 1");
    std::vector<Matrix> kraus;
    for (Eigen::Index x = 0; x < w.cols(); ++x)
        for (Eigen::Index y = 0; y < w.rows(); ++y) {
            if (w(y, x) <= 0) continue;
            Matrix k = Matrix::Zero(w.rows(), w.cols());
            k(y, x) = std::sqrt(w(y, x));
            kraus.push_back(k);
        }
    return from_kraus(std::move(kraus));
}

bool Channel::trace_preserving() const {
    Matrix s = Matrix::Zero(d_in_, d_in_);
    for (const auto& k : kraus_) s += k.adjoint() * k;
    return (s - Matrix::Identity(d_in_, d_in_)).cwiseAbs().maxCoeff() <= 1e-9;
}

bool Channel::cp_plus() const {
    Matrix s = Matrix::Zero(d_in_, d_in_);
    for (const auto& k : kraus_) s += k.adjoint() * k;
    const HermitianOperator sh = hermitian_part(s);
    return sh.min_eigenvalue() > 1e-12 * std::max(1.0, sh.max_eigenvalue());
}

HermitianOperator Channel::apply(const HermitianOperator& rho) const {
    if (rho.dim() != d_in_) throw Error(ErrorKind::DimMismatch, "input dimension does not match the channel");
    Matrix out = Matrix::Zero(d_out_, d_out_);
    for (const auto& k : kraus_) out += k * rho.matrix() * k.adjoint();
    return hermitian_part(out);
}

HermitianOperator apply_extended(const Channel& channel, const HermitianOperator& rho_bipartite) {
    const int d_in = channel.d_in();
    if (rho_bipartite.dim() % d_in != 0)
        throw Error(ErrorKind::DimMismatch, "bipartite input dimension is not a multiple of d_in");
    const int r = rho_bipartite.dim() / d_in;
    const Matrix id = Matrix::Identity(r, r);
    const int d_out = channel.d_out();
    Matrix out = Matrix::Zero(r * d_out, r * d_out);
    for (const auto& k : channel.kraus()) {
        const Matrix big = kron(id, k);
        out += big * rho_bipartite.matrix() * big.adjoint();
    }
    return hermitian_part(out);
}

bool cp_order_check(const Channel& n1, const Channel& n2, double lambda) {
    require_same_shape(n1, n2);
    const Matrix diff = lambda * n2.choi().matrix() - n1.choi().matrix();
    return hermitian_part(diff).min_eigenvalue() >= -1e-9;
}

ExtendedReal channel_dmax(const Channel& n1, const Channel& n2) {
    require_same_shape(n1, n2);
    return d_max(n1.choi(), n2.choi());
}

ExtendedReal channel_dmax_bisection(const Channel& n1, const Channel& n2, double tol) {
    require_same_shape(n1, n2);
    double hi = 1.0;
    while (!cp_order_check(n1, n2, hi)) {
        hi *= 2;
        if (hi > 1e12) return ExtendedReal::infinity();
    }
    double lo = 0;
    while (hi - lo > tol * hi) {
        const double mid = (lo + hi) / 2;
        (cp_order_check(n1, n2, mid) ? hi : lo) = mid;
    }
    return std::log(hi);
}

ChannelDivergenceSpec ChannelDivergenceSpec::alpha_z(const DivergenceParams& params) {
    return {DivergenceKind::AlphaZ, params};
}
ChannelDivergenceSpec ChannelDivergenceSpec::umegaki() { return {DivergenceKind::Umegaki, std::nullopt}; }
ChannelDivergenceSpec ChannelDivergenceSpec::measured(double alpha) {
    // The z slot is unused; it only carries alpha.
    return {DivergenceKind::Measured, DivergenceParams::finite(alpha, 1.0)};
}
ChannelDivergenceSpec ChannelDivergenceSpec::dmax() { return {DivergenceKind::DMax, std::nullopt}; }

bool whitelisted(const ChannelDivergenceSpec& spec) {
    switch (spec.kind) {
    case DivergenceKind::Umegaki:
    case DivergenceKind::DMax:
        return true;
    case DivergenceKind::Measured:
        return spec.params.has_value();
    case DivergenceKind::AlphaZ:
        break;
    }
    if (!spec.params) return false;
    const DivergenceParams& p = *spec.params;
    const double a = p.alpha();
    if (a == 1.0) return true;
    if (p.z_kind() == DivergenceParams::ZKind::ZeroLimit) return false;
    if (a > 1) {
        if (p.z_kind() == DivergenceParams::ZKind::Infinite) return false;
        return std::max(a / 2, a - 1) <= p.z() && p.z() <= a;
    }
    if (p.z_kind() == DivergenceParams::ZKind::Infinite) return true;
    return p.z() >= std::max(a, 1 - a);
}

ExtendedReal channel_divergence_at(const Channel& n1, const Channel& n2, const ChannelDivergenceSpec& spec,
                                   const CVector& psi) {
    require_same_shape(n1, n2);
    const int d = n1.d_in();
    if (psi.size() != d * d) throw Error(ErrorKind::DimMismatch, "input vector must live in C^d_in (x) C^d_in");
    const HermitianOperator input = HermitianOperator::projector(psi.normalized());
    const HermitianOperator out1 = apply_extended(n1, input);
    const HermitianOperator out2 = apply_extended(n2, input);
    switch (spec.kind) {
    case DivergenceKind::Umegaki:
        return umegaki(out1, out2);
    case DivergenceKind::DMax:
        return d_max(out1, out2);
    case DivergenceKind::Measured:
        // Projective seeds only; any POVM certifies a lower bound and this keeps the objective deterministic.
        return measured_renyi_lower(out1, out2, spec.params->alpha(), 0, 0).value;
    case DivergenceKind::AlphaZ:
        break;
    }
    return d_alpha_z(out1, out2, *spec.params).d_value;
}

ChannelDivergenceResult channel_divergence(const Channel& n1, const Channel& n2, const ChannelDivergenceSpec& spec,
                                           int restarts, std::uint64_t seed) {
    require_same_shape(n1, n2);
    require_whitelisted(spec);
    if (restarts < 0) throw Error(ErrorKind::BadParams, "restarts must be nonnegative");
    const int d = n1.d_in();
    const int dim = d * d;
    CVector maximally_entangled = CVector::Zero(dim);
    for (int i = 0; i < d; ++i) maximally_entangled(i * d + i) = 1.0;
    maximally_entangled.normalize();

    const ExtendedReal ceiling = channel_dmax(n1, n2);
    if (spec.kind == DivergenceKind::DMax) return {ceiling, maximally_entangled, 0, true};

    // Every whitelisted divergence sits below the channel D_max, so with a finite ceiling an
    // infinite evaluation only means the output supports straddle the rank cutoff.
    auto objective = [&](const Eigen::VectorXd& x) {
        try {
            const double v = as_score(channel_divergence_at(n1, n2, spec, from_real(x)));
            if (std::isinf(v) && ceiling.is_finite()) return -std::numeric_limits<double>::infinity();
            return v;
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    std::vector<CVector> starts{maximally_entangled};
    for (int i = 0; i < d; ++i) {
        CVector v = CVector::Zero(dim);
        v(i * d + i) = 1.0;
        starts.push_back(v);
    }
    for (int r = 0; r < restarts; ++r) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
        starts.push_back(random_unit_vector(dim, rng));
    }

    Eigen::VectorXd best_point;
    double best_value = -std::numeric_limits<double>::infinity();
    bool best_converged = true;
    int used = 0;
    for (const auto& s : starts) {
        const SphereOutcome out = sphere_ascent(to_real(s), objective);
        ++used;
        if (best_point.size() == 0 || out.value > best_value) {
            best_point = out.point;
            best_value = out.value;
            best_converged = out.converged;
        }
        if (std::isinf(best_value) && best_value > 0) break;
    }
    const CVector argmax = from_real(best_point).normalized();
    return {channel_divergence_at(n1, n2, spec, argmax), argmax, used, best_converged};
}

ChannelDivergenceSpec sweep_spec(SweepFamily family, double alpha) {
    if (!(alpha > 0)) throw Error(ErrorKind::BadAlpha, "alpha must be positive");
    switch (family) {
    case SweepFamily::Measured:
        return ChannelDivergenceSpec::measured(alpha);
    case SweepFamily::Petz:
        if (alpha == 1.0) return ChannelDivergenceSpec::umegaki();
        return ChannelDivergenceSpec::alpha_z(DivergenceParams::finite(alpha, 1.0));
    case SweepFamily::Sandwiched:
        break;
    }
    if (alpha == 1.0) return ChannelDivergenceSpec::umegaki();
    return ChannelDivergenceSpec::alpha_z(DivergenceParams::finite(alpha, alpha));
}

ChannelSweep alpha_sweep_channel(const Channel& n1, const Channel& n2, SweepFamily family,
                                 const std::vector<double>& alpha_grid, int shared_restarts, std::uint64_t seed) {
    if (alpha_grid.empty()) throw Error(ErrorKind::BadParams, "alpha grid is empty");
    ChannelSweep out{{}, true};
    for (double alpha : alpha_grid) {
        const ChannelDivergenceResult r = channel_divergence(n1, n2, sweep_spec(family, alpha), shared_restarts, seed);
        out.points.emplace_back(alpha, r.value);
    }
    if (family != SweepFamily::Measured) {
        std::vector<std::pair<double, ExtendedReal>> sorted = out.points;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i].second.as_double() < sorted[i - 1].second.as_double() - 1e-3) out.monotone = false;
    }
    return out;
}

} // namespace qrd
