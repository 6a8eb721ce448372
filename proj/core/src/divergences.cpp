#include "qrd/divergences.hpp"

#include <cmath>
#include <sstream>

#include "qrd/zlimits.hpp"

namespace qrd {

namespace {

constexpr int kGradedMaxDim = 8;

// Tr (B B^dagger)^e from the singular values of B; small eigenvalues keep their relative
// accuracy, unlike forming B B^dagger first.
double factor_trace_power(const Matrix& b, double e) {
    Eigen::JacobiSVD<Matrix> svd(b);
    double total = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 0) total += std::pow(svd.singularValues()(i), 2 * e);
    return total;
}

// Smallest eigenvalue of sigma^0 - rho^0; negative beyond -1e-8 means rho^0 is not below sigma^0.
double support_margin(const HermitianOperator& rho, const HermitianOperator& sigma) {
    return (support_projection(sigma).op() - support_projection(rho).op()).min_eigenvalue();
}

void note_borderline(const HermitianOperator& rho, const HermitianOperator& sigma, std::vector<std::string>& flags) {
    const double m = support_margin(rho, sigma);
    if (m < -1e-12 && m >= -1e-8) flags.emplace_back("support_borderline");
}

Matrix support_basis(const HermitianOperator& a) {
    return support_projection(a).basis();
}

} // namespace

DivergenceParams::DivergenceParams(double alpha, ZKind kind, double z) : alpha_(alpha), kind_(kind), z_(z) {
    if (!(alpha > 0) || !std::isfinite(alpha)) throw Error(ErrorKind::BadAlpha, "alpha must be positive and finite");
    if (kind == ZKind::Finite && (!(z > 0) || !std::isfinite(z)))
        throw Error(ErrorKind::BadParams, "finite z must be positive");
    if (kind == ZKind::ZeroLimit && alpha == 1.0)
        throw Error(ErrorKind::BadParams, "the z -> 0 limit is not defined at alpha = 1");
}

DivergenceParams DivergenceParams::finite(double alpha, double z) { return {alpha, ZKind::Finite, z}; }
DivergenceParams DivergenceParams::infinite(double alpha) { return {alpha, ZKind::Infinite, 0.0}; }
DivergenceParams DivergenceParams::zero_limit(double alpha) { return {alpha, ZKind::ZeroLimit, 0.0}; }

std::string DivergenceParams::describe() const {
    std::ostringstream os;
    os << "alpha=" << alpha_ << " z=";
    switch (kind_) {
    case ZKind::Finite: os << z_; break;
    case ZKind::Infinite: os << "inf"; break;
    case ZKind::ZeroLimit: os << "0+"; break;
    }
    return os.str();
}

void require_valid_pair(const HermitianOperator& rho, const HermitianOperator& sigma) {
    if (rho.dim() != sigma.dim()) throw Error(ErrorKind::DimMismatch, "rho and sigma dimensions differ");
    require_psd(rho);
    require_psd(sigma);
    if (!(rho.max_eigenvalue() > 0)) throw Error(ErrorKind::ZeroOperator, "rho is zero");
    if (!(sigma.max_eigenvalue() > 0)) throw Error(ErrorKind::ZeroOperator, "sigma is zero");
}

namespace {

// log(max/min) over the nonzero spectrum, and whether the operator is singular
std::pair<double, bool> log_spread(const HermitianOperator& a) {
    const RVector ev = clamped_spectrum(a);
    double lo = ev(0);
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > 0) lo = std::min(lo, ev(i));
    return {std::log(ev(0) / lo), ev.minCoeff() <= 0};
}

// The factor form X = A^p B^(q/2) costs roughly eps * cond(X)^(1 - 2z) relative error in the
// total; the graded spectrum is exact in that respect but far slower, so keep it for the
// cases the factor form would get wrong.
bool needs_graded(const HermitianOperator& a, double p, const HermitianOperator& b, double q, double z) {
    if (a.dim() > kGradedMaxDim || z >= 0.5) return false;
    const auto [spread_a, singular_a] = log_spread(a);
    const auto [spread_b, singular_b] = log_spread(b);
    if (singular_a || singular_b) return true;
    return (1 - 2 * z) * (std::abs(p) * spread_a + 0.5 * std::abs(q) * spread_b) > 9;
}

} // namespace

double sandwich_trace_power(const HermitianOperator& a, double p, const HermitianOperator& b, double q, double z) {
    if (needs_graded(a, p, b, q, z)) {
        double total = 0;
        for (double l : graded_sandwich_log_spectrum(a, p, b, q))
            if (std::isfinite(l)) total += std::exp(z * l);
        return total;
    }
    return factor_trace_power(supported_power(a, p).matrix() * supported_power(b, 0.5 * q).matrix(), z);
}

ExtendedReal q_alpha_z(const HermitianOperator& rho, const HermitianOperator& sigma, const DivergenceParams& params) {
    require_valid_pair(rho, sigma);
    const double alpha = params.alpha();
    switch (params.z_kind()) {
    case DivergenceParams::ZKind::Infinite: return pinch_exp(rho, sigma, alpha);
    case DivergenceParams::ZKind::ZeroLimit: return d_alpha_zero(rho, sigma, alpha).q_value;
    case DivergenceParams::ZKind::Finite: break;
    }
    if (alpha > 1 && !support_leq(rho, sigma)) return ExtendedReal::infinity();
    const double z = params.z();
    return sandwich_trace_power(rho, alpha / (2 * z), sigma, (1 - alpha) / z, z);
}

DivergenceValue d_alpha_z(const HermitianOperator& rho, const HermitianOperator& sigma, const DivergenceParams& params) {
    require_valid_pair(rho, sigma);
    DivergenceValue out;
    note_borderline(rho, sigma, out.flags);
    const double alpha = params.alpha();
    const double log_mass = std::log(rho.trace());

    if (params.z_kind() == DivergenceParams::ZKind::ZeroLimit) {
        ZeroLimitResult zr = d_alpha_zero(rho, sigma, alpha);
        if (zr.extrapolated) out.flags.emplace_back("extrapolated");
        out.q_value = zr.q_value;
        out.d_value = zr.value;
    } else {
        out.q_value = q_alpha_z(rho, sigma, params);
        if (params.z_kind() == DivergenceParams::ZKind::Infinite && out.q_value.is_finite() &&
            out.q_value.value() == 0.0)
            out.flags.emplace_back("empty_support_meet");
        if (alpha == 1.0) {
            out.d_value = umegaki(rho, sigma);
            out.psi_value = ExtendedReal(log_mass);  // 0 * (+inf) = 0
            return out;
        }
        if (out.q_value.is_infinite()) {
            out.d_value = ExtendedReal::infinity();
        } else if (out.q_value.value() <= 0) {
            out.d_value = ExtendedReal::infinity();
        } else {
            out.d_value = (std::log(out.q_value.value()) - log_mass) / (alpha - 1);
        }
    }

    if (out.q_value.is_infinite()) out.psi_value = ExtendedReal::infinity();
    else if (out.q_value.value() <= 0) out.psi_value = std::nullopt;
    else out.psi_value = ExtendedReal(std::log(out.q_value.value()));
    return out;
}

ExtendedReal umegaki(const HermitianOperator& rho, const HermitianOperator& sigma) {
    require_valid_pair(rho, sigma);
    if (!support_leq(rho, sigma)) return ExtendedReal::infinity();
    RVector a = clamped_spectrum(rho);
    double entropy_part = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a(i) > 0) entropy_part += a(i) * std::log(a(i));
    const double cross = trace_product(rho, logn(sigma));
    return (entropy_part - cross) / rho.trace();
}

ExtendedReal d_max(const HermitianOperator& rho, const HermitianOperator& sigma) {
    require_valid_pair(rho, sigma);
    if (!support_leq(rho, sigma)) return ExtendedReal::infinity();
    const Matrix s = supported_power(sigma, -0.5).matrix();
    Matrix m = s * rho.matrix() * s;
    HermitianOperator ratio(Matrix((m + m.adjoint()) / 2.0));
    return std::log(ratio.max_eigenvalue());
}

ExtendedReal d_max_bisection(const HermitianOperator& rho, const HermitianOperator& sigma, double tol) {
    require_valid_pair(rho, sigma);
    if (!support_leq(rho, sigma)) return ExtendedReal::infinity();
    // Work inside supp(sigma); with rho^0 <= sigma^0 nothing is lost.
    const Matrix basis = support_basis(sigma);
    const Matrix rc = basis.adjoint() * rho.matrix() * basis;
    const Matrix sc = basis.adjoint() * sigma.matrix() * basis;
    const HermitianOperator r(Matrix((rc + rc.adjoint()) / 2.0));
    const HermitianOperator s(Matrix((sc + sc.adjoint()) / 2.0));
    auto feasible = [&](double log_lambda) { return psd_leq(r, s.scaled(std::exp(log_lambda)), 0.0); };

    double lo = std::log(rho.trace() / sigma.trace()) - 1e-9;
    double hi = std::log(rho.max_eigenvalue() / s.min_eigenvalue()) + 1e-9;
    if (feasible(lo)) return lo;
    while (!feasible(hi)) hi += 1.0;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

DHatResult d_hat_alpha(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha) {
    require_valid_pair(rho, sigma);
    if (!(alpha > 0) || alpha == 1.0 || !std::isfinite(alpha))
        throw Error(ErrorKind::BadAlpha, "d_hat needs alpha in (0,1) or (1,inf)");
    const bool exact = alpha <= 2;
    const bool dominated = support_leq(rho, sigma);
    if (alpha > 1 && !dominated) return {ExtendedReal::infinity(), exact};

    // Restrict to supp(sigma). When rho leaks outside it (only reachable for alpha < 1)
    // the perspective sees the shorted operator A - B C^+ B^dagger.
    const int d = rho.dim();
    const Projection sp = support_projection(sigma);
    const Matrix s_basis = sp.basis();
    Matrix reduced = s_basis.adjoint() * rho.matrix() * s_basis;
    if (!dominated) {
        const HermitianOperator complement = HermitianOperator::identity(d) - sp.op();
        const Matrix k_basis = support_projection(complement).basis();
        const Matrix b = s_basis.adjoint() * rho.matrix() * k_basis;
        const Matrix c = k_basis.adjoint() * rho.matrix() * k_basis;
        const HermitianOperator ch(Matrix((c + c.adjoint()) / 2.0));
        reduced -= b * supported_power(ch, -1.0).matrix() * b.adjoint();
    }
    const HermitianOperator rr(Matrix((reduced + reduced.adjoint()) / 2.0));
    const Matrix sc = s_basis.adjoint() * sigma.matrix() * s_basis;
    const HermitianOperator ss(Matrix((sc + sc.adjoint()) / 2.0));
    const Matrix sinv = supported_power(ss, -0.5).matrix();
    Matrix t = sinv * rr.matrix() * sinv;
    // Shorted operators may carry rounding-level negative eigenvalues.
    const HermitianOperator th =
        HermitianOperator(Matrix((t + t.adjoint()) / 2.0)).map_spectrum([](double x) { return std::max(x, 0.0); });
    if (!(th.max_eigenvalue() > 1e-14 * rho.max_eigenvalue() / sigma.max_eigenvalue()))
        return {ExtendedReal::infinity(), exact};
    const double q = trace_product(ss, supported_power(th, alpha));
    if (!(q > 0)) return {ExtendedReal::infinity(), exact};
    return {(std::log(q) - std::log(rho.trace())) / (alpha - 1), exact};
}

ExtendedReal q_alpha_zero_extrapolated(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha) {
    require_valid_pair(rho, sigma);
    if (alpha > 1 && !support_leq(rho, sigma)) return ExtendedReal::infinity();
    const double zs[3] = {1e-2, 5e-3, 2.5e-3};
    double q[3];
    for (int i = 0; i < 3; ++i) q[i] = sandwich_trace_power(rho, alpha / (2 * zs[i]), sigma, (1 - alpha) / zs[i], zs[i]);
    // Halving steps: eliminate the O(z) term, then the O(z^2) term.
    const double r1a = 2 * q[1] - q[0];
    const double r1b = 2 * q[2] - q[1];
    return std::max(0.0, (4 * r1b - r1a) / 3);
}

ZeroLimitResult d_alpha_zero(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha) {
    require_valid_pair(rho, sigma);
    if (!(alpha > 0) || alpha == 1.0 || !std::isfinite(alpha))
        throw Error(ErrorKind::BadAlpha, "z -> 0 limit needs alpha in (0,1) or (1,inf)");
    if (alpha > 1 && clamped_spectrum(sigma).minCoeff() <= 0)
        throw Error(ErrorKind::SingularSigma, "alpha > 1 branch of the z -> 0 limit needs invertible sigma");

    const SpectralProfile profile = SpectralProfile::build(rho, sigma);
    const GenericityReport report = alpha < 1 ? genericity_condition_b(profile) : genericity_condition_b_prime(profile);
    if (report.undetermined)
        throw Error(ErrorKind::GenericityUndetermined, "overlap minors or eigenvalue gaps sit in the undecidable band");

    ZeroLimitResult out{0.0, 0.0, false};
    double q = 0;
    if (report.holds) {
        q = z_alpha_eigenvalues(profile, alpha).sum();
    } else {
        ExtendedReal qx = q_alpha_zero_extrapolated(rho, sigma, alpha);
        out.extrapolated = true;
        if (qx.is_infinite()) return {ExtendedReal::infinity(), ExtendedReal::infinity(), true};
        q = qx.value();
    }
    out.q_value = q;
    if (!(q > 0)) out.value = ExtendedReal::infinity();
    else out.value = (std::log(q) - std::log(rho.trace())) / (alpha - 1);
    return out;
}

std::pair<WeightVector, WeightVector> nussbaum_szkola(const HermitianOperator& rho, const HermitianOperator& sigma) {
    require_valid_pair(rho, sigma);
    const RVector a = clamped_spectrum(rho);
    const RVector b = clamped_spectrum(sigma);
    const Matrix overlap = rho.eigenvectors().adjoint() * sigma.eigenvectors();
    const int d = rho.dim();
    std::vector<double> p(d * d), q(d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double w = std::norm(overlap(i, j));
            p[i * d + j] = a(i) * w;
            q[i * d + j] = b(j) * w;
        }
    return {WeightVector(std::move(p)), WeightVector(std::move(q))};
}

namespace {

void require_variational_params(const HermitianOperator& rho, const HermitianOperator& sigma,
                                const DivergenceParams& params) {
    require_valid_pair(rho, sigma);
    if (params.z_kind() != DivergenceParams::ZKind::Finite)
        throw Error(ErrorKind::BadParams, "variational formula needs a finite z");
    if (!(params.alpha() > 1 && params.alpha() <= 2))
        throw Error(ErrorKind::BadAlpha, "variational formula needs alpha in (1,2]");
    if (!support_leq(rho, sigma)) throw Error(ErrorKind::SupportViolation, "variational formula needs rho^0 <= sigma^0");
}

} // namespace

double variational_objective(const HermitianOperator& rho, const HermitianOperator& sigma,
                             const DivergenceParams& params, const HermitianOperator& h) {
    require_variational_params(rho, sigma, params);
    require_psd(h);
    const double alpha = params.alpha();
    const double z = params.z();
    const Matrix rp = supported_power(rho, alpha / (2 * z)).matrix();
    const Matrix sp = supported_power(sigma, (alpha - 1) / (2 * z)).matrix();
    const Matrix root = supported_power(h, 0.5).matrix();
    const double t1 = factor_trace_power(rp * root, z / alpha);
    const double t2 = factor_trace_power(sp * root, z / (alpha - 1));
    return alpha * t1 + (1 - alpha) * t2;
}

HermitianOperator variational_optimizer_H(const HermitianOperator& rho, const HermitianOperator& sigma,
                                          const DivergenceParams& params) {
    require_variational_params(rho, sigma, params);
    const double alpha = params.alpha();
    const double z = params.z();
    const Matrix s = supported_power(sigma, (1 - alpha) / (2 * z)).matrix();
    const Matrix y = s * supported_power(rho, alpha / z).matrix() * s;
    const HermitianOperator yh(Matrix((y + y.adjoint()) / 2.0));
    const Matrix h = s * supported_power(yh, alpha - 1).matrix() * s;
    return HermitianOperator(Matrix((h + h.adjoint()) / 2.0));
}

double variational_bound_lambda(const HermitianOperator& rho, const HermitianOperator& sigma,
                                const DivergenceParams& params) {
    require_variational_params(rho, sigma, params);
    const double e = params.alpha() / params.z();
    return std::exp(d_max(supported_power(rho, e), supported_power(sigma, e)).value());
}

AltChain alt_chain(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha, double z1, double z2) {
    require_valid_pair(rho, sigma);
    if (!(alpha > 0) || !(z1 > 0) || !(z2 >= z1) || !std::isfinite(z2))
        throw Error(ErrorKind::BadParams, "alt_chain needs alpha > 0 and 0 < z1 <= z2 < inf");
    if (alpha > 1 && !support_leq(rho, sigma))
        return {ExtendedReal::infinity(), ExtendedReal::infinity(), ExtendedReal::infinity(), true};
    const double q2 = sandwich_trace_power(rho, alpha / (2 * z2), sigma, (1 - alpha) / z2, z2);
    const double q1 = sandwich_trace_power(rho, alpha / (2 * z1), sigma, (1 - alpha) / z1, z1);
    const double r = z1 / z2;
    const double sigma_trace = supported_power(sigma, 1 - alpha).trace();
    const double upper = std::pow(q2, r) * std::pow(rho.max_eigenvalue(), alpha * (1 - r)) * std::pow(sigma_trace, 1 - r);
    const double tol = 1e-9 * std::max({std::abs(q1), std::abs(q2), std::abs(upper)});
    return {q2, q1, upper, q2 <= q1 + tol && q1 <= upper + tol};
}

DmaxDomination dmax_domination_check(const HermitianOperator& rho, const HermitianOperator& sigma,
                                     const DivergenceParams& params) {
    DmaxDomination out;
    out.d_az = d_alpha_z(rho, sigma, params).d_value;
    out.d_max = d_max(rho, sigma);
    out.dominated = out.d_max.is_infinite() || (out.d_az.is_finite() && out.d_az.value() <= out.d_max.value() + 1e-9);
    return out;
}

SmoothingCurve epsilon_smoothing_curve(const HermitianOperator& rho, const HermitianOperator& sigma,
                                       const DivergenceParams& params, const std::vector<double>& eps_grid) {
    require_valid_pair(rho, sigma);
    if (eps_grid.empty()) throw Error(ErrorKind::BadParams, "empty eps grid");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0)) throw Error(ErrorKind::BadParams, "eps grid must be positive");
        if (i > 0 && !(eps_grid[i] < eps_grid[i - 1])) throw Error(ErrorKind::BadParams, "eps grid must descend");
    }
    SmoothingCurve out;
    out.eps = eps_grid;
    const HermitianOperator id = HermitianOperator::identity(rho.dim());
    for (double eps : eps_grid) out.values.push_back(d_alpha_z(rho, sigma + id.scaled(eps), params).d_value);
    out.unsmoothed = d_alpha_z(rho, sigma, params).d_value;
    out.monotone = true;
    for (std::size_t i = 1; i < out.values.size(); ++i) {
        const ExtendedReal& prev = out.values[i - 1];
        const ExtendedReal& cur = out.values[i];
        if (cur.is_infinite()) continue;
        if (prev.is_infinite() || cur.value() < prev.value() - 1e-10) out.monotone = false;
    }
    if (out.unsmoothed.is_finite() && eps_grid.back() <= 1e-8 && out.values.back().is_finite())
        out.converged = std::abs(out.values.back().value() - out.unsmoothed.value()) <= 1e-3;
    return out;
}

} // namespace qrd
