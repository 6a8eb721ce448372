#include "qrd/families.hpp"

#include <cmath>

#include "qrd/classical.hpp"
#include "qrd/divergences.hpp"

namespace qrd {

namespace {

HermitianOperator hermitian_part(const Matrix& m) { return HermitianOperator(Matrix((m + m.adjoint()) / 2.0)); }

HermitianOperator qubit(double x, double z) {
    Matrix m(2, 2);
    m << (1 + z) / 2, x / 2, x / 2, (1 - z) / 2;
    return HermitianOperator(m);
}

double pure_dmax_closed_form(double c, double eps) {
    return eps > 0 ? std::log(1 / c + (1 - eps) / (1 - c * eps)) : 0.0;
}

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::BadParams, what);
}

} // namespace

StatePair gen_a2(double gamma, long long n, const std::function<double(long long)>& schedule) {
    require(gamma > 0, "gamma must be positive");
    require(n >= 1, "n must be at least 1");
    const double c = schedule ? schedule(n) : 1.0 - std::ldexp(1.0, -static_cast<int>(std::min<long long>(n, 1000)));
    require(c > 0 && c < 1, "schedule must stay inside (0,1)");
    const double delta = std::pow(1 - c, 1 + gamma);
    const double b = c - delta;
    const double a = std::sqrt(std::max(c * c - b * b, 0.0));
    StatePair out{qubit(0, c), qubit(a, b), 0.0};
    // Eigenvalues are ascending-last, so the low eigenvector of sigma is the last column.
    const CVector e0 = out.rho.eigenvectors().col(0);
    const CVector f1 = out.sigma.eigenvectors().col(1);
    out.identity_residual = std::abs(std::norm(e0.dot(f1)) - delta / (2 * c));
    return out;
}

StatePair gen_pure(double c, double eps) {
    require(c > 0, "c must be positive");
    require(eps >= 0 && c * eps < 1 && eps <= 1, "eps must lie in [0, 1/c)");
    CVector psi(2);
    psi << std::sqrt(eps), std::sqrt(1 - eps);
    RVector diag(2);
    diag << c * eps, 1 - c * eps;
    StatePair out{HermitianOperator::projector(psi), HermitianOperator::diagonal(diag), 0.0};
    out.identity_residual = std::abs(d_max(out.rho, out.sigma).as_double() - pure_dmax_closed_form(c, eps));
    return out;
}

StatePair gen_kappa(double kappa, double lambda, double eps, int dim) {
    require(kappa > 0, "kappa must be positive");
    require(lambda > 1, "lambda must exceed 1");
    require(dim >= 2, "dim must be at least 2");
    const double c = 1 / (lambda - 1);
    require(eps > 0 && c * eps < 1 && eps < 1, "eps must lie in (0, min(1, 1/c))");
    const StatePair base = gen_pure(c, eps);
    // Canonical inclusion of C^2 as the first two basis vectors.
    const Matrix v = Matrix::Identity(dim, 2);
    Matrix tilde = v * base.sigma.matrix() * v.adjoint();
    if (dim > 2) {
        Matrix rest = Matrix::Zero(dim, dim);
        for (int i = 2; i < dim; ++i) rest(i, i) = 1.0 / (dim - 2);
        tilde = (1 - eps) * tilde + eps * rest;
    }
    const HermitianOperator tilde_sigma = hermitian_part(tilde);
    const HermitianOperator powered = supported_power(tilde_sigma, 1.0 / kappa);
    StatePair out{conjugate(base.rho, v), powered.scaled(1.0 / powered.trace()), 0.0};
    const double closed = pure_dmax_closed_form(c, eps) - (dim > 2 ? std::log(1 - eps) : 0.0);
    out.identity_residual = std::abs(d_max(out.rho, tilde_sigma).as_double() - closed);
    return out;
}

StatePair gen_appE(double gamma, double eps) {
    require(gamma > 0 && gamma < 1, "gamma must lie in (0,1)");
    require(eps > 0 && eps < 1, "eps must lie in (0,1)");
    Matrix root(2, 2);
    root << 1, eps, eps, eps;
    Matrix core(2, 2);
    core << 1, gamma, gamma, gamma;
    const HermitianOperator sigma = hermitian_part(root * root);
    const HermitianOperator rho = hermitian_part(root * core * root);
    const double closed = std::log(HermitianOperator(core).max_eigenvalue());
    StatePair out{rho.scaled(1.0 / rho.trace()), sigma.scaled(1.0 / sigma.trace()), 0.0};
    out.identity_residual = std::abs(d_max(rho, sigma).as_double() - closed);
    return out;
}

StatePair gen_knife(double c, double d, double beta, double gamma, long long n) {
    const auto [p, q] = knife_edge_family(c, d, beta, gamma, n);
    RVector pd(2), qd(2);
    pd << p[0], p[1];
    qd << q[0], q[1];
    return {HermitianOperator::diagonal(pd), HermitianOperator::diagonal(qd), 0.0};
}

FamilySpec::Tag FamilySpec::parse_tag(const std::string& name) {
    if (name == "a2") return Tag::A2;
    if (name == "pure") return Tag::Pure;
    if (name == "kappa") return Tag::Kappa;
    if (name == "appE" || name == "appe") return Tag::AppE;
    if (name == "knife") return Tag::Knife;
    throw Error(ErrorKind::BadParams, "unknown family '" + name + "'");
}

std::string FamilySpec::tag_name(Tag tag) {
    switch (tag) {
    case Tag::A2:
        return "a2";
    case Tag::Pure:
        return "pure";
    case Tag::Kappa:
        return "kappa";
    case Tag::AppE:
        return "appE";
    case Tag::Knife:
        break;
    }
    return "knife";
}

StatePair generate(const FamilySpec& spec, double index) {
    switch (spec.tag) {
    case FamilySpec::Tag::A2:
        return gen_a2(spec.gamma, std::llround(index));
    case FamilySpec::Tag::Pure:
        return gen_pure(spec.c, index);
    case FamilySpec::Tag::Kappa:
        return gen_kappa(spec.kappa, spec.lambda, index, spec.dim);
    case FamilySpec::Tag::AppE:
        return gen_appE(spec.gamma, index);
    case FamilySpec::Tag::Knife:
        break;
    }
    return gen_knife(spec.c, spec.d, spec.beta, spec.gamma, std::llround(index));
}

} // namespace qrd
