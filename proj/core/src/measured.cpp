#include "qrd/measured.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <gsl/gsl_multimin.h>

#include "qrd/divergences.hpp"
#include "qrd/sampling.hpp"

namespace qrd {

namespace {

// The factor parameterization has 2 d^4 reals; beyond this the ascent costs minutes per start
// and only the projective seeds are scored.
constexpr int kAscentMaxDim = 4;

void require_alpha(double alpha) {
    if (!(alpha > 0) || !std::isfinite(alpha)) throw Error(ErrorKind::BadAlpha, "alpha must be positive and finite");
}

HermitianOperator hermitian_part(const Matrix& m) { return HermitianOperator(Matrix((m + m.adjoint()) / 2.0)); }

// Objective value used by the optimizers: -inf marks an infeasible parameter point.
double score(const ExtendedReal& v) { return v.is_infinite() ? std::numeric_limits<double>::infinity() : v.value(); }

ExtendedReal divergence_of(const POVM& povm, const HermitianOperator& rho, const HermitianOperator& sigma,
                           double alpha) {
    return classical_renyi(apply_povm(povm, rho), apply_povm(povm, sigma), alpha);
}

// Raw factors A_1..A_K (each d x d) packed as real and imaginary parts.
struct FactorPoint {
    int d;
    int k;
    std::vector<double> x;

    Matrix factor(int i) const {
        Matrix a(d, d);
        const std::size_t off = static_cast<std::size_t>(i) * 2 * d * d;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                const std::size_t at = off + 2 * (static_cast<std::size_t>(r) * d + c);
                a(r, c) = Complex(x[at], x[at + 1]);
            }
        return a;
    }

    void set_factor(int i, const Matrix& a) {
        const std::size_t off = static_cast<std::size_t>(i) * 2 * d * d;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                const std::size_t at = off + 2 * (static_cast<std::size_t>(r) * d + c);
                x[at] = a(r, c).real();
                x[at + 1] = a(r, c).imag();
            }
    }
};

// M_i = S^-1/2 A_i A_i^dag S^-1/2; nullopt when S is numerically singular.
std::optional<POVM> povm_from_factors(const FactorPoint& pt) {
    std::vector<Matrix> grams;
    Matrix total = Matrix::Zero(pt.d, pt.d);
    for (int i = 0; i < pt.k; ++i) {
        const Matrix a = pt.factor(i);
        grams.push_back(a * a.adjoint());
        total += grams.back();
    }
    const HermitianOperator s = hermitian_part(total);
    if (s.min_eigenvalue() <= 1e-12 * std::max(1.0, s.max_eigenvalue())) return std::nullopt;
    const Matrix inv_sqrt = s.map_spectrum([](double v) { return 1.0 / std::sqrt(v); }).matrix();
    std::vector<HermitianOperator> elements;
    Matrix sum = Matrix::Zero(pt.d, pt.d);
    for (const auto& g : grams) {
        elements.push_back(hermitian_part(inv_sqrt * g * inv_sqrt));
        sum += elements.back().matrix();
    }
    // Absorb the rounding residue of the normalization into the last element so the
    // completeness check always sees an exact identity.
    const Matrix residue = Matrix::Identity(pt.d, pt.d) - sum;
    elements.back() = hermitian_part(elements.back().matrix() + residue);
    if (elements.back().min_eigenvalue() < -1e-10) return std::nullopt;
    return POVM(std::move(elements));
}

// Same value as scoring povm_from_factors(pt), without building and validating every element:
// Tr(M_i rho) = Tr(A_i^dag S^-1/2 rho S^-1/2 A_i), so one eigensolve of S suffices.
double objective(const FactorPoint& pt, const HermitianOperator& rho, const HermitianOperator& sigma, double alpha) {
    std::vector<Matrix> factors;
    Matrix total = Matrix::Zero(pt.d, pt.d);
    for (int i = 0; i < pt.k; ++i) {
        factors.push_back(pt.factor(i));
        total += factors.back() * factors.back().adjoint();
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix((total + total.adjoint()) / 2.0));
    const RVector& ev = eig.eigenvalues();
    if (ev.minCoeff() <= 1e-12 * std::max(1.0, ev.maxCoeff())) return -std::numeric_limits<double>::infinity();
    const Matrix inv_sqrt = eig.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().adjoint();
    const Matrix rho_w = inv_sqrt * rho.matrix() * inv_sqrt;
    const Matrix sigma_w = inv_sqrt * sigma.matrix() * inv_sqrt;
    std::vector<double> p(factors.size()), q(factors.size());
    for (std::size_t i = 0; i < factors.size(); ++i) {
        p[i] = std::max(0.0, (factors[i].adjoint() * rho_w * factors[i]).trace().real());
        q[i] = std::max(0.0, (factors[i].adjoint() * sigma_w * factors[i]).trace().real());
    }
    try {
        return score(classical_renyi(WeightVector(std::move(p)), WeightVector(std::move(q)), alpha));
    } catch (const Error&) {
        return -std::numeric_limits<double>::infinity();
    }
}

struct AscentOutcome {
    FactorPoint point;
    double value;
    bool converged;
};

struct AscentContext {
    FactorPoint shape;
    const HermitianOperator* rho;
    const HermitianOperator* sigma;
    double alpha;
    double h;
    FactorPoint best;
    double best_value;
};

double eval_at(AscentContext& ctx, const gsl_vector* v) {
    FactorPoint pt = ctx.shape;
    for (std::size_t j = 0; j < pt.x.size(); ++j) pt.x[j] = gsl_vector_get(v, j);
    const double value = objective(pt, *ctx.rho, *ctx.sigma, ctx.alpha);
    if (value > ctx.best_value) {
        ctx.best_value = value;
        ctx.best = std::move(pt);
    }
    return value;
}

// BFGS minimizes the negated objective; infeasible points become a huge finite cost so the
// line search backs off instead of seeing NaNs.
double bfgs_cost(const gsl_vector* v, void* raw) {
    const double value = eval_at(*static_cast<AscentContext*>(raw), v);
    return std::isfinite(value) ? -value : 1e300;
}

void bfgs_gradient(const gsl_vector* v, void* raw, gsl_vector* grad) {
    auto& ctx = *static_cast<AscentContext*>(raw);
    gsl_vector* probe = gsl_vector_alloc(v->size);
    gsl_vector_memcpy(probe, v);
    for (std::size_t j = 0; j < v->size; ++j) {
        const double keep = gsl_vector_get(v, j);
        gsl_vector_set(probe, j, keep + ctx.h);
        const double up = bfgs_cost(probe, raw);
        gsl_vector_set(probe, j, keep - ctx.h);
        const double down = bfgs_cost(probe, raw);
        gsl_vector_set(probe, j, keep);
        gsl_vector_set(grad, j, up < 1e300 && down < 1e300 ? (up - down) / (2 * ctx.h) : 0.0);
    }
    gsl_vector_free(probe);
}

void bfgs_both(const gsl_vector* v, void* raw, double* f, gsl_vector* grad) {
    *f = bfgs_cost(v, raw);
    bfgs_gradient(v, raw, grad);
}

AscentOutcome ascend(const FactorPoint& start, const HermitianOperator& rho, const HermitianOperator& sigma,
                     double alpha, const MeasuredOptions& options) {
    AscentContext ctx{start, &rho, &sigma, alpha, options.gradient_step, start,
                      objective(start, rho, sigma, alpha)};
    if (std::isinf(ctx.best_value) && ctx.best_value > 0) return {start, ctx.best_value, true};
    const std::size_t n = start.x.size();
    gsl_multimin_function_fdf fn{&bfgs_cost, &bfgs_gradient, &bfgs_both, n, &ctx};
    gsl_vector* x = gsl_vector_alloc(n);
    for (std::size_t j = 0; j < n; ++j) gsl_vector_set(x, j, start.x[j]);
    gsl_multimin_fdfminimizer* solver = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
    gsl_multimin_fdfminimizer_set(solver, &fn, x, 1e-2, 0.1);
    bool converged = false;
    for (int it = 0; it < options.max_iterations; ++it) {
        if (std::isinf(ctx.best_value) && ctx.best_value > 0) {
            converged = true;
            break;
        }
        // A failed line search means no further progress along the quasi-Newton direction.
        if (gsl_multimin_fdfminimizer_iterate(solver)) {
            converged = true;
            break;
        }
        if (gsl_multimin_test_gradient(gsl_multimin_fdfminimizer_gradient(solver), 1e-9) == GSL_SUCCESS) {
            converged = true;
            break;
        }
    }
    gsl_multimin_fdfminimizer_free(solver);
    gsl_vector_free(x);
    return {ctx.best, ctx.best_value, converged};
}

// Projective seeds: eigenbases that are exact for commuting pairs and for the ratio operator.
std::vector<Matrix> seed_bases(const HermitianOperator& rho, const HermitianOperator& sigma) {
    std::vector<Matrix> out{rho.eigenvectors(), sigma.eigenvectors()};
    out.push_back((rho + sigma.scaled(0.6180339887498949)).eigenvectors());
    const HermitianOperator inv_sqrt = supported_power(sigma, -0.5);
    out.push_back(hermitian_part(inv_sqrt.matrix() * rho.matrix() * inv_sqrt.matrix()).eigenvectors());
    out.push_back((rho - sigma).eigenvectors());
    return out;
}

} // namespace

POVM::POVM(std::vector<HermitianOperator> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) throw Error(ErrorKind::BadParams, "POVM needs at least one element");
    const int d = elements_.front().dim();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& m : elements_) {
        if (m.dim() != d) throw Error(ErrorKind::DimMismatch, "POVM elements differ in dimension");
        if (m.min_eigenvalue() < -1e-10) throw Error(ErrorKind::NotPSD, "POVM element is not PSD");
        sum += m.matrix();
    }
    if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
        throw Error(ErrorKind::BadParams, "POVM elements do not sum to the identity");
}

POVM POVM::from_basis(const Matrix& unitary) {
    std::vector<HermitianOperator> elements;
    for (Eigen::Index c = 0; c < unitary.cols(); ++c) elements.push_back(HermitianOperator::projector(unitary.col(c)));
    return POVM(std::move(elements));
}

WeightVector apply_povm(const POVM& povm, const HermitianOperator& rho) {
    if (povm.dim() != rho.dim()) throw Error(ErrorKind::DimMismatch, "POVM and state dimensions differ");
    std::vector<double> out;
    out.reserve(povm.size());
    for (const auto& m : povm.elements()) {
        const double v = trace_product(m, rho);
        out.push_back(v < 0 && v >= -1e-12 ? 0.0 : v);
    }
    return WeightVector(std::move(out));
}

MeasuredResult measured_renyi_lower(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha,
                                    int restarts, std::uint64_t seed, const MeasuredOptions& options) {
    require_alpha(alpha);
    require_valid_pair(rho, sigma);
    if (restarts < 0) throw Error(ErrorKind::BadParams, "restarts must be nonnegative");
    const int d = rho.dim();
    const int k = d * d;

    std::optional<POVM> best;
    double best_value = -std::numeric_limits<double>::infinity();
    bool best_converged = true;
    Matrix best_basis = Matrix::Identity(d, d);
    auto consider = [&](const POVM& povm, bool converged) {
        const double v = score(divergence_of(povm, rho, sigma, alpha));
        if (!best || v > best_value) {
            best = povm;
            best_value = v;
            best_converged = converged;
        }
    };
    std::vector<Matrix> bases = seed_bases(rho, sigma);
    // The eigenbasis of the best two-outcome test refines it, so it scores at least the test value.
    if (d > 1 && d <= kAscentMaxDim)
        bases.push_back(test_measured(rho, sigma, alpha, 0, seed).povm.elements().front().eigenvectors());
    for (const auto& basis : bases) {
        const POVM povm = POVM::from_basis(basis);
        const double before = best_value;
        consider(povm, true);
        if (best_value > before) best_basis = basis;
    }

    int used = 0;
    const int ascents = d <= kAscentMaxDim ? restarts : 0;
    for (int r = 0; r < ascents && !(std::isinf(best_value) && best_value > 0); ++r) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
        FactorPoint pt{d, k, std::vector<double>(static_cast<std::size_t>(2 * k * d * d))};
        if (r == 0) {
            // Start next to the best projective seed so the ascent can only improve on it.
            for (int i = 0; i < k; ++i) {
                Matrix a = 0.05 * random_ginibre(d, d, rng);
                if (i < d) a += best_basis.col(i) * best_basis.col(i).adjoint();
                pt.set_factor(i, a);
            }
        } else {
            for (int i = 0; i < k; ++i) pt.set_factor(i, random_ginibre(d, d, rng));
        }
        const AscentOutcome outcome = ascend(pt, rho, sigma, alpha, options);
        ++used;
        if (const auto povm = povm_from_factors(outcome.point)) consider(*povm, outcome.converged);
    }

    MeasuredResult out{divergence_of(*best, rho, sigma, alpha), *best, used, best_converged};
    return out;
}

namespace {

struct TestContext {
    const HermitianOperator* rho;
    const HermitianOperator* sigma;
    double alpha;
    int d;
    double best = -std::numeric_limits<double>::infinity();
    std::optional<HermitianOperator> best_test;
};

// Hermitian K from d^2 reals: diagonal first, then real/imag parts of the upper triangle.
Matrix hermitian_from_params(const gsl_vector* v, int d) {
    Matrix k = Matrix::Zero(d, d);
    std::size_t at = 0;
    for (int i = 0; i < d; ++i) k(i, i) = gsl_vector_get(v, at++);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double re = gsl_vector_get(v, at++);
            const double im = gsl_vector_get(v, at++);
            k(i, j) = Complex(re, im);
            k(j, i) = Complex(re, -im);
        }
    return k;
}

void params_from_hermitian(const Matrix& k, gsl_vector* v, int d) {
    std::size_t at = 0;
    for (int i = 0; i < d; ++i) gsl_vector_set(v, at++, k(i, i).real());
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            gsl_vector_set(v, at++, k(i, j).real());
            gsl_vector_set(v, at++, k(i, j).imag());
        }
}

POVM two_outcome(const HermitianOperator& test) {
    const int d = test.dim();
    const HermitianOperator rest = hermitian_part(Matrix::Identity(d, d) - test.matrix());
    return POVM({test, rest});
}

double evaluate_test(TestContext& ctx, const HermitianOperator& test) {
    double v;
    try {
        v = score(divergence_of(two_outcome(test), *ctx.rho, *ctx.sigma, ctx.alpha));
    } catch (const Error&) {
        return -std::numeric_limits<double>::infinity();
    }
    if (v > ctx.best) {
        ctx.best = v;
        ctx.best_test = test;
    }
    return v;
}

// T = sin^2(K) stays inside [0, I] for every Hermitian K.
double nm_cost(const gsl_vector* v, void* raw) {
    auto& ctx = *static_cast<TestContext*>(raw);
    const HermitianOperator k(hermitian_from_params(v, ctx.d));
    const HermitianOperator t = k.map_spectrum([](double x) { return std::sin(x) * std::sin(x); });
    const double value = evaluate_test(ctx, t);
    if (std::isinf(value)) return value > 0 ? -1e300 : 1e300;
    return -value;
}

} // namespace

MeasuredResult test_measured(const HermitianOperator& rho, const HermitianOperator& sigma, double alpha, int restarts,
                             std::uint64_t seed) {
    require_alpha(alpha);
    require_valid_pair(rho, sigma);
    if (restarts < 0) throw Error(ErrorKind::BadParams, "restarts must be nonnegative");
    const int d = rho.dim();
    TestContext ctx{&rho, &sigma, alpha, d, -std::numeric_limits<double>::infinity(), std::nullopt};

    // Spectral-threshold seeds: leading eigenprojections of the ratio operator on supp(sigma),
    // the complement of supp(sigma), and the analogous thresholds for rho and rho - sigma.
    const Projection sigma_support = support_projection(sigma);
    const HermitianOperator outside = hermitian_part(Matrix::Identity(d, d) - sigma_support.op().matrix());
    const HermitianOperator inv_sqrt = supported_power(sigma, -0.5);
    const HermitianOperator ratio = hermitian_part(inv_sqrt.matrix() * rho.matrix() * inv_sqrt.matrix());
    std::vector<HermitianOperator> seeds;
    if (outside.max_eigenvalue() > 0.5) seeds.push_back(outside);
    for (const HermitianOperator* op : {&ratio, &rho}) {
        const Matrix& vecs = op->eigenvectors();
        for (int m = 1; m < d; ++m) {
            const Matrix lead = vecs.leftCols(m);
            seeds.push_back(hermitian_part(lead * lead.adjoint()));
            if (op == &ratio && outside.max_eigenvalue() > 0.5)
                seeds.push_back(hermitian_part(seeds.back().matrix() + outside.matrix()));
        }
    }
    const HermitianOperator diff = rho - sigma;
    {
        const Matrix& vecs = diff.eigenvectors();
        int positive = 0;
        while (positive < d && diff.eigenvalues()(positive) > 0) ++positive;
        if (positive > 0 && positive < d) {
            const Matrix lead = vecs.leftCols(positive);
            seeds.push_back(hermitian_part(lead * lead.adjoint()));
        }
    }
    for (const auto& s : seeds) evaluate_test(ctx, s);
    if (!ctx.best_test) {
        // d = 1 or every seed degenerate: the trivial test {I, 0}.
        evaluate_test(ctx, HermitianOperator::identity(d));
    }

    const std::size_t n = static_cast<std::size_t>(d) * d;
    int used = 0;
    bool converged = true;
    if (d > 1 && !(std::isinf(ctx.best) && ctx.best > 0)) {
        gsl_multimin_function fn{&nm_cost, n, &ctx};
        gsl_multimin_fminimizer* solver = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
        gsl_vector* start = gsl_vector_alloc(n);
        gsl_vector* steps = gsl_vector_alloc(n);
        for (int r = 0; r < std::max(1, restarts); ++r) {
            Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
            Matrix k;
            if (r == 0) {
                // sin^2((pi/2) P) = P for a projection P.
                k = (M_PI / 2) * ctx.best_test->matrix();
            } else {
                const Matrix g = random_ginibre(d, d, rng);
                k = (g + g.adjoint()) / 2.0;
            }
            params_from_hermitian(k, start, d);
            gsl_vector_set_all(steps, 0.2);
            gsl_multimin_fminimizer_set(solver, &fn, start, steps);
            int status = GSL_CONTINUE;
            for (int it = 0; it < 2000 && status == GSL_CONTINUE; ++it) {
                if (gsl_multimin_fminimizer_iterate(solver)) break;
                status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), 1e-10);
            }
            if (status != GSL_SUCCESS) converged = false;
            ++used;
            if (std::isinf(ctx.best) && ctx.best > 0) break;
        }
        gsl_vector_free(steps);
        gsl_vector_free(start);
        gsl_multimin_fminimizer_free(solver);
    }

    const POVM povm = two_outcome(*ctx.best_test);
    return {divergence_of(povm, rho, sigma, alpha), povm, used, converged};
}

std::vector<std::pair<int, ExtendedReal>> regularized_measured_estimate(const HermitianOperator& rho,
                                                                       const HermitianOperator& sigma, double alpha,
                                                                       int max_n, int restarts, std::uint64_t seed) {
    require_alpha(alpha);
    require_valid_pair(rho, sigma);
    if (max_n < 1) throw Error(ErrorKind::BadParams, "max_n must be at least 1");
    long long dim = 1;
    for (int i = 0; i < max_n; ++i) {
        dim *= rho.dim();
        if (dim > 64) throw Error(ErrorKind::DimTooLarge, "tensor power dimension exceeds 64");
    }
    std::vector<std::pair<int, ExtendedReal>> out;
    std::optional<POVM> single;
    for (int n = 1; n <= max_n; ++n) {
        const HermitianOperator rn = tensor_power(rho, n);
        const HermitianOperator sn = tensor_power(sigma, n);
        // Larger tensor powers get a short ascent; the product of the single-copy optimum
        // is always a candidate, so the per-copy values cannot fall below n = 1.
        MeasuredOptions options;
        if (n > 1) options.max_iterations = 25;
        const MeasuredResult r =
            measured_renyi_lower(rn, sn, alpha, restarts, seed + static_cast<std::uint64_t>(n), options);
        ExtendedReal best = r.value;
        if (n == 1) {
            single = r.povm;
        } else {
            std::vector<HermitianOperator> product{HermitianOperator::identity(1)};
            for (int copy = 0; copy < n; ++copy) {
                std::vector<HermitianOperator> next;
                for (const auto& a : product)
                    for (const auto& b : single->elements()) next.push_back(kron(a, b));
                product = std::move(next);
            }
            best = max(best, divergence_of(POVM(std::move(product)), rn, sn, alpha));
        }
        out.emplace_back(n, best.is_finite() ? ExtendedReal(best.value() / n) : best);
    }
    return out;
}

} // namespace qrd
