#include "qrd/zlimits.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qrd/divergences.hpp"

namespace qrd {

namespace {

constexpr double kMinorNonzero = 1e-10;
constexpr double kMinorZero = 1e-12;

// Boundaries of runs of equal eigenvalues; flags gaps that are neither clearly equal nor distinct.
std::vector<int> cluster(const RVector& ev, bool& near_degenerate) {
    std::vector<int> bounds{0};
    for (Eigen::Index i = 0; i + 1 < ev.size(); ++i) {
        const double scale = std::max(std::abs(ev(i)), std::abs(ev(i + 1)));
        const double gap = scale > 0 ? (ev(i) - ev(i + 1)) / scale : 0.0;
        if (gap > 1e-10) bounds.push_back(static_cast<int>(i + 1));
        if (gap > 1e-10 && gap <= 1e-7) near_degenerate = true;
    }
    bounds.push_back(static_cast<int>(ev.size()));
    return bounds;
}

void combinations(const std::vector<int>& pool, int k, std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < pool.size(); ++i) {
            cur.push_back(pool[i]);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
}

// Index sets {0..lo-1} u S with S a subset of block [lo, hi); the block is the one with lo < k <= hi.
std::vector<std::vector<int>> leading_sets(const std::vector<int>& bounds, int k) {
    std::vector<std::vector<int>> out;
    for (std::size_t r = 1; r < bounds.size(); ++r) {
        const int lo = bounds[r - 1], hi = bounds[r];
        if (!(lo < k && k <= hi)) continue;
        std::vector<int> block;
        for (int i = lo; i < hi; ++i) block.push_back(i);
        std::vector<std::vector<int>> tails;
        combinations(block, k - lo, tails);
        for (auto& t : tails) {
            std::vector<int> set;
            for (int i = 0; i < lo; ++i) set.push_back(i);
            set.insert(set.end(), t.begin(), t.end());
            out.push_back(set);
        }
    }
    return out;
}

// Index sets {hi..d-1} u S with S a subset of block [lo, hi); the block is the one with d-hi < k <= d-lo.
std::vector<std::vector<int>> trailing_sets(const std::vector<int>& bounds, int k, int d) {
    std::vector<std::vector<int>> out;
    for (std::size_t s = 1; s < bounds.size(); ++s) {
        const int lo = bounds[s - 1], hi = bounds[s];
        if (!(d - hi < k && k <= d - lo)) continue;
        std::vector<int> block;
        for (int i = lo; i < hi; ++i) block.push_back(i);
        std::vector<std::vector<int>> heads;
        combinations(block, k - (d - hi), heads);
        for (auto& h : heads) {
            std::vector<int> set = h;
            for (int i = hi; i < d; ++i) set.push_back(i);
            out.push_back(set);
        }
    }
    return out;
}

GenericityReport search_minors(const SpectralProfile& profile, const std::set<int>& required, bool reversed) {
    GenericityReport report;
    report.undetermined = profile.near_degenerate;
    const int d = profile.dim();
    const Matrix overlap = profile.v.adjoint() * profile.w;
    for (int k : required) {
        const auto rows = leading_sets(profile.rho_blocks, k);
        const auto cols = reversed ? trailing_sets(profile.sigma_blocks, k, d) : leading_sets(profile.sigma_blocks, k);
        MinorWitness best{k, {}, {}, 0.0};
        for (const auto& rs : rows)
            for (const auto& cs : cols) {
                Matrix minor(k, k);
                for (int u = 0; u < k; ++u)
                    for (int v = 0; v < k; ++v) minor(u, v) = overlap(rs[u], cs[v]);
                const double mag = std::abs(minor.determinant());
                if (mag > best.magnitude || best.rows.empty()) best = {k, rs, cs, mag};
            }
        report.witnesses.push_back(best);
        if (best.magnitude > kMinorNonzero) continue;
        if (best.magnitude >= kMinorZero) report.undetermined = true;
        if (report.holds) report.failing_k = k;
        report.holds = false;
    }
    return report;
}

std::set<int> interior(const std::vector<int>& bounds) {
    return std::set<int>(bounds.begin() + 1, bounds.end() - 1);
}

void require_generic(const GenericityReport& report) {
    if (report.undetermined)
        throw Error(ErrorKind::GenericityUndetermined, "overlap minors or eigenvalue gaps sit in the undecidable band");
    if (!report.holds)
        throw Error(ErrorKind::GenericityFails, "no admissible nonzero minor at k=" + std::to_string(report.failing_k));
}

bool invertible(const RVector& b) { return b.size() > 0 && b.minCoeff() > 0; }

} // namespace

SpectralProfile SpectralProfile::build(const HermitianOperator& rho, const HermitianOperator& sigma) {
    require_valid_pair(rho, sigma);
    SpectralProfile p;
    p.a = clamped_spectrum(rho);
    p.b = clamped_spectrum(sigma);
    p.v = rho.eigenvectors();
    p.w = sigma.eigenvectors();
    p.rho_blocks = cluster(p.a, p.near_degenerate);
    p.sigma_blocks = cluster(p.b, p.near_degenerate);
    return p;
}

GenericityReport genericity_condition_b(const SpectralProfile& profile) {
    std::set<int> required = interior(profile.rho_blocks);
    for (int j : interior(profile.sigma_blocks)) required.insert(j);
    return search_minors(profile, required, false);
}

GenericityReport genericity_condition_b_prime(const SpectralProfile& profile) {
    if (!invertible(profile.b)) throw Error(ErrorKind::SingularSigma, "condition (b') needs invertible sigma");
    const int d = profile.dim();
    std::set<int> required = interior(profile.rho_blocks);
    for (int j : interior(profile.sigma_blocks)) required.insert(d - j);
    return search_minors(profile, required, true);
}

RVector z_alpha_eigenvalues(const SpectralProfile& profile, double alpha) {
    if (!(alpha > 0) || alpha == 1.0) throw Error(ErrorKind::BadAlpha, "z -> 0 eigenvalues need alpha != 1");
    const int d = profile.dim();
    RVector out(d);
    if (alpha < 1) {
        require_generic(genericity_condition_b(profile));
        for (int i = 0; i < d; ++i) {
            const double a = profile.a(i), b = profile.b(i);
            out(i) = (a > 0 && b > 0) ? std::exp(alpha * std::log(a) + (1 - alpha) * std::log(b)) : 0.0;
        }
    } else {
        require_generic(genericity_condition_b_prime(profile));
        for (int i = 0; i < d; ++i) {
            const double a = profile.a(i), b = profile.b(d - 1 - i);
            out(i) = a > 0 ? std::exp(alpha * std::log(a) + (1 - alpha) * std::log(b)) : 0.0;
        }
    }
    std::sort(out.data(), out.data() + d, std::greater<double>());
    return out;
}

EqualityCaseReport equality_case_check(const HermitianOperator& rho, const HermitianOperator& sigma,
                                       LimitDirection direction) {
    const SpectralProfile profile = SpectralProfile::build(rho, sigma);
    if (!invertible(profile.b)) throw Error(ErrorKind::SingularSigma, "equality check needs invertible sigma");
    require_generic(direction == LimitDirection::Below ? genericity_condition_b(profile)
                                                       : genericity_condition_b_prime(profile));
    const int d = profile.dim();
    const double cross = trace_product(rho, logn(sigma));
    double paired = 0;
    for (int i = 0; i < d; ++i) {
        const double b = direction == LimitDirection::Below ? profile.b(i) : profile.b(d - 1 - i);
        paired += profile.a(i) * std::log(b);
    }
    const double gap = (direction == LimitDirection::Below ? paired - cross : cross - paired) / rho.trace();

    // Common eigenbasis: diagonalize sigma inside each eigenspace of rho.
    bool aligned = false;
    const Matrix comm = rho.matrix() * sigma.matrix() - sigma.matrix() * rho.matrix();
    if (comm.norm() <= 1e-8 * rho.spectral_norm() * sigma.spectral_norm()) {
        std::vector<std::pair<double, double>> pairs;
        for (std::size_t r = 1; r < profile.rho_blocks.size(); ++r) {
            const int lo = profile.rho_blocks[r - 1], hi = profile.rho_blocks[r];
            const Matrix basis = profile.v.middleCols(lo, hi - lo);
            const Matrix block = basis.adjoint() * sigma.matrix() * basis;
            const HermitianOperator hb(Matrix((block + block.adjoint()) / 2.0));
            for (int i = 0; i < hb.dim(); ++i) pairs.emplace_back(profile.a(lo), hb.eigenvalues()(i));
        }
        aligned = true;
        for (const auto& [ai, bi] : pairs)
            for (const auto& [aj, bj] : pairs) {
                if (!(ai > aj + 1e-8)) continue;
                if (direction == LimitDirection::Below && bi < bj - 1e-8) aligned = false;
                if (direction == LimitDirection::Above && bi > bj + 1e-8) aligned = false;
            }
    }
    return {gap, aligned, (gap <= 1e-8) == aligned};
}

ReducingSubspaceReport reducing_subspace_check(const HermitianOperator& a, const Projection& p) {
    if (a.dim() != p.dim()) throw Error(ErrorKind::DimMismatch, "operator and projection dimensions differ");
    const int k = p.rank();
    const double topk = a.eigenvalues().head(k).sum();
    const double tr = trace_product(a, p.op());
    const Matrix ap = a.matrix() * p.op().matrix();
    const Matrix pap = p.op().matrix() * ap;
    Eigen::JacobiSVD<Matrix> svd(ap - pap);
    const double defect = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    ReducingSubspaceReport out;
    out.trace_attains_topk = std::abs(tr - topk) <= 1e-8;
    out.reduces = defect <= 1e-8;
    out.consistent = !out.trace_attains_topk || out.reduces;
    return out;
}

} // namespace qrd
