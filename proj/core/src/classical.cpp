#include "qrd/classical.hpp"

#include <cmath>
#include <numeric>

namespace qrd {

namespace {

void require_same_length(const WeightVector& p, const WeightVector& q) {
    if (p.size() != q.size()) throw Error(ErrorKind::DimMismatch, "weight vectors differ in length");
}

void require_alpha(double alpha) {
    if (!(alpha > 0) || !std::isfinite(alpha)) throw Error(ErrorKind::BadAlpha, "alpha must be positive and finite");
}

} // namespace

WeightVector::WeightVector(std::vector<double> values) : values_(std::move(values)) {
    bool positive = false;
    for (double v : values_) {
        if (!(v >= 0) || !std::isfinite(v)) throw Error(ErrorKind::BadParams, "weights must be finite and nonnegative");
        positive = positive || v > 0;
    }
    if (!positive) throw Error(ErrorKind::ZeroOperator, "weight vector is identically zero");
}

double WeightVector::total() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
}

ConvexFunctionSpec ConvexFunctionSpec::power(double alpha) {
    require_alpha(alpha);
    if (alpha == 1.0) throw Error(ErrorKind::BadAlpha, "power function needs alpha != 1");
    ConvexFunctionSpec f;
    f.tag = Tag::Power;
    f.alpha = alpha;
    f.sign = alpha < 1 ? -1.0 : 1.0;
    f.limit_at_zero = 0.0;
    f.slope_at_infinity = alpha < 1 ? ExtendedReal(0.0) : ExtendedReal::infinity();
    return f;
}

ConvexFunctionSpec ConvexFunctionSpec::eta() {
    ConvexFunctionSpec f;
    f.tag = Tag::Eta;
    f.limit_at_zero = 0.0;
    f.slope_at_infinity = ExtendedReal::infinity();
    return f;
}

ConvexFunctionSpec ConvexFunctionSpec::custom_function(std::function<double(double)> fn, ExtendedReal at_zero,
                                                       ExtendedReal slope_at_infinity) {
    ConvexFunctionSpec f;
    f.tag = Tag::Custom;
    f.custom = std::move(fn);
    f.limit_at_zero = at_zero;
    f.slope_at_infinity = slope_at_infinity;
    return f;
}

double ConvexFunctionSpec::operator()(double t) const {
    switch (tag) {
    case Tag::Power: return sign * std::pow(t, alpha);
    case Tag::Eta: return t > 0 ? t * std::log(t) : 0.0;
    case Tag::Custom: return custom(t);
    }
    return 0.0;
}

ExtendedReal classical_q(const WeightVector& p, const WeightVector& q, double alpha) {
    require_alpha(alpha);
    require_same_length(p, q);
    double total = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0) continue;
        if (q[i] == 0) {
            if (alpha > 1) return ExtendedReal::infinity();
            continue;
        }
        total += std::exp(alpha * std::log(p[i]) + (1 - alpha) * std::log(q[i]));
    }
    return total;
}

ExtendedReal classical_renyi(const WeightVector& p, const WeightVector& q, double alpha) {
    require_alpha(alpha);
    require_same_length(p, q);
    const double mass = p.total();
    if (alpha == 1.0) {
        double total = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] == 0) continue;
            if (q[i] == 0) return ExtendedReal::infinity();
            total += p[i] * (std::log(p[i]) - std::log(q[i]));
        }
        return total / mass;
    }
    ExtendedReal qv = classical_q(p, q, alpha);
    if (qv.is_infinite()) return qv;
    if (qv.value() <= 0) return ExtendedReal::infinity();  // alpha < 1, disjoint supports
    return (std::log(qv.value()) - std::log(mass)) / (alpha - 1);
}

ExtendedReal perspective(const ConvexFunctionSpec& f, double x, double y) {
    if (y > 0) {
        if (x == 0) {
            if (f.limit_at_zero.is_infinite()) return ExtendedReal::infinity();
            return y * f.limit_at_zero.value();
        }
        return y * f(x / y);
    }
    if (x == 0) return 0.0;
    if (f.slope_at_infinity.is_infinite()) return ExtendedReal::infinity();
    return x * f.slope_at_infinity.value();
}

ExtendedReal classical_fdiv(const ConvexFunctionSpec& f, const WeightVector& p, const WeightVector& q) {
    require_same_length(p, q);
    ExtendedReal total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) total = total + perspective(f, p[i], q[i]);
    return total;
}

std::pair<WeightVector, WeightVector> knife_edge_family(double c, double d, double beta, double gamma, long long n) {
    if (!(c > 0 && d > 0 && beta > 0 && gamma > 0) || n < 1)
        throw Error(ErrorKind::BadParams, "knife-edge family needs c, d, beta, gamma > 0 and n >= 1");
    const double ln_n = std::log(static_cast<double>(n));
    const double a = c * std::exp(-beta * ln_n);
    const double b = d * std::exp(-gamma * ln_n);
    if (a >= 1 || b >= 1) throw Error(ErrorKind::BadParams, "knife-edge tail weight must stay below 1");
    return {WeightVector({1 - a, a}), WeightVector({1 - b, b})};
}

} // namespace qrd
