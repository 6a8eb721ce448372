#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "qrd/errors.hpp"
#include "qrd/extended_real.hpp"

namespace qrd {

// Nonnegative weights, not all zero.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double total() const;

private:
    std::vector<double> values_;
};

// Convex function on [0, inf) together with the two limits its perspective needs.
struct ConvexFunctionSpec {
    enum class Tag { Power, Eta, Custom };

    Tag tag = Tag::Power;
    double alpha = 2.0;
    double sign = 1.0;
    std::function<double(double)> custom;
    ExtendedReal limit_at_zero = 0.0;
    ExtendedReal slope_at_infinity = ExtendedReal::infinity();

    // sign(alpha) * t^alpha with sign -1 on (0,1) and +1 on (1,inf).
    static ConvexFunctionSpec power(double alpha);
    // t log t
    static ConvexFunctionSpec eta();
    static ConvexFunctionSpec custom_function(std::function<double(double)> f, ExtendedReal at_zero,
                                              ExtendedReal slope_at_infinity);

    double operator()(double t) const;
};

// Q^cl_alpha = sum p^alpha q^(1-alpha), +inf for alpha > 1 when p is not dominated by q.
ExtendedReal classical_q(const WeightVector& p, const WeightVector& q, double alpha);

ExtendedReal classical_renyi(const WeightVector& p, const WeightVector& q, double alpha);

ExtendedReal perspective(const ConvexFunctionSpec& f, double x, double y);

ExtendedReal classical_fdiv(const ConvexFunctionSpec& f, const WeightVector& p, const WeightVector& q);

// ((1 - c n^-beta, c n^-beta), (1 - d n^-gamma, d n^-gamma))
std::pair<WeightVector, WeightVector> knife_edge_family(double c, double d, double beta, double gamma, long long n);

} // namespace qrd
