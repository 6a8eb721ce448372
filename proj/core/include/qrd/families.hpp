#pragma once

#include <functional>
#include <string>

#include "qrd/opcore.hpp"

namespace qrd {

struct StatePair {
    HermitianOperator rho;
    HermitianOperator sigma;
    // |numeric - closed form| of the family's defining identity at this index.
    double identity_residual;
};

// Qubit pair rho = (I + c Z)/2, sigma = (I + a X + b Z)/2 with delta = (1-c)^(1+gamma),
// b = c - delta, a = sqrt(c^2 - b^2). Identity: |<e0|f1>|^2 = delta / (2c), f1 the
// low eigenvector of sigma. The default schedule is c_n = 1 - 2^-n.
StatePair gen_a2(double gamma, long long n, const std::function<double(long long)>& schedule = {});

// (|psi><psi|, diag(c eps, 1 - c eps)) with psi = (sqrt eps, sqrt(1 - eps)).
// Identity: D_max = log(1/c + (1 - eps)/(1 - c eps)) for eps > 0.
StatePair gen_pure(double c, double eps);

// The pure pair with c = 1/(lambda - 1) placed on the first two basis vectors of C^dim,
// sigma mixed with eps of the complement when dim > 2, then sigma -> sigma^(1/kappa) normalized.
// Identity: D_max(rho || unpowered sigma) in closed form.
StatePair gen_kappa(double kappa, double lambda, double eps, int dim);

// sigma = [[1, eps], [eps, eps]]^2, rho = sigma^1/2 C sigma^1/2 with C = [[1, g], [g, g]],
// both trace-normalized. Identity: D_max of the unnormalized pair equals log ||C||.
StatePair gen_appE(double gamma, double eps);

// Diagonal qubit embedding of the classical knife-edge pair.
StatePair gen_knife(double c, double d, double beta, double gamma, long long n);

struct FamilySpec {
    enum class Tag { A2, Pure, Kappa, AppE, Knife };

    Tag tag = Tag::Pure;
    double gamma = 1.0;
    double c = 1.0;
    double d = 1.0;
    double beta = 0.5;
    double kappa = 1.0;
    double lambda = 2.0;
    int dim = 2;

    static Tag parse_tag(const std::string& name);
    static std::string tag_name(Tag tag);
};

// index is n for A2 and Knife (rounded), eps otherwise.
StatePair generate(const FamilySpec& spec, double index);

} // namespace qrd
