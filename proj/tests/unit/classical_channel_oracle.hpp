#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

// Brute-force oracle for classical channels (column-stochastic w(y, x)) with two inputs:
// the stabilized divergence is a supremum over input weights (t, 1 - t) of the classical
// Renyi divergence between the joint tables t_x w1(y|x) and t_x w2(y|x). Written
// independently of the library on purpose.
namespace qrd::testing {

inline double joint_renyi(const Eigen::MatrixXd& w1, const Eigen::MatrixXd& w2, double t, double alpha) {
    const double weights[2] = {t, 1 - t};
    double q = 0, kl = 0;
    for (int x = 0; x < 2; ++x) {
        if (weights[x] == 0) continue;
        for (int y = 0; y < w1.rows(); ++y) {
            const double a = weights[x] * w1(y, x), b = weights[x] * w2(y, x);
            if (a == 0) continue;
            if (b == 0) return INFINITY;
            if (alpha == 1) kl += a * std::log(a / b);
            else q += std::pow(a, alpha) * std::pow(b, 1 - alpha);
        }
    }
    return alpha == 1 ? kl : std::log(q) / (alpha - 1);
}

struct GridOracle {
    std::vector<double> sup_by_alpha;  // sup over the input grid, per alpha
    double minimax_gap;                // inf_alpha sup_t minus sup_t inf_alpha
};

inline GridOracle classical_channel_oracle(const Eigen::MatrixXd& w1, const Eigen::MatrixXd& w2,
                                           const std::vector<double>& alphas, double step = 1e-3) {
    const int points = static_cast<int>(std::round(1 / step));
    GridOracle out{std::vector<double>(alphas.size(), -INFINITY), 0};
    double sup_inf = -INFINITY;
    for (int i = 0; i <= points; ++i) {
        const double t = static_cast<double>(i) / points;
        double inf_alpha = INFINITY;
        for (std::size_t k = 0; k < alphas.size(); ++k) {
            const double v = joint_renyi(w1, w2, t, alphas[k]);
            out.sup_by_alpha[k] = std::max(out.sup_by_alpha[k], v);
            inf_alpha = std::min(inf_alpha, v);
        }
        sup_inf = std::max(sup_inf, inf_alpha);
    }
    double inf_sup = INFINITY;
    for (double s : out.sup_by_alpha) inf_sup = std::min(inf_sup, s);
    out.minimax_gap = inf_sup - sup_inf;
    return out;
}

} // namespace qrd::testing
