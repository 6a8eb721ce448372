#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qrd/divergences.hpp"
#include "qrd/opcore.hpp"

namespace qrd {

// Completely positive map given by Kraus operators (d_out x d_in). The Choi matrix uses
// Omega = sum_i e_i (x) e_i with the input copy on the first factor:
// C = sum_k (I (x) K_k)|Omega><Omega|(I (x) K_k)^dagger, a (d_in d_out)-dimensional operator.
class Channel {
public:
    static Channel from_kraus(std::vector<Matrix> kraus);
    // Validated PSD; Kraus operators come from its eigendecomposition.
    static Channel from_choi(const HermitianOperator& choi, int d_in, int d_out);

    static Channel identity(int d);
    // rho -> (1-p) rho + p Tr(rho) I/d
    static Channel depolarizing(int d, double p);
    // Column-stochastic w(y, x) = W(y|x); Kraus sqrt(W(y|x)) |y><x|.
    static Channel classical(const Eigen::MatrixXd& w);

    int d_in() const { return d_in_; }
    int d_out() const { return d_out_; }
    const std::vector<Matrix>& kraus() const { return kraus_; }
    const HermitianOperator& choi() const { return *choi_; }
    bool trace_preserving() const;
    // Maps every nonzero PSD input to a nonzero output, i.e. sum K^dagger K is invertible.
    bool cp_plus() const;

    HermitianOperator apply(const HermitianOperator& rho) const;

private:
    Channel(std::vector<Matrix> kraus, int d_in, int d_out);

    std::vector<Matrix> kraus_;
    int d_in_;
    int d_out_;
    std::optional<HermitianOperator> choi_;
};

// (id (x) N)(rho) for rho on C^r (x) C^d_in; the reference dimension r is dim / d_in.
HermitianOperator apply_extended(const Channel& channel, const HermitianOperator& rho_bipartite);

// Choi(lambda n2 - n1) PSD within slack 1e-9.
bool cp_order_check(const Channel& n1, const Channel& n2, double lambda);

ExtendedReal channel_dmax(const Channel& n1, const Channel& n2);
// log of the smallest lambda passing cp_order_check, by bisection.
ExtendedReal channel_dmax_bisection(const Channel& n1, const Channel& n2, double tol = 1e-12);

enum class DivergenceKind { AlphaZ, Umegaki, Measured, DMax };

struct ChannelDivergenceSpec {
    DivergenceKind kind = DivergenceKind::AlphaZ;
    std::optional<DivergenceParams> params;  // required for AlphaZ, alpha for Measured

    static ChannelDivergenceSpec alpha_z(const DivergenceParams& params);
    static ChannelDivergenceSpec umegaki();
    static ChannelDivergenceSpec measured(double alpha);
    static ChannelDivergenceSpec dmax();
};

// Kinds for which the output divergence is monotone under channels, so the purified
// single-copy supremum is the channel divergence.
bool whitelisted(const ChannelDivergenceSpec& spec);

struct ChannelDivergenceResult {
    ExtendedReal value;
    CVector argmax_state;  // unit vector in C^d_in (x) C^d_in
    int restarts_used;
    bool converged;
};

// Divergence of the two outputs for the pure input psi (normalized internally).
ExtendedReal channel_divergence_at(const Channel& n1, const Channel& n2, const ChannelDivergenceSpec& spec,
                                   const CVector& psi);

ChannelDivergenceResult channel_divergence(const Channel& n1, const Channel& n2, const ChannelDivergenceSpec& spec,
                                           int restarts = 32, std::uint64_t seed = 0);

enum class SweepFamily { Petz, Sandwiched, Measured };

struct ChannelSweep {
    std::vector<std::pair<double, ExtendedReal>> points;
    bool monotone;  // nondecreasing in alpha within 1e-3 (checked for Petz and sandwiched)
};

// Parameters used at each alpha; alpha = 1 maps to Umegaki.
ChannelDivergenceSpec sweep_spec(SweepFamily family, double alpha);

// Every alpha reuses the same restart seeds so curve noise is correlated.
ChannelSweep alpha_sweep_channel(const Channel& n1, const Channel& n2, SweepFamily family,
                                 const std::vector<double>& alpha_grid, int shared_restarts, std::uint64_t seed);

} // namespace qrd
