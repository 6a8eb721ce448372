#pragma once

#include <cstdint>
#include <random>

#include "qrd/opcore.hpp"

namespace qrd {

using Rng = std::mt19937_64;

// Independent stream for (seed, stream index); used per trial and per restart.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

Matrix random_ginibre(int rows, int cols, Rng& rng);
Matrix random_unitary(int d, Rng& rng);
CVector random_unit_vector(int d, Rng& rng);

// Hilbert-Schmidt random density operator of the given rank.
HermitianOperator random_state(int d, Rng& rng, int rank = -1);

// Random density operator whose eigenvalues are all at least floor.
HermitianOperator random_invertible_state(int d, Rng& rng, double floor = 0.02);

// U diag(spectrum) U^dagger for a Haar-random U.
HermitianOperator random_with_spectrum(const RVector& spectrum, Rng& rng);

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0);

} // namespace qrd
