#pragma once

// Brute-force reference for the Floquet step at small N.
//
// Builds the full 4N x 4N one-period matrix by multiplying explicit factor
// matrices: a dense DFT, the kinetic diagonal, the kick diagonals, and the spin
// factor from a scaled-and-squared Taylor series. Shares no code path with the
// split-operator stepper, so agreement between the two is a real check.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "plab/floquet.hpp"

namespace plab::oracle {

/// exp(A) by scaling and squaring with a truncated Taylor series.
Eigen::MatrixXcd expm_taylor(const Eigen::MatrixXcd& a);

/// Full one-period matrix acting on the (s, a, j) layout. Rejects N > 256.
Eigen::MatrixXcd dense_floquet_matrix(const ModelParams& p);

struct OracleReport {
    std::uint32_t n_rotor = 0;
    int n_states = 0;
    int n_steps = 0;
    double max_amplitude_error = 0.0;
    double seconds = 0.0;
};

/// Evolves n_states random states for n_steps with both routes and reports the
/// worst per-amplitude deviation.
OracleReport compare_with_stepper(const ModelParams& p, int n_states, int n_steps, std::uint64_t seed);

} // namespace plab::oracle
