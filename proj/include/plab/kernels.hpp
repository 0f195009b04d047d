#pragma once

// Data-parallel inner loops of the Floquet step and the partial trace.
//
// Two implementations share one signature set:
//   plab::kernels::serial  straight loops, the reference kept for testing
//   plab::kernels::omp     OpenMP-parallel loops
// Elementwise kernels are bitwise identical between the two. Reductions in the
// omp variant use a fixed static partition combined in thread order, so the
// result is deterministic for a fixed thread count.
//
// All kernels take the (s, a, j) amplitude layout, 4 contiguous rotor blocks.

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace plab::kernels {

using cplx = std::complex<double>;

struct TraceSums {
    double m00 = 0.0;
    double m11 = 0.0;
    cplx m01{0.0, 0.0};
};

namespace serial {
// amps[(2s+a)N + j] *= (a == 0 ? kick_up[j] : kick_down[j])
void apply_kick(std::span<cplx> amps, std::span<const cplx> kick_up, std::span<const cplx> kick_down);
// amps[b*N + k] *= kinetic[k] * scale, every block b
void apply_kinetic(std::span<cplx> amps, std::span<const cplx> kinetic, double scale);
// the (s,a) 4-vector at each rotor index is multiplied by u
void apply_spin_unitary(std::span<cplx> amps, std::size_t n_rotor, const Eigen::Matrix4cd& u);
TraceSums trace_out_environment(std::span<const cplx> amps);
double norm_squared(std::span<const cplx> amps);
} // namespace serial

namespace omp {
void apply_kick(std::span<cplx> amps, std::span<const cplx> kick_up, std::span<const cplx> kick_down);
void apply_kinetic(std::span<cplx> amps, std::span<const cplx> kinetic, double scale);
void apply_spin_unitary(std::span<cplx> amps, std::size_t n_rotor, const Eigen::Matrix4cd& u);
TraceSums trace_out_environment(std::span<const cplx> amps);
double norm_squared(std::span<const cplx> amps);
int thread_count();
} // namespace omp

} // namespace plab::kernels
