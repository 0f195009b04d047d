#include "plab/kernels.hpp"

namespace plab::kernels::serial {

void apply_kick(std::span<cplx> amps, std::span<const cplx> kick_up, std::span<const cplx> kick_down)
{
    const std::size_t n = kick_up.size();
    for (std::size_t blk = 0; blk < 4; ++blk) {
        const auto& kick = (blk % 2 == 0) ? kick_up : kick_down;
        cplx* p = amps.data() + blk * n;
        for (std::size_t j = 0; j < n; ++j)
            p[j] *= kick[j];
    }
}

void apply_kinetic(std::span<cplx> amps, std::span<const cplx> kinetic, double scale)
{
    const std::size_t n = kinetic.size();
    for (std::size_t blk = 0; blk < 4; ++blk) {
        cplx* p = amps.data() + blk * n;
        for (std::size_t k = 0; k < n; ++k)
            p[k] *= kinetic[k] * scale;
    }
}

void apply_spin_unitary(std::span<cplx> amps, std::size_t n_rotor, const Eigen::Matrix4cd& u)
{
    cplx* b0 = amps.data();
    cplx* b1 = b0 + n_rotor;
    cplx* b2 = b1 + n_rotor;
    cplx* b3 = b2 + n_rotor;
    for (std::size_t j = 0; j < n_rotor; ++j) {
        const cplx x0 = b0[j], x1 = b1[j], x2 = b2[j], x3 = b3[j];
        b0[j] = u(0, 0) * x0 + u(0, 1) * x1 + u(0, 2) * x2 + u(0, 3) * x3;
        b1[j] = u(1, 0) * x0 + u(1, 1) * x1 + u(1, 2) * x2 + u(1, 3) * x3;
        b2[j] = u(2, 0) * x0 + u(2, 1) * x1 + u(2, 2) * x2 + u(2, 3) * x3;
        b3[j] = u(3, 0) * x0 + u(3, 1) * x1 + u(3, 2) * x2 + u(3, 3) * x3;
    }
}

TraceSums trace_out_environment(std::span<const cplx> amps)
{
    // s = 0 occupies the first half (blocks a = 0, 1), s = 1 the second.
    const std::size_t half = amps.size() / 2;
    const cplx* up = amps.data();
    const cplx* dn = up + half;
    TraceSums t;
    for (std::size_t i = 0; i < half; ++i) {
        t.m00 += std::norm(up[i]);
        t.m11 += std::norm(dn[i]);
        t.m01 += up[i] * std::conj(dn[i]);
    }
    return t;
}

double norm_squared(std::span<const cplx> amps)
{
    double s = 0.0;
    for (const auto& c : amps)
        s += std::norm(c);
    return s;
}

} // namespace plab::kernels::serial
