#include "plab/kernels.hpp"

#include <vector>

#include <omp.h>

namespace plab::kernels::omp {

namespace {

// Fixed static partition: thread t owns [t*len/nt, (t+1)*len/nt).
template <class Partial, class Body>
std::vector<Partial> partitioned_reduce(std::size_t len, Body body)
{
    const int nt = omp_get_max_threads();
    std::vector<Partial> partial(static_cast<std::size_t>(nt));
#pragma omp parallel num_threads(nt)
    {
        const auto t = static_cast<std::size_t>(omp_get_thread_num());
        const auto n_threads = static_cast<std::size_t>(omp_get_num_threads());
        const std::size_t lo = t * len / n_threads;
        const std::size_t hi = (t + 1) * len / n_threads;
        partial[t] = body(lo, hi);
    }
    return partial;
}

} // namespace

int thread_count() { return omp_get_max_threads(); }

void apply_kick(std::span<cplx> amps, std::span<const cplx> kick_up, std::span<const cplx> kick_down)
{
    const auto n = static_cast<std::ptrdiff_t>(kick_up.size());
    cplx* p = amps.data();
    const cplx* ku = kick_up.data();
    const cplx* kd = kick_down.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        p[j] *= ku[j];
        p[n + j] *= kd[j];
        p[2 * n + j] *= ku[j];
        p[3 * n + j] *= kd[j];
    }
}

void apply_kinetic(std::span<cplx> amps, std::span<const cplx> kinetic, double scale)
{
    const auto n = static_cast<std::ptrdiff_t>(kinetic.size());
    cplx* p = amps.data();
    const cplx* kin = kinetic.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const cplx f = kin[k] * scale;
        p[k] *= f;
        p[n + k] *= f;
        p[2 * n + k] *= f;
        p[3 * n + k] *= f;
    }
}

void apply_spin_unitary(std::span<cplx> amps, std::size_t n_rotor, const Eigen::Matrix4cd& u)
{
    const auto n = static_cast<std::ptrdiff_t>(n_rotor);
    cplx* b0 = amps.data();
    cplx* b1 = b0 + n;
    cplx* b2 = b1 + n;
    cplx* b3 = b2 + n;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const cplx x0 = b0[j], x1 = b1[j], x2 = b2[j], x3 = b3[j];
        b0[j] = u(0, 0) * x0 + u(0, 1) * x1 + u(0, 2) * x2 + u(0, 3) * x3;
        b1[j] = u(1, 0) * x0 + u(1, 1) * x1 + u(1, 2) * x2 + u(1, 3) * x3;
        b2[j] = u(2, 0) * x0 + u(2, 1) * x1 + u(2, 2) * x2 + u(2, 3) * x3;
        b3[j] = u(3, 0) * x0 + u(3, 1) * x1 + u(3, 2) * x2 + u(3, 3) * x3;
    }
}

TraceSums trace_out_environment(std::span<const cplx> amps)
{
    const std::size_t half = amps.size() / 2;
    const cplx* up = amps.data();
    const cplx* dn = up + half;
    const auto partial = partitioned_reduce<TraceSums>(half, [&](std::size_t lo, std::size_t hi) {
        TraceSums t;
        for (std::size_t i = lo; i < hi; ++i) {
            t.m00 += std::norm(up[i]);
            t.m11 += std::norm(dn[i]);
            t.m01 += up[i] * std::conj(dn[i]);
        }
        return t;
    });
    TraceSums total;
    for (const auto& t : partial) {
        total.m00 += t.m00;
        total.m11 += t.m11;
        total.m01 += t.m01;
    }
    return total;
}

double norm_squared(std::span<const cplx> amps)
{
    const cplx* p = amps.data();
    const auto partial = partitioned_reduce<double>(amps.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            s += std::norm(p[i]);
        return s;
    });
    double total = 0.0;
    for (double s : partial)
        total += s;
    return total;
}

} // namespace plab::kernels::omp
