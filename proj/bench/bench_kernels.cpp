// Serial reference kernels vs the OpenMP kernels, plus a full Floquet period.
//
//   ./build/bench/plab_bench --benchmark_filter=Step
//   OMP_NUM_THREADS=4 ./build/bench/plab_bench

#include <benchmark/benchmark.h>

#include "plab/floquet.hpp"
#include "plab/kernels.hpp"

namespace {

plab::TotalState make_state(std::size_t n)
{
    const auto rotor = plab::random_rotor_state(n, 7);
    return plab::TotalState::product(plab::Vec2(0.6, 0.8), plab::Vec2(1.0, 0.0), rotor);
}

template <plab::KernelBackend B>
void BM_Step(benchmark::State& st)
{
    const auto n = static_cast<std::uint32_t>(st.range(0));
    auto p = plab::ModelParams::reference_defaults(2000.0);
    p.n_rotor = n;
    p.with_kick_times_period(90.0);
    const plab::FloquetStepper stepper(p, 0.0, B);
    auto psi = make_state(n);
    for (auto _ : st) {
        stepper.step_in_place(psi);
        benchmark::DoNotOptimize(psi.amplitudes().data());
    }
    st.SetItemsProcessed(st.iterations() * 4 * n);
}

template <bool Omp>
void BM_SpinUnitary(benchmark::State& st)
{
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto u = plab::build_spin_unitary(plab::ModelParams::reference_defaults(2000.0));
    auto psi = make_state(n);
    for (auto _ : st) {
        if constexpr (Omp)
            plab::kernels::omp::apply_spin_unitary(psi.amplitudes_mut(), n, u);
        else
            plab::kernels::serial::apply_spin_unitary(psi.amplitudes_mut(), n, u);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * 4 * n);
}

template <bool Omp>
void BM_PartialTrace(benchmark::State& st)
{
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto psi = make_state(n);
    for (auto _ : st) {
        auto t = Omp ? plab::kernels::omp::trace_out_environment(psi.amplitudes())
                     : plab::kernels::serial::trace_out_environment(psi.amplitudes());
        benchmark::DoNotOptimize(t);
    }
    st.SetItemsProcessed(st.iterations() * 4 * n);
}

} // namespace

BENCHMARK(BM_Step<plab::KernelBackend::serial>)->RangeMultiplier(4)->Range(256, 16384);
BENCHMARK(BM_Step<plab::KernelBackend::omp>)->RangeMultiplier(4)->Range(256, 16384);
BENCHMARK(BM_SpinUnitary<false>)->Arg(4096)->Arg(65536);
BENCHMARK(BM_SpinUnitary<true>)->Arg(4096)->Arg(65536);
BENCHMARK(BM_PartialTrace<false>)->Arg(4096)->Arg(65536);
BENCHMARK(BM_PartialTrace<true>)->Arg(4096)->Arg(65536);

BENCHMARK_MAIN();
