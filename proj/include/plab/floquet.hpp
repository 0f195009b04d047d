#pragma once

// One-period propagator of the S + A + kicked-rotor model and its
// split-operator evolution:
//
//   U_T = exp(-iT (wx sx^S + wz sz^S + wA sx^A + eps sz^S sz^A))
//         * exp(-iT p^2/2) * exp(-i v cos g) * exp(-i lambda sz^A cos g)
//
// Rotor on the torus: g_j = 2 pi j / N, p_n = n + offset, n in [-N/2, N/2), T = 2 pi / N.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "plab/error.hpp"
#include "plab/qstate.hpp"

namespace plab {

struct ModelParams {
    double omega_x = 0.5e3;
    double omega_z = 1.0e3;
    double omega_a = 1.5e3;
    double epsilon = 0.0;
    double lambda = 0.1;
    double kick = 0.0; // v; see with_kick_times_period
    std::uint32_t n_rotor = 4096;

    double period() const { return 2.0 * kPi / static_cast<double>(n_rotor); }
    double kick_times_period() const { return kick * period(); }
    /// Sets v from the classical chaos parameter v*T.
    ModelParams& with_kick_times_period(double vt)
    {
        kick = vt / period();
        return *this;
    }
    /// Throws ConfigError unless N >= 4 is a power of two and all fields are finite.
    void validate() const;

    /// Reference parameter set: wx = 500, wz = 1000, wA = 1500, v T = 90,
    /// N = 4096, lambda = 0.1.
    static ModelParams reference_defaults(double epsilon);
};

/// Pauli matrices and the 4x4 spin Hamiltonian on S (x) A, index 2s + a.
Mat2 pauli_x();
Mat2 pauli_y();
Mat2 pauli_z();
Mat4 spin_hamiltonian(const ModelParams& p);

/// exp(-iT H_spin) from the exact eigendecomposition of the 4x4 Hermitian.
Mat4 build_spin_unitary(const ModelParams& p);

enum class KernelBackend { omp, serial };

class FloquetStepper {
public:
    explicit FloquetStepper(const ModelParams& p, double momentum_offset = 0.0,
                            KernelBackend backend = KernelBackend::omp);
    ~FloquetStepper();
    FloquetStepper(const FloquetStepper&) = delete;
    FloquetStepper& operator=(const FloquetStepper&) = delete;
    FloquetStepper(FloquetStepper&&) noexcept;
    FloquetStepper& operator=(FloquetStepper&&) noexcept;

    const ModelParams& params() const { return params_; }
    std::size_t n_rotor() const { return params_.n_rotor; }
    const Mat4& spin_unitary() const { return spin_unitary_; }
    std::span<const cplx> kinetic_phases() const { return kinetic_; }
    std::span<const cplx> kick_phases_up() const { return kick_up_; }
    std::span<const cplx> kick_phases_down() const { return kick_down_; }
    /// Momentum eigenvalue carried by transform bin k.
    double momentum_of_bin(std::size_t k) const;

    /// One period in place: kick, forward transform, kinetic phase, inverse
    /// transform, spin unitary.
    void step_in_place(TotalState& state) const;

private:
    struct FftPlans;
    ModelParams params_;
    double momentum_offset_;
    KernelBackend backend_;
    Mat4 spin_unitary_;
    std::vector<cplx> kinetic_;
    std::vector<cplx> kick_up_;
    std::vector<cplx> kick_down_;
    std::unique_ptr<FftPlans> fft_;
};

TotalState step(const TotalState& state, const FloquetStepper& f);

/// Called after every completed period with the 1-based period index.
using StepObserver = std::function<void(std::uint64_t, const TotalState&)>;

/// Raised when an observer throws; carries the periods evolved, including the one whose observer failed.
class EvolutionAborted : public std::runtime_error {
public:
    EvolutionAborted(std::uint64_t completed, const std::string& why)
        : std::runtime_error("evolution aborted after " + std::to_string(completed) +
                             " periods: " + why),
          completed_steps(completed)
    {
    }
    std::uint64_t completed_steps;
};

TotalState evolve(TotalState state, const FloquetStepper& f, std::uint64_t n_steps,
                  const StepObserver& observer = {});

/// i.i.d. complex Gaussian amplitudes, normalized; reproducible from seed.
std::vector<cplx> random_rotor_state(std::size_t n_rotor, std::uint64_t seed);

// Checkpoint file: "PLAB1", N (u32 LE), step (u64 LE), 8 doubles
// (wx, wz, wA, eps, lambda, v, N, T), then 4N complex doubles (re, im), all little-endian.
struct Checkpoint {
    ModelParams params;
    std::uint64_t step = 0;
    TotalState state;
};

void write_checkpoint(const std::filesystem::path& path, const TotalState& state,
                      const ModelParams& params, std::uint64_t step);
Checkpoint read_checkpoint(const std::filesystem::path& path);

} // namespace plab
