#include "plab/floquet.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <random>

#include <fftw3.h>

#include "plab/kernels.hpp"

namespace plab {

void ModelParams::validate() const
{
    if (n_rotor < 4 || !std::has_single_bit(n_rotor))
        throw ConfigError("n_rotor must be a power of two >= 4, got " + std::to_string(n_rotor));
    for (double x : {omega_x, omega_z, omega_a, epsilon, lambda, kick})
        if (!std::isfinite(x))
            throw ConfigError("model parameters must be finite");
}

ModelParams ModelParams::reference_defaults(double epsilon)
{
    ModelParams p;
    p.epsilon = epsilon;
    p.with_kick_times_period(90.0);
    return p;
}

Mat2 pauli_x()
{
    Mat2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Mat2 pauli_y()
{
    Mat2 m;
    m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return m;
}

Mat2 pauli_z()
{
    Mat2 m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

namespace {

Mat4 kron(const Mat2& a, const Mat2& b)
{
    Mat4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

} // namespace

Mat4 spin_hamiltonian(const ModelParams& p)
{
    const Mat2 id = Mat2::Identity();
    return kron(p.omega_x * pauli_x() + p.omega_z * pauli_z(), id) +
           kron(id, p.omega_a * pauli_x()) + p.epsilon * kron(pauli_z(), pauli_z());
}

Mat4 build_spin_unitary(const ModelParams& p)
{
    // Extended precision: |T H| reaches ~1e4 rad at small N, where double
    // eigenphases lose ~1e-12 per period.
    using MatL = Eigen::Matrix<std::complex<long double>, 4, 4>;
    const MatL h = spin_hamiltonian(p).cast<std::complex<long double>>();
    const Eigen::SelfAdjointEigenSolver<MatL> es(h);
    const long double t = 2.0L * 3.141592653589793238462643383279502884L / static_cast<long double>(p.n_rotor);
    Eigen::Matrix<std::complex<long double>, 4, 1> phases;
    for (int k = 0; k < 4; ++k)
        phases(k) = std::polar(1.0L, -t * es.eigenvalues()(k));
    const MatL u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return u.cast<cplx>();
}

// ---------------------------------------------------------------------------

namespace {
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}
} // namespace

struct FloquetStepper::FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit FftPlans(std::size_t n)
    {
        const std::lock_guard lock(planner_mutex());
        auto* scratch = fftw_alloc_complex(4 * n);
        const int len = static_cast<int>(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward = fftw_plan_many_dft(1, &len, 4, scratch, nullptr, 1, len, scratch, nullptr, 1, len,
                                     FFTW_FORWARD, flags);
        backward = fftw_plan_many_dft(1, &len, 4, scratch, nullptr, 1, len, scratch, nullptr, 1, len,
                                      FFTW_BACKWARD, flags);
        fftw_free(scratch);
        if (!forward || !backward)
            throw NumericalError("FFTW planning failed");
    }
    ~FftPlans()
    {
        const std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
};

FloquetStepper::FloquetStepper(const ModelParams& p, double momentum_offset, KernelBackend backend)
    : params_(p), momentum_offset_(momentum_offset), backend_(backend)
{
    params_.validate();
    const std::size_t n = params_.n_rotor;
    const double t = params_.period();
    spin_unitary_ = build_spin_unitary(params_);

    kinetic_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double pn = momentum_of_bin(k);
        kinetic_[k] = std::polar(1.0, -0.5 * t * pn * pn);
    }
    kick_up_.resize(n);
    kick_down_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double cg = std::cos(2.0 * kPi * static_cast<double>(j) / static_cast<double>(n));
        kick_up_[j] = std::polar(1.0, -(params_.kick + params_.lambda) * cg);
        kick_down_[j] = std::polar(1.0, -(params_.kick - params_.lambda) * cg);
    }
    fft_ = std::make_unique<FftPlans>(n);
}

FloquetStepper::~FloquetStepper() = default;
FloquetStepper::FloquetStepper(FloquetStepper&&) noexcept = default;
FloquetStepper& FloquetStepper::operator=(FloquetStepper&&) noexcept = default;

double FloquetStepper::momentum_of_bin(std::size_t k) const
{
    const auto n = static_cast<std::ptrdiff_t>(params_.n_rotor);
    auto idx = static_cast<std::ptrdiff_t>(k);
    if (idx >= n / 2)
        idx -= n;
    return static_cast<double>(idx) + momentum_offset_;
}

void FloquetStepper::step_in_place(TotalState& state) const
{
    if (state.n_rotor() != params_.n_rotor)
        throw ConfigError("step: state has N = " + std::to_string(state.n_rotor()) +
                          " but the stepper was built for N = " + std::to_string(params_.n_rotor));
    auto amps = state.amplitudes_mut();
    auto* raw = reinterpret_cast<fftw_complex*>(amps.data());
    const double inv_n = 1.0 / static_cast<double>(params_.n_rotor);

    if (backend_ == KernelBackend::omp)
        kernels::omp::apply_kick(amps, kick_up_, kick_down_);
    else
        kernels::serial::apply_kick(amps, kick_up_, kick_down_);

    fftw_execute_dft(fft_->forward, raw, raw);
    if (backend_ == KernelBackend::omp)
        kernels::omp::apply_kinetic(amps, kinetic_, inv_n);
    else
        kernels::serial::apply_kinetic(amps, kinetic_, inv_n);
    fftw_execute_dft(fft_->backward, raw, raw);

    if (backend_ == KernelBackend::omp)
        kernels::omp::apply_spin_unitary(amps, params_.n_rotor, spin_unitary_);
    else
        kernels::serial::apply_spin_unitary(amps, params_.n_rotor, spin_unitary_);
}

TotalState step(const TotalState& state, const FloquetStepper& f)
{
    TotalState out = state;
    f.step_in_place(out);
    return out;
}

TotalState evolve(TotalState state, const FloquetStepper& f, std::uint64_t n_steps,
                  const StepObserver& observer)
{
    for (std::uint64_t i = 1; i <= n_steps; ++i) {
        f.step_in_place(state);
        if (observer) {
            try {
                observer(i, state);
            } catch (const std::exception& e) {
                throw EvolutionAborted(i, e.what());
            }
        }
    }
    return state;
}

std::vector<cplx> random_rotor_state(std::size_t n_rotor, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::vector<cplx> v(n_rotor);
    double nrm = 0.0;
    for (auto& c : v) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        c = cplx(re, im);
        nrm += std::norm(c);
    }
    const double scale = 1.0 / std::sqrt(nrm);
    for (auto& c : v)
        c *= scale;
    return v;
}

// ---------------------------------------------------------------------------
// Checkpoint I/O, explicit little-endian byte order.

namespace {

constexpr char kMagic[5] = {'P', 'L', 'A', 'B', '1'};

template <class U>
void put_le(std::ostream& os, U value)
{
    unsigned char bytes[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i)
        bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xFFu);
    os.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <class U>
U get_le(std::istream& is)
{
    unsigned char bytes[sizeof(U)];
    is.read(reinterpret_cast<char*>(bytes), sizeof(U));
    if (!is)
        throw ConfigError("checkpoint: truncated file");
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        value |= static_cast<U>(bytes[i]) << (8 * i);
    return value;
}

void put_double(std::ostream& os, double x) { put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(x)); }

double get_double(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

} // namespace

void write_checkpoint(const std::filesystem::path& path, const TotalState& state,
                      const ModelParams& params, std::uint64_t step)
{
    if (state.n_rotor() != params.n_rotor)
        throw ConfigError("write_checkpoint: state and params disagree on N");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw ConfigError("cannot open checkpoint for writing: " + path.string());
    os.write(kMagic, sizeof kMagic);
    put_le<std::uint32_t>(os, params.n_rotor);
    put_le<std::uint64_t>(os, step);
    for (double x : {params.omega_x, params.omega_z, params.omega_a, params.epsilon, params.lambda,
                     params.kick, static_cast<double>(params.n_rotor), params.period()})
        put_double(os, x);
    for (const auto& c : state.amplitudes()) {
        put_double(os, c.real());
        put_double(os, c.imag());
    }
    if (!os)
        throw ConfigError("checkpoint write failed: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw ConfigError("cannot open checkpoint: " + path.string());
    char magic[5];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw ConfigError("checkpoint: bad magic in " + path.string());
    Checkpoint cp;
    const auto n = get_le<std::uint32_t>(is);
    cp.step = get_le<std::uint64_t>(is);
    cp.params.omega_x = get_double(is);
    cp.params.omega_z = get_double(is);
    cp.params.omega_a = get_double(is);
    cp.params.epsilon = get_double(is);
    cp.params.lambda = get_double(is);
    cp.params.kick = get_double(is);
    const double n_stored = get_double(is);
    const double t_stored = get_double(is);
    cp.params.n_rotor = n;
    if (n_stored != static_cast<double>(n) || t_stored != cp.params.period())
        throw ConfigError("checkpoint: header N/T fields are inconsistent");
    cp.params.validate();
    std::vector<cplx> amps(4 * static_cast<std::size_t>(n));
    for (auto& c : amps) {
        const double re = get_double(is);
        const double im = get_double(is);
        c = cplx(re, im);
    }
    cp.state = TotalState(std::move(amps));
    return cp;
}

} // namespace plab
