#include "plab/dense_oracle.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace plab::oracle {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

MatrixXcd expm_taylor(const MatrixXcd& a)
{
    // Carried out in extended precision: the squaring phase amplifies rounding
    // by 2^squarings, and ||a|| reaches ~1e4 for the small-N propagators.
    using MatL = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
    const double nrm = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (nrm > 0.25)
        squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.25)));
    const MatL scaled = a.cast<std::complex<long double>>() / std::ldexp(1.0L, squarings);

    MatL result = MatL::Identity(a.rows(), a.cols());
    MatL term = result;
    for (int k = 1; k <= 30; ++k) {
        term = term * scaled / static_cast<long double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-24L)
            break;
    }
    for (int i = 0; i < squarings; ++i)
        result = result * result;
    return result.cast<cplx>();
}

MatrixXcd dense_floquet_matrix(const ModelParams& p)
{
    p.validate();
    const int n = static_cast<int>(p.n_rotor);
    if (n > 256)
        throw ConfigError("dense oracle limited to N <= 256");
    const int dim = 4 * n;
    const double t = 2.0 * kPi / n;
    const cplx I(0.0, 1.0);

    // Spin Hamiltonian from explicit Kronecker products; index 2s + a.
    MatrixXcd sx(2, 2), sz(2, 2), id2 = MatrixXcd::Identity(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    auto kron = [](const MatrixXcd& x, const MatrixXcd& y) {
        MatrixXcd out(x.rows() * y.rows(), x.cols() * y.cols());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j)
                out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        return out;
    };
    const MatrixXcd h_spin = p.omega_x * kron(sx, id2) + p.omega_z * kron(sz, id2) +
                             p.omega_a * kron(id2, sx) + p.epsilon * kron(sz, sz);
    const MatrixXcd u_spin = expm_taylor(-I * t * h_spin);

    // Unitary DFT: (F psi)_k = N^{-1/2} sum_j e^{-2 pi i jk/N} psi_j. Bin k carries momentum
    // k for k < N/2 and k - N otherwise.
    MatrixXcd dft(n, n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            dft(k, j) = std::polar(1.0 / std::sqrt(double(n)), -2.0 * kPi * double((j * k) % n) / n);
    VectorXcd kinetic(n);
    for (int k = 0; k < n; ++k) {
        const double pk = (k < n / 2) ? k : k - n;
        kinetic(k) = std::exp(-I * t * pk * pk / 2.0);
    }
    const MatrixXcd free_rotor = dft.adjoint() * kinetic.asDiagonal() * dft;

    MatrixXcd u_spin_full = MatrixXcd::Zero(dim, dim);
    MatrixXcd free_full = MatrixXcd::Zero(dim, dim);
    VectorXcd kick_diag(dim);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c)
            u_spin_full.block(r * n, c * n, n, n) = u_spin(r, c) * MatrixXcd::Identity(n, n);
        free_full.block(r * n, r * n, n, n) = free_rotor;
        const double sigma_a = (r % 2 == 0) ? 1.0 : -1.0;
        for (int j = 0; j < n; ++j) {
            const double cg = std::cos(2.0 * kPi * j / n);
            kick_diag(r * n + j) = std::exp(-I * p.kick * cg) * std::exp(-I * p.lambda * sigma_a * cg);
        }
    }
    return u_spin_full * free_full * kick_diag.asDiagonal();
}

OracleReport compare_with_stepper(const ModelParams& p, int n_states, int n_steps, std::uint64_t seed)
{
    const auto start = std::chrono::steady_clock::now();
    const MatrixXcd u = dense_floquet_matrix(p);
    const FloquetStepper stepper(p);
    const std::size_t dim = 4 * std::size_t(p.n_rotor);

    OracleReport rep;
    rep.n_rotor = p.n_rotor;
    rep.n_states = n_states;
    rep.n_steps = n_steps;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int s = 0; s < n_states; ++s) {
        std::vector<cplx> amps(dim);
        for (auto& c : amps)
            c = cplx(gauss(rng), gauss(rng));
        double nrm = 0.0;
        for (auto& c : amps)
            nrm += std::norm(c);
        for (auto& c : amps)
            c /= std::sqrt(nrm);

        VectorXcd dense = Eigen::Map<VectorXcd>(amps.data(), Eigen::Index(dim));
        TotalState split(std::move(amps));
        for (int k = 0; k < n_steps; ++k) {
            dense = u * dense;
            stepper.step_in_place(split);
            const auto a = split.amplitudes();
            for (std::size_t i = 0; i < dim; ++i)
                rep.max_amplitude_error = std::max(rep.max_amplitude_error, std::abs(a[i] - dense(Eigen::Index(i))));
        }
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace plab::oracle
