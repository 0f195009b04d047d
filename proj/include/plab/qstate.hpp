#pragma once

// State space of the composite S (x) A (x) B system.
//
// Amplitudes are stored with layout (s, a, j), rotor index j fastest:
//   index(s, a, j) = (2*s + a) * N + j
// s and a are sigma_z eigen-indices (0 = up, 1 = down). This layout is part of
// the checkpoint format.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace plab {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

inline constexpr double kPi = 3.14159265358979323846;

class TotalState {
public:
    TotalState() = default;
    /// Takes ownership of the amplitudes; size must be a positive multiple of 4.
    explicit TotalState(std::vector<cplx> amplitudes);

    /// |psi_S> (x) |chi_A> (x) |phi_B>, all given in the sigma_z / position basis.
    static TotalState product(const Vec2& system, const Vec2& a_qubit, std::span<const cplx> rotor);

    std::size_t n_rotor() const { return n_rotor_; }
    std::size_t size() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes_mut() { return amps_; }

    const cplx& at(int s, int a, std::size_t j) const { return amps_[index(s, a, j)]; }
    std::size_t index(int s, int a, std::size_t j) const
    {
        return static_cast<std::size_t>(2 * s + a) * n_rotor_ + j;
    }

    double norm_squared() const;

private:
    std::vector<cplx> amps_;
    std::size_t n_rotor_ = 0;
};

/// 2x2 Hermitian reduced density matrix with cached eigen-decomposition.
struct Rdm2 {
    double m00 = 1.0;
    double m11 = 0.0;
    cplx m01{0.0, 0.0};

    std::array<double, 2> eigenvalues{1.0, 0.0}; // descending
    std::array<Vec2, 2> eigenvectors{Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
    bool degenerate = false;

    static Rdm2 from_elements(double m00, double m11, cplx m01);
    Mat2 matrix() const;
    /// Matrix elements <u|rho|w>.
    cplx element(const Vec2& u, const Vec2& w) const;
    double purity() const;
};

struct EigenPair2 {
    std::array<double, 2> values; // descending
    std::array<Vec2, 2> vectors;  // columns, phase-fixed
    bool degenerate = false;
};

inline constexpr double kDegeneracyGap = 1e-13;

/// Closed-form eigenpairs of a 2x2 Hermitian matrix. Eigenvectors carry the
/// convention that their largest-magnitude component is real and positive.
/// A spectral gap below kDegeneracyGap is flagged rather than rejected.
EigenPair2 eig_2x2_hermitian(const Mat2& m);

/// Rotates the global phase so the largest-magnitude component is real positive.
Vec2 fix_phase(const Vec2& v);

/// Orthonormal system basis on the Bloch sphere.
///
///   |alpha> = a e^{i phi} |1>_x + b |0>_x
///   |beta>  = b e^{i phi} |1>_x - a |0>_x,   a = sqrt(1 - b^2)
///
/// with x-basis vectors |1>_x = (1, 1)/sqrt2 and |0>_x = -i (1, -1)/sqrt2 in the
/// sigma_z basis. The -i phase on |0>_x makes <alpha|sigma_z|beta> equal to
/// (1 - 2b^2) sin(phi) + i cos(phi), the form the closed-form theory uses.
class BasisPair {
public:
    BasisPair(double b, double phi);

    double b() const { return b_; }
    double a() const { return a_; }
    double phi() const { return phi_; }
    const Vec2& alpha() const { return alpha_; }
    const Vec2& beta() const { return beta_; }

    /// Equivalent representative with b <= 1/sqrt2 (swaps alpha <-> beta when needed).
    BasisPair canonical() const;

    /// Nearest (b, phi) description of an arbitrary unit vector taken as |alpha>.
    static BasisPair from_alpha(const Vec2& alpha);

    static Vec2 x_up();   // |1>_x
    static Vec2 x_down(); // |0>_x

private:
    double b_;
    double a_;
    double phi_;
    Vec2 alpha_;
    Vec2 beta_;
};

/// rho_S = Tr_{A,B} |Psi><Psi|.
Rdm2 partial_trace_env(const TotalState& state);

/// D(v, w) = 1 - |<v|w>|^2. Throws ConfigError when an input is not unit norm (1e-8).
double basis_distance(const Vec2& v, const Vec2& w);

struct EnvironmentHistories {
    std::vector<cplx> phi_alpha; // length 2N, layout (a, j)
    std::vector<cplx> phi_beta;
};

/// |Psi> = |alpha>|phi_alpha> + |beta>|phi_beta>, with phi_alpha = <alpha|Psi> unnormalized.
EnvironmentHistories environment_histories(const TotalState& state, const BasisPair& basis);

/// <u|v> over an environment vector.
cplx inner(std::span<const cplx> u, std::span<const cplx> v);

} // namespace plab
