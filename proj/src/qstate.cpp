#include "plab/qstate.hpp"

#include <algorithm>
#include <cmath>

#include "plab/error.hpp"
#include "plab/kernels.hpp"

namespace plab {

TotalState::TotalState(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes))
{
    if (amps_.empty() || amps_.size() % 4 != 0)
        throw ConfigError("TotalState: amplitude count " + std::to_string(amps_.size()) +
                          " is not a positive multiple of 4");
    n_rotor_ = amps_.size() / 4;
}

TotalState TotalState::product(const Vec2& system, const Vec2& a_qubit, std::span<const cplx> rotor)
{
    const std::size_t n = rotor.size();
    std::vector<cplx> amps(4 * n);
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) {
            const cplx w = system(s) * a_qubit(a);
            cplx* blk = amps.data() + static_cast<std::size_t>(2 * s + a) * n;
            for (std::size_t j = 0; j < n; ++j)
                blk[j] = w * rotor[j];
        }
    return TotalState(std::move(amps));
}

double TotalState::norm_squared() const { return kernels::omp::norm_squared(amps_); }

// ---------------------------------------------------------------------------

Vec2 fix_phase(const Vec2& v)
{
    const double m0 = std::abs(v(0));
    const double m1 = std::abs(v(1));
    const int k = (m0 >= m1 * (1.0 - 1e-12)) ? 0 : 1;
    const double mk = std::abs(v(k));
    if (mk == 0.0)
        return v;
    return v * (std::conj(v(k)) / mk);
}

EigenPair2 eig_2x2_hermitian(const Mat2& m)
{
    const double herm_err = (m - m.adjoint()).norm();
    if (herm_err > 1e-10)
        throw NumericalError("eig_2x2_hermitian: matrix is not Hermitian");

    const double p = m(0, 0).real();
    const double q = m(1, 1).real();
    const cplx c = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
    const double mean = 0.5 * (p + q);
    const double half_diff = 0.5 * (p - q);
    const double r = std::hypot(half_diff, std::abs(c));

    EigenPair2 out;
    out.values = {mean + r, mean - r};
    if (2.0 * r < kDegeneracyGap) {
        out.vectors = {Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
        out.degenerate = true;
        return out;
    }
    // Pick the better-conditioned row of (m - lambda0) to build the top eigenvector.
    Vec2 v0;
    if (p >= q)
        v0 = Vec2(half_diff + r, std::conj(c));
    else
        v0 = Vec2(c, r - half_diff);
    v0.normalize();
    Vec2 v1(-std::conj(v0(1)), std::conj(v0(0)));
    out.vectors = {fix_phase(v0), fix_phase(v1)};
    return out;
}

// ---------------------------------------------------------------------------

Rdm2 Rdm2::from_elements(double m00, double m11, cplx m01)
{
    Rdm2 r;
    r.m00 = m00;
    r.m11 = m11;
    r.m01 = m01;
    const auto eig = eig_2x2_hermitian(r.matrix());
    r.eigenvalues = eig.values;
    r.eigenvectors = eig.vectors;
    r.degenerate = eig.degenerate;
    return r;
}

Mat2 Rdm2::matrix() const
{
    Mat2 m;
    m << m00, m01, std::conj(m01), m11;
    return m;
}

cplx Rdm2::element(const Vec2& u, const Vec2& w) const { return u.dot(matrix() * w); }

double Rdm2::purity() const { return m00 * m00 + m11 * m11 + 2.0 * std::norm(m01); }

// ---------------------------------------------------------------------------

Vec2 BasisPair::x_up() { return Vec2(1.0, 1.0) / std::sqrt(2.0); }

Vec2 BasisPair::x_down() { return Vec2(cplx(0.0, -1.0), cplx(0.0, 1.0)) / std::sqrt(2.0); }

BasisPair::BasisPair(double b, double phi)
{
    if (!(b >= -1e-12 && b <= 1.0 + 1e-12) || !std::isfinite(phi))
        throw ConfigError("BasisPair: b must lie in [0, 1] and phi must be finite");
    b_ = std::clamp(b, 0.0, 1.0);
    a_ = std::sqrt(std::max(0.0, 1.0 - b_ * b_));
    phi_ = std::fmod(phi, 2.0 * kPi);
    if (phi_ < 0.0)
        phi_ += 2.0 * kPi;
    const cplx e = std::polar(1.0, phi_);
    alpha_ = a_ * e * x_up() + b_ * x_down();
    beta_ = b_ * e * x_up() - a_ * x_down();
}

BasisPair BasisPair::canonical() const
{
    if (b_ <= 1.0 / std::sqrt(2.0))
        return *this;
    return BasisPair(a_, phi_ + kPi);
}

BasisPair BasisPair::from_alpha(const Vec2& alpha)
{
    const cplx c_up = x_up().dot(alpha);
    const cplx c_down = x_down().dot(alpha);
    const double nrm = std::sqrt(std::norm(c_up) + std::norm(c_down));
    const double b = std::abs(c_down) / nrm;
    double phi = 0.0;
    if (std::abs(c_up) > 0.0)
        phi = std::arg(c_up) - (std::abs(c_down) > 0.0 ? std::arg(c_down) : 0.0);
    return BasisPair(std::min(b, 1.0), phi);
}

// ---------------------------------------------------------------------------

Rdm2 partial_trace_env(const TotalState& state)
{
    const auto t = kernels::omp::trace_out_environment(state.amplitudes());
    return Rdm2::from_elements(t.m00, t.m11, t.m01);
}

double basis_distance(const Vec2& v, const Vec2& w)
{
    if (std::abs(v.norm() - 1.0) > 1e-8 || std::abs(w.norm() - 1.0) > 1e-8)
        throw ConfigError("basis_distance: inputs must be unit vectors");
    const double ov = std::norm(v.dot(w));
    return std::clamp(1.0 - ov, 0.0, 1.0);
}

EnvironmentHistories environment_histories(const TotalState& state, const BasisPair& basis)
{
    const std::size_t half = state.size() / 2;
    const auto amps = state.amplitudes();
    const cplx al0 = std::conj(basis.alpha()(0)), al1 = std::conj(basis.alpha()(1));
    const cplx be0 = std::conj(basis.beta()(0)), be1 = std::conj(basis.beta()(1));
    EnvironmentHistories h{std::vector<cplx>(half), std::vector<cplx>(half)};
    for (std::size_t i = 0; i < half; ++i) {
        const cplx up = amps[i];
        const cplx dn = amps[half + i];
        h.phi_alpha[i] = al0 * up + al1 * dn;
        h.phi_beta[i] = be0 * up + be1 * dn;
    }
    return h;
}

cplx inner(std::span<const cplx> u, std::span<const cplx> v)
{
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i)
        s += std::conj(u[i]) * v[i];
    return s;
}

} // namespace plab
