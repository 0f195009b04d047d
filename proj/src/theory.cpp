#include "plab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "plab/error.hpp"
#include "plab/pointer_id.hpp"
#include "plab/textio.hpp"

namespace plab::theory {

namespace {

const cplx kI(0.0, 1.0);

Mat2 hs_matrix(const ModelParams& p) { return p.omega_x * pauli_x() + p.omega_z * pauli_z(); }

} // namespace

double frobenius(const AOperator& m) { return m.norm(); }

double energy_scale(const ModelParams& p)
{
    return std::max({std::abs(p.omega_x), std::abs(p.omega_z), std::abs(p.omega_a), std::abs(p.epsilon)});
}

BlockHamiltonians block_hamiltonians(const Vec2& alpha, const Vec2& beta, const ModelParams& p)
{
    const Mat2 hs = hs_matrix(p);
    const Mat2 sz = pauli_z();
    const Mat2 id = Mat2::Identity();

    BlockHamiltonians h;
    h.hs_aa = alpha.dot(hs * alpha).real();
    h.hs_bb = beta.dot(hs * beta).real();
    h.hs_ab = alpha.dot(hs * beta);
    const cplx hs_ba = beta.dot(hs * alpha);
    h.hi_aa = p.epsilon * alpha.dot(sz * alpha).real() * sz;
    h.hi_bb = p.epsilon * beta.dot(sz * beta).real() * sz;
    h.hi_ab = p.epsilon * alpha.dot(sz * beta) * sz;
    h.hi_ba = p.epsilon * beta.dot(sz * alpha) * sz;
    h.h_ab = h.hs_ab * id + h.hi_ab;
    h.h_ba = hs_ba * id + h.hi_ba;
    h.h_aa_a = h.hs_aa * id + h.hi_aa + p.omega_a * pauli_x();
    h.h_bb_a = h.hs_bb * id + h.hi_bb + p.omega_a * pauli_x();
    return h;
}

BlockHamiltonians block_hamiltonians(const BasisPair& basis, const ModelParams& p)
{
    return block_hamiltonians(basis.alpha(), basis.beta(), p);
}

AOperator delta_h(const Vec2& alpha, const Vec2& beta, const ModelParams& p)
{
    const auto h = block_hamiltonians(alpha, beta, p);
    return (h.hs_aa - h.hs_bb) * Mat2::Identity() + (h.hi_aa - h.hi_bb);
}

AOperator delta_h(const BasisPair& basis, const ModelParams& p)
{
    return delta_h(basis.alpha(), basis.beta(), p);
}

AOperator delta_j(const BasisPair& basis, const ModelParams& p)
{
    const auto h = block_hamiltonians(basis, p);
    return h.h_ab * h.h_ba - h.h_ba * h.h_ab;
}

AOperator inverse_2x2(const AOperator& m, double tol_rel)
{
    const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double scale2 = m.squaredNorm();
    if (!(std::abs(det) >= tol_rel * scale2) || !(scale2 > 0.0))
        throw NumericalError("singular block: |det H_ab| = " + fmt17(std::abs(det)));
    AOperator adj;
    adj << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return adj / det;
}

ClosedFormTerms closed_form_terms(const BasisPair& basis, const ModelParams& p)
{
    const double b = basis.b();
    const double phi = basis.phi();
    const double eps = p.epsilon;
    ClosedFormTerms t;
    t.c1 = (1.0 - 2.0 * b * b) * std::sin(phi) + kI * std::cos(phi);
    t.d1 = 2.0 * p.omega_x * std::sqrt(1.0 - b * b) * b + p.omega_z * t.c1;
    const cplx c2 = std::conj(t.c1);
    const cplx d2 = std::conj(t.d1);
    t.eta = t.c1 / (t.d1 * t.d1 - eps * eps * t.c1 * t.c1);
    t.eta_bar = c2 / (d2 * d2 - eps * eps * c2 * c2);
    t.L = -kI * eps * t.c1 * pauli_x() + t.d1 * pauli_y();
    t.L_bar = -kI * eps * c2 * pauli_x() + d2 * pauli_y();
    return t;
}

AOperator y_operator(const BasisPair& basis, const ModelParams& p)
{
    // H_ab = d1 I + eps c1 sz, so det H_ab = d1^2 - eps^2 c1^2; the closed form
    // divides by exactly that.
    const auto h = block_hamiltonians(basis, p);
    const cplx det = h.h_ab(0, 0) * h.h_ab(1, 1) - h.h_ab(0, 1) * h.h_ab(1, 0);
    // A block that vanishes relative to the energy scale is singular too.
    const double s = energy_scale(p);
    if (!(std::abs(det) >= 1e-10 * std::max(h.h_ab.squaredNorm(), s * s)))
        throw NumericalError("singular block: |det H_ab| = " + fmt17(std::abs(det)));
    const auto t = closed_form_terms(basis, p);
    return 2.0 * kI * p.epsilon * p.omega_a * (t.eta * t.L - t.eta_bar * t.L_bar);
}

AOperator y_operator_direct(const BasisPair& basis, const ModelParams& p)
{
    const auto h = block_hamiltonians(basis, p);
    const AOperator x_a = h.h_ab * h.h_bb_a - h.h_bb_a * h.h_ab;
    const AOperator x_b = h.h_ba * h.h_aa_a - h.h_aa_a * h.h_ba;
    return x_a * inverse_2x2(h.h_ab) - x_b * inverse_2x2(h.h_ba);
}

AOperator delta_k(const BasisPair& basis, const ModelParams& p)
{
    return -delta_h(basis, p) + y_operator(basis, p);
}

AOperator delta_k_direct(const BasisPair& basis, const ModelParams& p)
{
    const auto h = block_hamiltonians(basis, p);
    const AOperator k_a = h.h_ab * h.h_bb_a * inverse_2x2(h.h_ab);
    const AOperator k_b = h.h_ba * h.h_aa_a * inverse_2x2(h.h_ba);
    return k_a - k_b;
}

double ratio_r(const BasisPair& basis, const ModelParams& p)
{
    const double ndh = frobenius(delta_h(basis, p));
    if (!(ndh > 1e-12 * energy_scale(p)))
        throw NumericalError("ratio_r undefined: ||Delta H|| = 0");
    return frobenius(y_operator(basis, p)) / ndh;
}

// ---------------------------------------------------------------------------
// ||Delta H|| maximization over the Bloch sphere.

namespace {

// ||Delta H||^2 = 2 (dHs)^2 + 2 eps^2 (dz)^2, evaluated from the basis vectors.
struct DeltaHObjective {
    Mat2 hs;
    Mat2 sz;
    double eps;
    bool drop_scalar;

    double operator()(double b, double phi) const
    {
        const BasisPair bp(std::clamp(b, 0.0, 1.0), phi);
        const auto& a = bp.alpha();
        const auto& c = bp.beta();
        const double dhs = drop_scalar ? 0.0 : (a.dot(hs * a) - c.dot(hs * c)).real();
        const double dz = (a.dot(sz * a) - c.dot(sz * c)).real();
        return std::sqrt(2.0 * dhs * dhs + 2.0 * eps * eps * dz * dz);
    }
};

struct Gradient {
    double db, dphi;
    double norm() const { return std::hypot(db, dphi); }
};

Gradient gradient(const DeltaHObjective& f, double b, double phi, double h)
{
    // One-sided near the b boundaries.
    double db;
    if (b - h < 0.0)
        db = (f(b + h, phi) - f(b, phi)) / h;
    else if (b + h > 1.0)
        db = (f(b, phi) - f(b - h, phi)) / h;
    else
        db = (f(b + h, phi) - f(b - h, phi)) / (2.0 * h);
    const double dphi = (f(b, phi + h) - f(b, phi - h)) / (2.0 * h);
    return {db, dphi};
}

} // namespace

MaximizerResult maximize_delta_h(const ModelParams& p, const MaximizeOptions& opt)
{
    if (opt.grid_b < 2 || opt.grid_phi < 1)
        throw ConfigError("maximize_delta_h: grid too small");
    const DeltaHObjective f{hs_matrix(p), pauli_z(), p.epsilon, opt.drop_scalar_term};
    const double scale = std::max(energy_scale(p), 1e-300);

    const int nb = opt.grid_b;
    const int nphi = opt.grid_phi;
    std::vector<double> values(static_cast<std::size_t>(nb) * nphi);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nb; ++i) {
        const double b = static_cast<double>(i) / (nb - 1);
        for (int k = 0; k < nphi; ++k)
            values[static_cast<std::size_t>(i) * nphi + k] = f(b, 2.0 * kPi * k / nphi);
    }
    // Serial scan in (b, phi) lexicographic order; strict '>' keeps the smallest on ties.
    std::size_t best = 0;
    for (std::size_t idx = 1; idx < values.size(); ++idx)
        if (values[idx] > values[best])
            best = idx;
    double b = static_cast<double>(best / nphi) / (nb - 1);
    double phi = 2.0 * kPi * static_cast<double>(best % nphi) / nphi;
    double fx = values[best];

    // Newton refinement with finite-difference derivatives and backtracking.
    const double hg = 1e-6;
    const double hh = 1e-4;
    const double tol = opt.grad_tol_rel * scale;
    MaximizerResult res;
    Gradient g = gradient(f, b, phi, hg);
    int it = 0;
    for (; it < opt.max_iterations && g.norm() >= tol; ++it) {
        const double bc = std::clamp(b, hh, 1.0 - hh);
        const double f0 = f(bc, phi);
        const double hbb = (f(bc + hh, phi) - 2.0 * f0 + f(bc - hh, phi)) / (hh * hh);
        const double hpp = (f(bc, phi + hh) - 2.0 * f0 + f(bc, phi - hh)) / (hh * hh);
        const double hbp = (f(bc + hh, phi + hh) - f(bc + hh, phi - hh) - f(bc - hh, phi + hh) +
                            f(bc - hh, phi - hh)) /
                           (4.0 * hh * hh);
        const double det = hbb * hpp - hbp * hbp;
        double sb, sp;
        if (hbb < 0.0 && det > 0.0) {
            sb = -(hpp * g.db - hbp * g.dphi) / det;
            sp = -(-hbp * g.db + hbb * g.dphi) / det;
        } else {
            // Not locally concave: steepest ascent, 0.05 rad trial length.
            sb = 0.05 * g.db / g.norm();
            sp = 0.05 * g.dphi / g.norm();
        }
        double t = 1.0;
        bool moved = false;
        for (int halve = 0; halve < 40; ++halve, t *= 0.5) {
            const double nb_try = std::clamp(b + t * sb, 0.0, 1.0);
            const double np_try = phi + t * sp;
            const double fn = f(nb_try, np_try);
            if (fn >= fx) {
                b = nb_try;
                phi = np_try;
                fx = fn;
                moved = true;
                break;
            }
        }
        g = gradient(f, b, phi, hg);
        if (!moved)
            break;
    }
    res.iterations = it;
    res.grad_norm = g.norm();
    res.norm_dh = fx;
    res.basis = BasisPair(std::clamp(b, 0.0, 1.0), phi).canonical();
    return res;
}

MaximizerResult without_scalar_term(const ModelParams& p, MaximizeOptions opt)
{
    opt.drop_scalar_term = true;
    return maximize_delta_h(p, opt);
}

std::array<Vec2, 2> hs_eigenbasis(const ModelParams& p)
{
    const auto eig = eig_2x2_hermitian(hs_matrix(p));
    return eig.vectors;
}

std::array<Vec2, 2> hi_eigenbasis() { return {Vec2(1.0, 0.0), Vec2(0.0, 1.0)}; }

BasisPair sigma_z_basis() { return BasisPair(1.0 / std::sqrt(2.0), 1.5 * kPi); }

double theta_to_basis(const Vec2& target, const std::array<Vec2, 2>& basis)
{
    return std::min(angle_theta(basis[0], target), angle_theta(basis[1], target));
}

std::vector<TheoryRow> theory_sweep(const ModelParams& base, const std::vector<double>& epsilons,
                                    const MaximizeOptions& opt)
{
    std::vector<TheoryRow> rows;
    rows.reserve(epsilons.size());
    const auto hs = hs_eigenbasis(base);
    const auto hi = hi_eigenbasis();
    for (double eps : epsilons) {
        ModelParams p = base;
        p.epsilon = eps;
        TheoryRow row{eps, maximize_delta_h(p, opt), 0.0, 0.0, 0.0, 0.0};
        row.theta_vs_hs = theta_to_basis(row.max.basis.alpha(), hs);
        row.theta_vs_hi = theta_to_basis(row.max.basis.alpha(), hi);
        try {
            row.r_at_max = ratio_r(row.max.basis, p);
            row.norm_dk = frobenius(delta_k(row.max.basis, p));
        } catch (const NumericalError&) {
            row.r_at_max = std::numeric_limits<double>::quiet_NaN();
            row.norm_dk = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

void write_theory_csv(std::ostream& os, const std::vector<TheoryRow>& rows)
{
    os << "epsilon,b_star,phi_star,norm_dh,theta_vs_HS,theta_vs_HI,r_at_max,norm_dk\n";
    for (const auto& r : rows)
        os << fmt17(r.epsilon) << ',' << fmt17(r.max.basis.b()) << ',' << fmt17(r.max.basis.phi()) << ','
           << fmt17(r.max.norm_dh) << ',' << fmt17(r.theta_vs_hs) << ',' << fmt17(r.theta_vs_hi) << ','
           << fmt17(r.r_at_max) << ',' << fmt17(r.norm_dk) << '\n';
}

} // namespace plab::theory
