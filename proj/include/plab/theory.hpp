#pragma once

// Operator algebra of the environment-history equations for a fixed system
// basis (|alpha>, |beta>). Every operator lives on the A-qubit space; the rotor
// part of H_E drops out because the interaction blocks are proportional to
// sigma_z^A, which commutes with the kick terms, so H_E reduces to wA sigma_x^A.

#include <array>
#include <iosfwd>
#include <vector>

#include "plab/floquet.hpp"
#include "plab/qstate.hpp"

namespace plab::theory {

/// 2x2 operator on the A qubit.
using AOperator = Mat2;

/// sqrt(sum |m_ij|^2)
double frobenius(const AOperator& m);

/// max(wx, wz, wA, |eps|); divides norms into scale-free numbers.
double energy_scale(const ModelParams& p);

struct BlockHamiltonians {
    double hs_aa = 0.0;
    double hs_bb = 0.0;
    cplx hs_ab{0.0, 0.0};
    AOperator hi_aa;
    AOperator hi_bb;
    AOperator hi_ab;
    AOperator hi_ba;
    AOperator h_ab; // hs_ab I + hi_ab
    AOperator h_ba;
    /// A-space part of H_aa: hs_aa I + hi_aa + wA sigma_x.
    AOperator h_aa_a;
    AOperator h_bb_a;
};

BlockHamiltonians block_hamiltonians(const BasisPair& basis, const ModelParams& p);
BlockHamiltonians block_hamiltonians(const Vec2& alpha, const Vec2& beta, const ModelParams& p);

/// (hs_aa - hs_bb) I + (hi_aa - hi_bb)
AOperator delta_h(const BasisPair& basis, const ModelParams& p);
AOperator delta_h(const Vec2& alpha, const Vec2& beta, const ModelParams& p);
/// H_ab H_ba - H_ba H_ab
AOperator delta_j(const BasisPair& basis, const ModelParams& p);

/// Closed-form pieces of Y in the (b, phi) parameterization.
struct ClosedFormTerms {
    cplx c1, d1, eta, eta_bar;
    AOperator L, L_bar;
};
ClosedFormTerms closed_form_terms(const BasisPair& basis, const ModelParams& p);

/// Y = 2i eps wA (eta L - conj-eta Lbar). Throws NumericalError("singular block")
/// when |det H_ab| < 1e-10 ||H_ab||^2.
AOperator y_operator(const BasisPair& basis, const ModelParams& p);
/// Y = X_a H_ab^-1 - X_b H_ba^-1 with X_a = [H_ab, H_bb], X_b = [H_ba, H_aa].
AOperator y_operator_direct(const BasisPair& basis, const ModelParams& p);

/// -Delta H + Y
AOperator delta_k(const BasisPair& basis, const ModelParams& p);
/// K_a - K_b with K_a = H_ab H_bb H_ab^-1.
AOperator delta_k_direct(const BasisPair& basis, const ModelParams& p);

/// ||Y|| / ||Delta H||. Throws NumericalError when ||Delta H|| = 0.
double ratio_r(const BasisPair& basis, const ModelParams& p);

/// Adjugate inverse; throws NumericalError when |det| < tol_rel * ||m||^2.
AOperator inverse_2x2(const AOperator& m, double tol_rel = 1e-10);

struct MaximizeOptions {
    int grid_b = 256;
    int grid_phi = 256;
    double grad_tol_rel = 1e-8;
    int max_iterations = 200;
    bool drop_scalar_term = false;
};

struct MaximizerResult {
    BasisPair basis{0.0, 0.0}; // canonical representative, b <= 1/sqrt2
    double norm_dh = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
};

/// argmax over (b, phi) of ||Delta H||: full grid scan, lexicographic tie-break,
/// then Newton refinement on the grid winner.
MaximizerResult maximize_delta_h(const ModelParams& p, const MaximizeOptions& opt = {});

/// Same search with the c-number part hs_aa - hs_bb removed from Delta H.
MaximizerResult without_scalar_term(const ModelParams& p, MaximizeOptions opt = {});

/// Eigenvectors of wx sx + wz sz (descending energy), and of sigma_z (the H_I basis).
std::array<Vec2, 2> hs_eigenbasis(const ModelParams& p);
std::array<Vec2, 2> hi_eigenbasis();
/// sigma_z eigenbasis as a BasisPair: alpha = |up>, beta = |down> up to phases.
BasisPair sigma_z_basis();

/// Smallest angle_theta from target to either basis vector.
double theta_to_basis(const Vec2& target, const std::array<Vec2, 2>& basis);

struct TheoryRow {
    double epsilon;
    MaximizerResult max;
    double theta_vs_hs;
    double theta_vs_hi;
    double r_at_max; // NaN when the block is singular
    double norm_dk;  // ||Delta K|| at the maximizer, NaN when singular
};

std::vector<TheoryRow> theory_sweep(const ModelParams& base, const std::vector<double>& epsilons,
                                    const MaximizeOptions& opt = {});

/// CSV: epsilon, b_star, phi_star, norm_dh, theta_vs_HS, theta_vs_HI, r_at_max, norm_dk
void write_theory_csv(std::ostream& os, const std::vector<TheoryRow>& rows);

} // namespace plab::theory
