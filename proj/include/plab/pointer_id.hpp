#pragma once

// Pointer-state identification from a stroboscopic RDM trajectory.
//
// The tracked branch is one RDM eigenvector followed continuously in time; its
// projector averaged over a window gives rho_bar, whose eigenvectors are the
// candidate pointer basis. Distances compare the branch with any fixed basis.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "plab/error.hpp"
#include "plab/qstate.hpp"

namespace plab {

/// Inclusive window [t_a, t_b] in units of the kick period.
struct Window {
    std::uint64_t t_a = 30000;
    std::uint64_t t_b = 40000;
    bool contains(std::uint64_t step) const { return step >= t_a && step <= t_b; }
};

struct RdmSample {
    std::uint64_t step = 0;
    Rdm2 rho;
};

struct RdmTrajectory {
    std::vector<RdmSample> samples;
    std::vector<Vec2> branch;              // one per sample
    std::vector<int> branch_label;         // eigen-index (0 = larger eigenvalue) chosen per sample
    std::vector<std::uint64_t> crossings;  // steps where the branch changed eigen-label
    std::size_t degenerate_samples = 0;
    std::size_t held_swaps = 0;            // overlap favoured a swap the eigenvalue gap ruled out
};

/// Follows one RDM eigenvector through time. The first non-degenerate sample
/// starts on the larger eigenvalue; afterwards the eigenvector with the larger
/// overlap with the previous branch vector is kept, unless that swap would make the
/// tracked eigenvalue jump by more than kMaxSwapJump. Eigenvalues are continuous in
/// time, so ordering can only change near a degeneracy; a wide-gap swap signals a
/// vector that turned more than 90 degrees between samples. A switch of eigen-label
/// is recorded as a crossing event. Degenerate samples carry the previous vector.
/// Throws NumericalError("no trackable branch") if every sample is degenerate.
inline constexpr double kMaxSwapJump = 0.05;

RdmTrajectory track_branch(std::vector<RdmSample> samples);

struct PointerCandidate {
    Mat2 rho_bar;
    std::array<double, 2> rho_bar_eigenvalues{};
    Vec2 tilde_0;
    Vec2 tilde_1;
    Window window;
    std::size_t n_samples = 0;
};

/// Raised when rho_bar has eigenvalue gap below kCandidateGap.
class CandidateUnresolved : public NumericalError {
public:
    using NumericalError::NumericalError;
};

inline constexpr double kCandidateGap = 1e-6;
inline constexpr std::size_t kMinWindowSamples = 100;

PointerCandidate pointer_candidate(const RdmTrajectory& rt, const Window& w);

/// Per-sample distance between the branch and the basis {eta_0, eta_1}, using the
/// eigenvector pairing with overlap >= 1/2. Value in [0, 1/2].
double paired_distance(const Vec2& branch, const Vec2& eta0);

/// Window mean of paired_distance against basis.alpha(). Throws ConfigError on an empty window.
double avg_distance(const RdmTrajectory& rt, const Vec2& eta0, const Window& w);
double avg_distance(const RdmTrajectory& rt, const BasisPair& basis, const Window& w);

/// D from the RDM elements in the (alpha, beta) representation:
///   |r_ab|^2 / ( (1/4)[dr + sqrt(dr^2 + 4|r_ab|^2)]^2 + |r_ab|^2 ),  dr = |r_aa - r_bb|.
double distance_closed_form(const Rdm2& rho, const Vec2& alpha, const Vec2& beta);
double distance_closed_form(const Rdm2& rho, const BasisPair& basis);

/// theta = arccos |<reference|target>| in [0, pi/2].
double angle_theta(const Vec2& reference, const Vec2& target);

struct OffDiagSample {
    std::uint64_t step;
    double offdiag_abs;   // |rho_ab|
    double diag_diff_abs; // |rho_aa - rho_bb|
};

std::vector<OffDiagSample> offdiag_trace(const std::vector<RdmSample>& samples, const Vec2& alpha,
                                         const Vec2& beta);

/// Step at which the moving average (width `smoothing` samples) of |rho_ab| first falls
/// below plateau + fraction * (initial - plateau). Plateau = mean over the window.
std::optional<std::uint64_t> decay_settle_step(const std::vector<OffDiagSample>& trace, const Window& w,
                                               double fraction = 0.1, std::size_t smoothing = 5);

/// Mean |rho_ab| over the window.
double window_mean_offdiag(const std::vector<OffDiagSample>& trace, const Window& w);

/// CSV: step, rho00, re_rho01, im_rho01, rho11, eig0, eig1, branch_re0, branch_im0, branch_re1, branch_im1
void write_trajectory_csv(std::ostream& os, const RdmTrajectory& rt);

} // namespace plab
