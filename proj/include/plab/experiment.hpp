#pragma once

// End-to-end experiment drivers behind the command-line tool: configuration,
// single runs, epsilon sweeps, typicality reports, run manifests.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plab/floquet.hpp"
#include "plab/pointer_id.hpp"
#include "plab/theory.hpp"
#include "plab/typicality.hpp"

namespace plab {

struct ExperimentConfig {
    ModelParams model = ModelParams::reference_defaults(0.0); // epsilon taken from the sweep
    double v_times_t = 90.0;
    std::vector<double> epsilons;
    cplx amp0{0.8 * std::cos(5.0), 0.8 * std::sin(5.0)}; // on |x+>
    cplx amp1{0.6, 0.0};                                 // on |x->
    int a_state = 0;                                     // 0: H_A ground (sigma_x = -1), 1: excited
    std::uint64_t rotor_seed = 12345;
    std::uint64_t n_steps = 40000;
    Window window{30000, 40000};
    std::uint64_t stride = 0; // 0 = automatic (1 for N <= 1024, else 10)
    double momentum_offset = 0.0;
    std::filesystem::path out_dir;
    unsigned workers = 1;

    std::uint64_t effective_stride() const;
    Vec2 initial_system() const;
    Vec2 initial_a_qubit() const;
    ModelParams params_for(double epsilon) const;
    /// Throws ConfigError on violated invariants.
    void validate() const;
    /// Canonical key = value text (sorted keys, 17-digit reals); hashing input of the manifest.
    std::string canonical_text() const;
};

/// 20 points per decade, both ends included.
std::vector<double> log_grid(double lo, double hi, int per_decade = 20);

/// Flat "key = value" text, '#' comments. Keys: omega_x, omega_z, omega_a, epsilon_list,
/// lambda, v_times_t, n_rotor, n_steps, t_a, t_b, stride, amp0_re, amp0_im, amp1_re,
/// amp1_im, a_state, rotor_seed, out_dir, and optionally momentum_offset.
/// epsilon_list is comma separated, or "log:LO:HI:PER_DECADE".
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

inline constexpr double kNoPsDistance = 0.1;
inline constexpr double kPurityPureTol = 1e-6;
inline constexpr double kNormDriftLimit = 1e-8;

struct BasisReport {
    double d = 0.0;                // window-averaged distance
    double offdiag_plateau = 0.0;  // window mean |rho_ab|
    std::optional<std::uint64_t> settle_step;
};

struct RunResult {
    double epsilon = 0.0;
    double lambda = 0.0;
    std::string status;        // "PS", "no-PS"
    std::string status_reason;
    std::optional<PointerCandidate> candidate;
    double rho_bar_gap = 0.0;
    double mean_purity = 1.0;
    std::size_t crossings = 0;

    BasisReport tilde, hs, hi;
    // Angles from H_S / H_I eigenvectors to |rho~_1>; the same for |rho~_0> on a qubit.
    double theta_tilde_hs = 0.0, theta_tilde_hi = 0.0;
    double theta_max_hs = 0.0, theta_max_hi = 0.0, theta_tilde_max = 0.0;
    theory::MaximizerResult maximizer;
    double max_norm_drift = 0.0;

    RdmTrajectory trajectory;
    std::vector<OffDiagSample> offdiag_tilde, offdiag_hs, offdiag_hi;

    std::string manifest_hash;
    double wall_seconds = 0.0;
};

/// Evolves one epsilon point and runs the whole analysis. Writes outputs under
/// out_dir/eps_<epsilon>/ when out_dir is set. Throws NumericalError if the norm
/// drifts beyond kNormDriftLimit.
RunResult run_single(const ExperimentConfig& cfg, double epsilon);

struct SweepPoint {
    double epsilon;
    std::optional<RunResult> result;
    std::string error;
};

struct SweepResult {
    std::vector<SweepPoint> points; // ascending epsilon
    std::vector<theory::TheoryRow> theory;
    std::string manifest_hash;
};

/// Runs every epsilon of cfg (cfg.workers concurrent points); failures are
/// recorded per point. Writes sweep.csv when out_dir is set.
SweepResult run_sweep(const ExperimentConfig& cfg);

void write_sweep_csv(std::ostream& os, const SweepResult& s);

typicality::TypicalitySummary run_typicality(const typicality::TypicalEnsembleSpec& spec,
                                             const std::filesystem::path& out_dir);

std::string code_version();
std::string manifest_hash_for(const std::string& canonical_text);

} // namespace plab
