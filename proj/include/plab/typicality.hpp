#pragma once

// Hilbert-space averages over "typical" total states
//   |Psi> = Norm * sum_alpha |alpha> sum_j C_{alpha j} |j>,
// Re C and Im C i.i.d. N(0, 1/2), normalized explicitly to unit norm.

#include <cstdint>
#include <optional>
#include <string>

#include "plab/qstate.hpp"

namespace plab::typicality {

struct TypicalEnsembleSpec {
    std::uint64_t n_env = 4096;
    std::uint64_t n_samples = 10000;
    std::uint64_t seed = 20100101;
    void validate() const;
};

/// RDM of draw `draw` in the fixed (alpha, beta) basis; draws are independent
/// streams keyed by (seed, draw), so any subset can be regenerated in any order.
Rdm2 sample_typical_rdm(const TypicalEnsembleSpec& spec, std::uint64_t draw);

struct Estimate {
    double value = 0.0;
    std::optional<double> standard_error; // empty with fewer than 2 draws
};

struct TypicalitySummary {
    TypicalEnsembleSpec spec;
    Estimate ratio; // <|rho_ab|^2> / <drho^2>
    Estimate avg_d; // <D>, D from the closed form
    double max_d = 0.0;
    double min_d = 0.0;
};

/// Runs every draw (OpenMP over draws, serial aggregation in draw order).
TypicalitySummary summarize(const TypicalEnsembleSpec& spec);

/// Both require n_samples >= 100.
Estimate estimate_ratio(const TypicalEnsembleSpec& spec);
Estimate estimate_avg_d(const TypicalEnsembleSpec& spec);

/// {n_env, n_samples, ratio, ratio_se, avg_d, avg_d_se, seed}
std::string report_json(const TypicalitySummary& s);

} // namespace plab::typicality
