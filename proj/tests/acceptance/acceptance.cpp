// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "plab/dense_oracle.hpp"
#include "plab/experiment.hpp"
#include "plab/textio.hpp"

using namespace plab;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass)
        ++failures;
    std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), sec);
    std::fflush(stdout);
}

std::string g(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig reference_config(std::uint32_t n, std::uint64_t steps, double lambda = 0.1)
{
    ExperimentConfig cfg = parse_config("");
    cfg.model.n_rotor = n;
    cfg.model.lambda = lambda;
    cfg.n_steps = steps;
    cfg.window = Window{steps * 3 / 4, steps};
    cfg.model.with_kick_times_period(cfg.v_times_t);
    cfg.validate();
    return cfg;
}

struct BandCheck {
    bool pass = true;
    std::string detail;
    double worst_point_seconds = 0.0;
};

// Sweep band structure: H_S-like at small coupling, H_I-like at large coupling,
// between the two and close to the maximizer in the middle.
BandCheck band_structure(const ExperimentConfig& cfg, const std::vector<double>& eps, double point_budget)
{
    BandCheck out;
    double worst_small = 0.0, worst_large = 0.0, worst_track = 0.0, best_sep = 0.0;
    bool all_resolved = true;
    for (double e : eps) {
        const RunResult r = run_single(cfg, e);
        out.worst_point_seconds = std::max(out.worst_point_seconds, r.wall_seconds);
        std::printf("    eps=%-10s status=%-5s th(~,HS)=%.4f th(~,HI)=%.4f th(~,max)=%.4f d~=%.4g dHS=%.4g dHI=%.4g  %.1fs\n",
                    g(e).c_str(), r.status.c_str(), r.theta_tilde_hs, r.theta_tilde_hi, r.theta_tilde_max, r.tilde.d,
                    r.hs.d, r.hi.d, r.wall_seconds);
        if (!r.candidate) {
            all_resolved = false;
            continue;
        }
        if (e <= 10.0)
            worst_small = std::max(worst_small, r.theta_tilde_hs);
        if (e >= 5e3)
            worst_large = std::max(worst_large, r.theta_tilde_hi);
        if (e >= 1e2 && e <= 5e3) {
            worst_track = std::max(worst_track, r.theta_tilde_max);
            best_sep = std::max(best_sep, std::min(r.theta_tilde_hs, r.theta_tilde_hi));
        }
    }
    out.pass = all_resolved && worst_small < 0.05 && worst_large < 0.1 && best_sep > 0.1 && worst_track <= 0.15 &&
               out.worst_point_seconds <= point_budget;
    out.detail = "max th(~,HS | eps<=10)=" + g(worst_small) + " (<0.05), max th(~,HI | eps>=5e3)=" + g(worst_large) +
                 " (<0.1), max over mid eps of min(th(~,HS), th(~,HI))=" + g(best_sep) +
                 " (>0.1), max th(~,max | mid)=" + g(worst_track) + " (<=0.15), slowest point " +
                 g(out.worst_point_seconds) + " s (<=" + g(point_budget) + ")";
    if (!all_resolved)
        out.detail += ", some candidate unresolved";
    return out;
}

} // namespace

int main()
{
    std::printf("pointerlab acceptance, version %s\n", code_version().c_str());

    criterion(1, "oracle equivalence (dynamics)", [] {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (std::uint32_t n : {4u, 8u, 16u}) {
            ModelParams p = ModelParams::reference_defaults(2000.0);
            p.n_rotor = n;
            p.with_kick_times_period(90.0);
            worst = std::max(worst, oracle::compare_with_stepper(p, 50, 20, 2024 + n).max_amplitude_error);
        }
        const double sec = seconds_since(t0);
        return Outcome{worst < 1e-11 && sec < 10.0,
                       "N in {4,8,16}, 50 states, 20 periods: max amplitude error " + g(worst) + " (<1e-11)"};
    });

    criterion(2, "unitarity", [] {
        const auto t0 = std::chrono::steady_clock::now();
        ModelParams p = ModelParams::reference_defaults(2000.0);
        p.n_rotor = 512;
        p.with_kick_times_period(90.0);
        const FloquetStepper f(p);
        TotalState psi = TotalState::product(Vec2(std::polar(0.8, 5.0), 0.6), Vec2(1.0, 0.0),
                                             random_rotor_state(512, 12345));
        double drift = 0.0;
        evolve(std::move(psi), f, 10000, [&](std::uint64_t, const TotalState& s) {
            drift = std::max(drift, std::abs(std::sqrt(s.norm_squared()) - 1.0));
        });
        const double sec = seconds_since(t0);
        return Outcome{drift < 1e-10 && sec < 30.0, "N=512, 1e4 periods: max norm drift " + g(drift) + " (<1e-10)"};
    });

    criterion(3, "algebraic identities", [] {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(31415);
        std::uniform_real_distribution<double> ub(0.0, 1.0), uphi(0.0, 2.0 * kPi), le(-1.0, 6.0);
        double wj = 0.0, wy = 0.0, wk = 0.0;
        int singular = 0;
        for (int i = 0; i < 1000; ++i) {
            const BasisPair bp(ub(rng), uphi(rng));
            const ModelParams p = ModelParams::reference_defaults(std::pow(10.0, le(rng)));
            try {
                const auto bh = theory::block_hamiltonians(bp, p);
                const double hab = theory::frobenius(bh.h_ab);
                wj = std::max(wj, theory::frobenius(theory::delta_j(bp, p)) / (hab * hab));
                const auto y = theory::y_operator(bp, p), yd = theory::y_operator_direct(bp, p);
                const auto dh = theory::delta_h(bp, p);
                const auto dk = theory::delta_k_direct(bp, p);
                const double scale_y = std::max(theory::frobenius(yd), theory::frobenius(dh));
                wy = std::max(wy, theory::frobenius(y - yd) / scale_y);
                const double scale_k = std::max(theory::frobenius(dk), theory::frobenius(dh));
                wk = std::max(wk, theory::frobenius(dk + dh - y) / scale_k);
            } catch (const NumericalError&) {
                ++singular;
            }
        }
        const double sec = seconds_since(t0);
        return Outcome{wj < 1e-12 && wy < 1e-9 && wk < 1e-9 && singular == 0 && sec < 5.0,
                       "1000 draws: max rel |dJ|=" + g(wj) + " (<1e-12), |Y-Y_direct|=" + g(wy) +
                           " (<1e-9), |dK+dH-Y|=" + g(wk) + " (<1e-9), singular=" + std::to_string(singular)};
    });

    criterion(4, "maximizer limits", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const auto lo = theory::maximize_delta_h(ModelParams::reference_defaults(0.1));
        const auto hi = theory::maximize_delta_h(ModelParams::reference_defaults(1e6));
        const double th_lo = theory::theta_to_basis(lo.basis.alpha(), theory::hs_eigenbasis(ModelParams::reference_defaults(0.1)));
        const double th_hi = theory::theta_to_basis(hi.basis.alpha(), theory::hi_eigenbasis());
        double r_max = 0.0;
        for (const auto& row : theory::theory_sweep(ModelParams::reference_defaults(0.0), log_grid(0.1, 1e4, 20)))
            r_max = std::max(r_max, std::isnan(row.r_at_max) ? 1.0 : row.r_at_max);
        const double sec = seconds_since(t0);
        return Outcome{th_lo < 1e-3 && th_hi < 1e-3 && r_max < 0.05 && sec < 10.0,
                       "th(max,HS | eps=0.1)=" + g(th_lo) + " (<1e-3), th(max,HI | eps=1e6)=" + g(th_hi) +
                           " (<1e-3), max r at maximizer over [0.1,1e4]=" + g(r_max) + " (<0.05)"};
    });

    // Scaled run on a coarse grid; full scale on the production grid, which resolves
    // the narrow intermediate band between the two reference bases.
    const std::vector<double> sweep_eps = log_grid(0.1, 1e4, 5);
    const std::vector<double> full_eps = log_grid(0.1, 1e4, 20);

    criterion(5, "pointer-basis transition, scaled N=1024, 1e4 periods", [&] {
        const auto b = band_structure(reference_config(1024, 10000), sweep_eps, 60.0);
        return Outcome{b.pass, b.detail};
    });

    criterion(5, "pointer-basis transition, full scale N=4096, 4e4 periods", [&] {
        const auto b = band_structure(reference_config(4096, 40000), full_eps, 600.0);
        return Outcome{b.pass, b.detail};
    });

    const ExperimentConfig full = reference_config(4096, 40000);
    std::optional<RunResult> at2000;
    criterion(6, "off-diagonal decay at eps=2000", [&] {
        at2000 = run_single(full, 2000.0);
        const auto& r = *at2000;
        const bool settle_ok = r.tilde.settle_step && *r.tilde.settle_step >= 300 && *r.tilde.settle_step <= 900;
        const bool plateau_ok = r.tilde.offdiag_plateau < r.hs.offdiag_plateau && r.tilde.offdiag_plateau < r.hi.offdiag_plateau;
        return Outcome{settle_ok && plateau_ok,
                       "settle step " + (r.tilde.settle_step ? std::to_string(*r.tilde.settle_step) : std::string("none")) +
                           " (600 +- 50%), plateau |rho_01|: tilde " + g(r.tilde.offdiag_plateau) + " < HS " +
                           g(r.hs.offdiag_plateau) + ", HI " + g(r.hi.offdiag_plateau)};
    });

    criterion(7, "distance d: intermediate coupling and strong A-B coupling", [&] {
        std::string detail;
        bool ok = true;
        for (double e : {300.0, 1000.0, 2000.0}) {
            const RunResult r = (e == 2000.0 && at2000) ? *at2000 : run_single(full, e);
            const bool pass = r.candidate && r.tilde.d < std::min(r.hs.d, r.hi.d);
            ok = ok && pass;
            detail += "eps=" + g(e) + ": d~=" + g(r.tilde.d) + " vs min(dHS,dHI)=" + g(std::min(r.hs.d, r.hi.d)) + "; ";
        }
        const RunResult s = run_single(reference_config(4096, 40000, 1.0), 2000.0);
        const double d = s.candidate ? s.tilde.d : s.hs.d;
        const bool strong = std::abs(d - 0.25) <= 0.05 && s.status == "no-PS";
        detail += "lambda=1, eps=2000: d=" + g(d) + " (0.25 +- 0.05), status " + s.status;
        return Outcome{ok && strong, detail};
    });

    criterion(8, "typicality", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const auto s = typicality::summarize(typicality::TypicalEnsembleSpec{4096, 10000, 20100101});
        const double sec = seconds_since(t0);
        const bool ok = std::abs(s.ratio.value - 0.5) <= 0.02 && std::abs(s.avg_d.value - 0.25) <= 0.01 && sec < 30.0;
        return Outcome{ok, "n_E=4096, 1e4 samples: ratio " + g(s.ratio.value) + " +- " + g(*s.ratio.standard_error) +
                               " (0.5 +- 0.02), <d> " + g(s.avg_d.value) + " +- " + g(*s.avg_d.standard_error) +
                               " (0.25 +- 0.01)"};
    });

    criterion(9, "closed-form distance", [] {
        std::mt19937_64 rng(271828);
        std::normal_distribution<double> gauss;
        std::uniform_real_distribution<double> u(0.0, 1.0), uphi(0.0, 2.0 * kPi);
        double worst = 0.0;
        for (int i = 0; i < 100000; ++i) {
            Vec2 v(cplx(gauss(rng), gauss(rng)), cplx(gauss(rng), gauss(rng)));
            v /= v.norm();
            const double lam = u(rng);
            const Mat2 m = lam * v * v.adjoint() + (1.0 - lam) * (Mat2::Identity() - v * v.adjoint());
            const Rdm2 rho = Rdm2::from_elements(m(0, 0).real(), m(1, 1).real(), m(0, 1));
            const BasisPair bp(u(rng), uphi(rng));
            const double ov = std::norm(rho.eigenvectors[0].dot(bp.alpha()));
            worst = std::max(worst, std::abs(distance_closed_form(rho, bp) - std::min(ov, 1.0 - ov)));
        }
        return Outcome{worst < 1e-10, "1e5 random RDMs: max |closed form - eigen route| " + g(worst) + " (<1e-10)"};
    });

    std::printf("%s: %d criterion line(s) failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
