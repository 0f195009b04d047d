// plab: pointer-state experiments on the qubit + kicked-rotor environment model.
//
//   plab run        --config cfg.txt [--epsilon X]
//   plab sweep      --config cfg.txt [--workers K]
//   plab typicality [--n-env 4096] [--samples 10000] [--seed S]
//   plab theory     --config cfg.txt
//   plab oracle     [--n-rotor N] [--epsilon X]
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical-invariant violation.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "plab/dense_oracle.hpp"
#include "plab/experiment.hpp"
#include "plab/textio.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
    std::string config_path;
    std::optional<double> epsilon;
    std::optional<std::uint32_t> n_rotor;
    unsigned workers = 1;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

plab::ExperimentConfig load(const CommonFlags& f)
{
    plab::ExperimentConfig cfg = f.config_path.empty() ? plab::parse_config("") : plab::load_config(f.config_path);
    if (f.n_rotor) {
        cfg.model.n_rotor = *f.n_rotor;
        cfg.model.with_kick_times_period(cfg.v_times_t);
    }
    if (f.seed)
        cfg.rotor_seed = *f.seed;
    if (f.epsilon)
        cfg.epsilons = {*f.epsilon};
    if (!f.out_dir.empty())
        cfg.out_dir = f.out_dir;
    cfg.workers = f.workers;
    cfg.validate();
    return cfg;
}

void print_run(const plab::RunResult& r)
{
    std::printf("epsilon          %s\n", plab::fmt17(r.epsilon).c_str());
    std::printf("status           %s%s%s\n", r.status.c_str(), r.status_reason.empty() ? "" : "  (",
                r.status_reason.empty() ? "" : (r.status_reason + ")").c_str());
    if (r.candidate) {
        std::printf("theta(tilde,H_S) %.6f\n", r.theta_tilde_hs);
        std::printf("theta(tilde,H_I) %.6f\n", r.theta_tilde_hi);
        std::printf("theta(tilde,max) %.6f\n", r.theta_tilde_max);
        std::printf("d(tilde)         %.6g\n", r.tilde.d);
    }
    std::printf("theta(max,H_S)   %.6f\n", r.theta_max_hs);
    std::printf("theta(max,H_I)   %.6f\n", r.theta_max_hi);
    std::printf("d(H_S)           %.6g\n", r.hs.d);
    std::printf("d(H_I)           %.6g\n", r.hi.d);
    std::printf("crossings        %zu\n", r.crossings);
    std::printf("norm drift       %.3g\n", r.max_norm_drift);
    std::printf("manifest         %s\n", r.manifest_hash.c_str());
    std::printf("wall             %.2f s\n", r.wall_seconds);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pointer states of a qubit coupled to a qubit + kicked-rotor environment"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "key = value configuration file");
        sub->add_option("--epsilon", flags.epsilon, "override: single coupling strength");
        sub->add_option("--n-rotor", flags.n_rotor, "override: rotor Hilbert dimension (power of two)");
        sub->add_option("--workers", flags.workers, "concurrent sweep points")->check(CLI::PositiveNumber);
        sub->add_option("--seed", flags.seed, "override: random seed");
        sub->add_option("--out", flags.out_dir, "override: output directory");
    };

    auto* run = app.add_subcommand("run", "evolve one epsilon point and identify pointer states");
    add_common(run);
    auto* sweep = app.add_subcommand("sweep", "run every epsilon of the configuration");
    add_common(sweep);
    auto* theory = app.add_subcommand("theory", "||Delta H|| maximizer and r over the epsilon list, no dynamics");
    add_common(theory);
    auto* oracle = app.add_subcommand("oracle", "compare the split-operator step with the dense propagator");
    add_common(oracle);
    int oracle_states = 50, oracle_steps = 20;
    oracle->add_option("--states", oracle_states, "random initial states per N");
    oracle->add_option("--steps", oracle_steps, "periods per state");

    auto* typ = app.add_subcommand("typicality", "Hilbert-space average of d over typical states");
    add_common(typ);
    plab::typicality::TypicalEnsembleSpec spec;
    typ->add_option("--n-env", spec.n_env, "environment dimension");
    typ->add_option("--samples", spec.n_samples, "number of random states");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto cfg = load(flags);
            if (cfg.epsilons.empty())
                throw plab::ConfigError("no epsilon given");
            print_run(plab::run_single(cfg, cfg.epsilons.front()));
        } else if (*sweep) {
            const auto cfg = load(flags);
            const auto res = plab::run_sweep(cfg);
            plab::write_sweep_csv(std::cout, res);
        } else if (*theory) {
            const auto cfg = load(flags);
            const auto rows = plab::theory::theory_sweep(cfg.params_for(0.0), cfg.epsilons);
            plab::theory::write_theory_csv(std::cout, rows);
            if (!cfg.out_dir.empty()) {
                std::filesystem::create_directories(cfg.out_dir);
                std::ofstream os(cfg.out_dir / "theory.csv");
                os << "# manifest_hash=" << plab::manifest_hash_for(cfg.canonical_text()) << '\n';
                plab::theory::write_theory_csv(os, rows);
                // r for one fixed, arbitrarily chosen basis.
                std::ofstream fx(cfg.out_dir / "r_fixed_basis.csv");
                fx << "# manifest_hash=" << plab::manifest_hash_for(cfg.canonical_text()) << '\n';
                fx << "epsilon,b,phi,r\n";
                const plab::BasisPair fixed(0.3, 1.0);
                for (double e : cfg.epsilons) {
                    auto p = cfg.params_for(e);
                    fx << plab::fmt17(e) << ',' << plab::fmt17(fixed.b()) << ',' << plab::fmt17(fixed.phi()) << ','
                       << plab::fmt17(plab::theory::ratio_r(fixed, p)) << '\n';
                }
            }
        } else if (*oracle) {
            auto cfg = load(flags);
            const double eps = flags.epsilon.value_or(2000.0);
            std::vector<std::uint32_t> sizes{4, 8, 16};
            if (flags.n_rotor)
                sizes = {*flags.n_rotor};
            bool ok = true;
            for (auto n : sizes) {
                cfg.model.n_rotor = n;
                const auto rep = plab::oracle::compare_with_stepper(cfg.params_for(eps), oracle_states, oracle_steps,
                                                                    cfg.rotor_seed);
                const bool pass = rep.max_amplitude_error < 1e-11;
                ok = ok && pass;
                std::printf("N=%-4u states=%d steps=%d max|split-dense|=%.3e  %.2fs  %s\n", n, rep.n_states,
                            rep.n_steps, rep.max_amplitude_error, rep.seconds, pass ? "ok" : "MISMATCH");
            }
            if (!ok)
                return kExitNumerical;
        } else if (*typ) {
            if (flags.seed)
                spec.seed = *flags.seed;
            const auto s = plab::run_typicality(spec, flags.out_dir);
            std::cout << plab::typicality::report_json(s);
        }
    } catch (const plab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const plab::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const plab::EvolutionAborted& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
