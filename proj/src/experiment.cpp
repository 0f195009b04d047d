#include "plab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <omp.h>

#include "plab/textio.hpp"

#ifndef PLAB_VERSION
#define PLAB_VERSION "dev"
#endif

namespace plab {

std::string code_version() { return PLAB_VERSION; }

std::string manifest_hash_for(const std::string& canonical_text)
{
    return hex64(fnv1a64("pointerlab " + code_version() + "\n" + canonical_text));
}

// ---------------------------------------------------------------------------
// Configuration

std::uint64_t ExperimentConfig::effective_stride() const
{
    if (stride > 0)
        return stride;
    return model.n_rotor <= 1024 ? 1 : 10;
}

Vec2 ExperimentConfig::initial_system() const
{
    const Vec2 x_plus = Vec2(1.0, 1.0) / std::sqrt(2.0);
    const Vec2 x_minus = Vec2(1.0, -1.0) / std::sqrt(2.0);
    return amp0 * x_plus + amp1 * x_minus;
}

Vec2 ExperimentConfig::initial_a_qubit() const
{
    return a_state == 0 ? Vec2(Vec2(1.0, -1.0) / std::sqrt(2.0)) : Vec2(Vec2(1.0, 1.0) / std::sqrt(2.0));
}

ModelParams ExperimentConfig::params_for(double epsilon) const
{
    ModelParams p = model;
    p.epsilon = epsilon;
    p.with_kick_times_period(v_times_t);
    return p;
}

void ExperimentConfig::validate() const
{
    params_for(0.0).validate();
    const double n2 = std::norm(amp0) + std::norm(amp1);
    if (std::abs(n2 - 1.0) > 1e-10)
        throw ConfigError("initial system amplitudes must satisfy |amp0|^2 + |amp1|^2 = 1 (got " + fmt17(n2) + ")");
    if (a_state != 0 && a_state != 1)
        throw ConfigError("a_state must be 0 or 1");
    if (window.t_a > window.t_b || window.t_b > n_steps)
        throw ConfigError("window [t_a, t_b] must lie inside [0, n_steps]");
    for (double e : epsilons)
        if (!std::isfinite(e))
            throw ConfigError("epsilon values must be finite");
}

std::string ExperimentConfig::canonical_text() const
{
    std::map<std::string, std::string> kv;
    kv["omega_x"] = fmt17(model.omega_x);
    kv["omega_z"] = fmt17(model.omega_z);
    kv["omega_a"] = fmt17(model.omega_a);
    kv["lambda"] = fmt17(model.lambda);
    kv["v_times_t"] = fmt17(v_times_t);
    kv["n_rotor"] = std::to_string(model.n_rotor);
    kv["n_steps"] = std::to_string(n_steps);
    kv["t_a"] = std::to_string(window.t_a);
    kv["t_b"] = std::to_string(window.t_b);
    kv["stride"] = std::to_string(effective_stride());
    kv["amp0_re"] = fmt17(amp0.real());
    kv["amp0_im"] = fmt17(amp0.imag());
    kv["amp1_re"] = fmt17(amp1.real());
    kv["amp1_im"] = fmt17(amp1.imag());
    kv["a_state"] = std::to_string(a_state);
    kv["rotor_seed"] = std::to_string(rotor_seed);
    kv["momentum_offset"] = fmt17(momentum_offset);
    std::string eps;
    for (double e : epsilons)
        eps += (eps.empty() ? "" : ",") + fmt17(e);
    kv["epsilon_list"] = eps;
    std::string out;
    for (const auto& [k, v] : kv)
        out += k + " = " + v + "\n";
    return out;
}

std::vector<double> log_grid(double lo, double hi, int per_decade)
{
    if (!(lo > 0.0) || !(hi >= lo) || per_decade < 1)
        throw ConfigError("log_grid: need 0 < lo <= hi and per_decade >= 1");
    const double l0 = std::log10(lo), l1 = std::log10(hi);
    const int n = static_cast<int>(std::llround((l1 - l0) * per_decade));
    std::vector<double> g;
    for (int i = 0; i <= n; ++i)
        g.push_back(std::pow(10.0, l0 + (l1 - l0) * (n == 0 ? 0.0 : double(i) / n)));
    return g;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

std::uint64_t to_uint(const std::string& key, const std::string& v)
{
    if (!v.empty() && v.find_first_not_of("0123456789") == std::string::npos)
        return std::stoull(v);
    // Accept integral values written in floating notation, e.g. 4e4.
    const double x = to_double(key, v);
    if (x < 0.0 || x != std::floor(x) || x > 9.0e15)
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
    return static_cast<std::uint64_t>(x);
}

std::vector<double> parse_eps_list(const std::string& v)
{
    if (v.rfind("log:", 0) == 0) {
        std::vector<std::string> parts;
        std::stringstream ss(v.substr(4));
        std::string item;
        while (std::getline(ss, item, ':'))
            parts.push_back(trim(item));
        if (parts.size() != 3)
            throw ConfigError("epsilon_list: expected log:LO:HI:PER_DECADE");
        return log_grid(to_double("epsilon_list", parts[0]), to_double("epsilon_list", parts[1]),
                        static_cast<int>(to_uint("epsilon_list", parts[2])));
    }
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty())
            out.push_back(to_double("epsilon_list", trim(item)));
    return out;
}

} // namespace

ExperimentConfig parse_config(const std::string& text)
{
    ExperimentConfig cfg;
    bool have_eps = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "omega_x")
            cfg.model.omega_x = to_double(key, val);
        else if (key == "omega_z")
            cfg.model.omega_z = to_double(key, val);
        else if (key == "omega_a")
            cfg.model.omega_a = to_double(key, val);
        else if (key == "epsilon_list") {
            cfg.epsilons = parse_eps_list(val);
            have_eps = true;
        } else if (key == "lambda")
            cfg.model.lambda = to_double(key, val);
        else if (key == "v_times_t")
            cfg.v_times_t = to_double(key, val);
        else if (key == "n_rotor") {
            const auto n = to_uint(key, val);
            if (n > (1u << 26))
                throw ConfigError("n_rotor too large");
            cfg.model.n_rotor = static_cast<std::uint32_t>(n);
        } else if (key == "n_steps")
            cfg.n_steps = to_uint(key, val);
        else if (key == "t_a")
            cfg.window.t_a = to_uint(key, val);
        else if (key == "t_b")
            cfg.window.t_b = to_uint(key, val);
        else if (key == "stride")
            cfg.stride = to_uint(key, val);
        else if (key == "amp0_re")
            cfg.amp0.real(to_double(key, val));
        else if (key == "amp0_im")
            cfg.amp0.imag(to_double(key, val));
        else if (key == "amp1_re")
            cfg.amp1.real(to_double(key, val));
        else if (key == "amp1_im")
            cfg.amp1.imag(to_double(key, val));
        else if (key == "a_state")
            cfg.a_state = static_cast<int>(to_uint(key, val));
        else if (key == "rotor_seed")
            cfg.rotor_seed = to_uint(key, val);
        else if (key == "out_dir")
            cfg.out_dir = val;
        else if (key == "momentum_offset")
            cfg.momentum_offset = to_double(key, val);
        else
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!have_eps)
        cfg.epsilons = log_grid(0.1, 1e4, 20);
    cfg.model.with_kick_times_period(cfg.v_times_t);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Single run

namespace {

std::string eps_tag(double eps)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "eps_%.6e", eps);
    return buf;
}

void write_offdiag_csv(std::ostream& os, const RunResult& r)
{
    os << "step,tilde_offdiag,tilde_diagdiff,hs_offdiag,hs_diagdiff,hi_offdiag,hi_diagdiff\n";
    for (std::size_t i = 0; i < r.offdiag_hs.size(); ++i) {
        os << r.offdiag_hs[i].step << ',';
        if (!r.offdiag_tilde.empty())
            os << fmt17(r.offdiag_tilde[i].offdiag_abs) << ',' << fmt17(r.offdiag_tilde[i].diag_diff_abs);
        else
            os << "nan,nan";
        os << ',' << fmt17(r.offdiag_hs[i].offdiag_abs) << ',' << fmt17(r.offdiag_hs[i].diag_diff_abs) << ','
           << fmt17(r.offdiag_hi[i].offdiag_abs) << ',' << fmt17(r.offdiag_hi[i].diag_diff_abs) << '\n';
    }
}

nlohmann::ordered_json vec_json(const Vec2& v)
{
    return {v(0).real(), v(0).imag(), v(1).real(), v(1).imag()};
}

nlohmann::ordered_json opt_json(const std::optional<std::uint64_t>& x)
{
    return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
}

void write_result_json(std::ostream& os, const ExperimentConfig& cfg, const RunResult& r)
{
    nlohmann::ordered_json j;
    j["manifest_hash"] = r.manifest_hash;
    j["code_version"] = code_version();
    j["epsilon"] = r.epsilon;
    j["lambda"] = r.lambda;
    j["status"] = r.status;
    j["status_reason"] = r.status_reason;
    j["crossings"] = r.crossings;
    j["mean_purity"] = r.mean_purity;
    j["rho_bar_gap"] = r.rho_bar_gap;
    j["max_norm_drift"] = r.max_norm_drift;
    if (r.candidate) {
        j["tilde_0"] = vec_json(r.candidate->tilde_0);
        j["tilde_1"] = vec_json(r.candidate->tilde_1);
        j["rho_bar_eigenvalues"] = {r.candidate->rho_bar_eigenvalues[0], r.candidate->rho_bar_eigenvalues[1]};
    }
    j["theta_reference"] = "tilde_1 vs closest eigenvector (identical for tilde_0 on a qubit)";
    j["theta_tilde_hs"] = r.theta_tilde_hs;
    j["theta_tilde_hi"] = r.theta_tilde_hi;
    j["theta_max_hs"] = r.theta_max_hs;
    j["theta_max_hi"] = r.theta_max_hi;
    j["theta_tilde_max"] = r.theta_tilde_max;
    j["maximizer"] = {{"b", r.maximizer.basis.b()},
                      {"phi", r.maximizer.basis.phi()},
                      {"norm_dh", r.maximizer.norm_dh},
                      {"grad_norm", r.maximizer.grad_norm}};
    auto basis_json = [](const BasisReport& b) {
        return nlohmann::ordered_json{{"d", b.d}, {"offdiag_plateau", b.offdiag_plateau}, {"settle_step", opt_json(b.settle_step)}};
    };
    j["tilde"] = basis_json(r.tilde);
    j["hs"] = basis_json(r.hs);
    j["hi"] = basis_json(r.hi);
    nlohmann::ordered_json manifest;
    std::istringstream canon(cfg.canonical_text());
    std::string line;
    while (std::getline(canon, line)) {
        const auto eq = line.find(" = ");
        manifest[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["manifest"] = manifest;
    j["wall_seconds"] = r.wall_seconds;
    os << j.dump(2) << '\n';
}

} // namespace

RunResult run_single(const ExperimentConfig& cfg, double epsilon)
{
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    ExperimentConfig point = cfg;
    point.epsilons = {epsilon};

    RunResult r;
    r.epsilon = epsilon;
    r.lambda = cfg.model.lambda;
    r.manifest_hash = manifest_hash_for(point.canonical_text());

    const ModelParams p = cfg.params_for(epsilon);
    const FloquetStepper stepper(p, cfg.momentum_offset);
    const auto rotor = random_rotor_state(p.n_rotor, cfg.rotor_seed);
    TotalState psi = TotalState::product(cfg.initial_system(), cfg.initial_a_qubit(), rotor);

    const std::uint64_t stride = cfg.effective_stride();
    std::vector<RdmSample> samples;
    samples.reserve(cfg.n_steps / stride + 2);
    samples.push_back({0, partial_trace_env(psi)});
    double drift = std::abs(psi.norm_squared() - 1.0);
    evolve(std::move(psi), stepper, cfg.n_steps, [&](std::uint64_t step, const TotalState& s) {
        if (step % stride != 0)
            return;
        const Rdm2 rho = partial_trace_env(s);
        drift = std::max(drift, std::abs(rho.m00 + rho.m11 - 1.0));
        if (drift > kNormDriftLimit)
            throw NumericalError("norm drift " + fmt17(drift) + " at step " + std::to_string(step));
        samples.push_back({step, rho});
    });
    r.max_norm_drift = drift;

    r.trajectory = track_branch(std::move(samples));
    r.crossings = r.trajectory.crossings.size();
    const auto& traj = r.trajectory;

    double purity = 0.0;
    std::size_t in_window = 0;
    for (const auto& s : traj.samples)
        if (cfg.window.contains(s.step)) {
            purity += s.rho.purity();
            ++in_window;
        }
    r.mean_purity = in_window ? purity / double(in_window) : 1.0;

    const auto hs = theory::hs_eigenbasis(p);
    const auto hi = theory::hi_eigenbasis();
    r.maximizer = theory::maximize_delta_h(p);
    r.theta_max_hs = theory::theta_to_basis(r.maximizer.basis.alpha(), hs);
    r.theta_max_hi = theory::theta_to_basis(r.maximizer.basis.alpha(), hi);

    auto fill = [&](BasisReport& rep, std::vector<OffDiagSample>& trace, const Vec2& a, const Vec2& b) {
        rep.d = avg_distance(traj, a, cfg.window);
        trace = offdiag_trace(traj.samples, a, b);
        rep.offdiag_plateau = window_mean_offdiag(trace, cfg.window);
        rep.settle_step = decay_settle_step(trace, cfg.window);
    };
    fill(r.hs, r.offdiag_hs, hs[0], hs[1]);
    fill(r.hi, r.offdiag_hi, hi[0], hi[1]);

    std::string reason;
    try {
        r.candidate = pointer_candidate(traj, cfg.window);
        r.rho_bar_gap = r.candidate->rho_bar_eigenvalues[0] - r.candidate->rho_bar_eigenvalues[1];
        fill(r.tilde, r.offdiag_tilde, r.candidate->tilde_0, r.candidate->tilde_1);
        r.theta_tilde_hs = theory::theta_to_basis(r.candidate->tilde_1, hs);
        r.theta_tilde_hi = theory::theta_to_basis(r.candidate->tilde_1, hi);
        r.theta_tilde_max = theory::theta_to_basis(r.candidate->tilde_1, {r.maximizer.basis.alpha(), r.maximizer.basis.beta()});
        if (r.mean_purity > 1.0 - kPurityPureTol)
            reason = "RDM stays pure: no decoherence";
        else if (r.tilde.d > kNoPsDistance)
            reason = "d(tilde) = " + fmt17(r.tilde.d) + " exceeds " + fmt17(kNoPsDistance);
    } catch (const CandidateUnresolved& e) {
        reason = e.what();
    }
    r.status = reason.empty() ? "PS" : "no-PS";
    r.status_reason = reason;

    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!cfg.out_dir.empty()) {
        const auto dir = cfg.out_dir / eps_tag(epsilon);
        std::filesystem::create_directories(dir);
        {
            std::ofstream os(dir / "trajectory.csv");
            os << "# manifest_hash=" << r.manifest_hash << '\n';
            write_trajectory_csv(os, traj);
        }
        {
            std::ofstream os(dir / "offdiag.csv");
            os << "# manifest_hash=" << r.manifest_hash << '\n';
            write_offdiag_csv(os, r);
        }
        std::ofstream os(dir / "result.json");
        write_result_json(os, point, r);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Sweeps

SweepResult run_sweep(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (cfg.epsilons.size() < 2)
        throw ConfigError("sweep needs at least 2 epsilon points");
    std::vector<double> eps = cfg.epsilons;
    std::sort(eps.begin(), eps.end());

    SweepResult out;
    out.manifest_hash = manifest_hash_for(cfg.canonical_text());
    out.points.resize(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i)
        out.points[i].epsilon = eps[i];

    ExperimentConfig point_cfg = cfg;
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(eps.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        if (workers > 1)
            omp_set_num_threads(1);
        for (std::size_t i = next++; i < eps.size(); i = next++) {
            try {
                out.points[i].result = run_single(point_cfg, eps[i]);
            } catch (const std::exception& e) {
                out.points[i].error = e.what();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }

    out.theory = theory::theory_sweep(cfg.params_for(0.0), eps);

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream os(cfg.out_dir / "sweep.csv");
        write_sweep_csv(os, out);
        std::ofstream th(cfg.out_dir / "theory.csv");
        th << "# manifest_hash=" << out.manifest_hash << '\n';
        theory::write_theory_csv(th, out.theory);
    }
    return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& s)
{
    os << "# manifest_hash=" << s.manifest_hash << '\n';
    os << "epsilon,status,theta_tilde_hs,theta_tilde_hi,theta_max_hs,theta_max_hi,theta_tilde_max,"
          "d_tilde,d_hs,d_hi,crossings,error\n";
    for (const auto& p : s.points) {
        os << fmt17(p.epsilon) << ',';
        if (!p.result) {
            std::string msg = p.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            os << "error,nan,nan,nan,nan,nan,nan,nan,nan,0," << msg << '\n';
            continue;
        }
        const auto& r = *p.result;
        const bool has_tilde = r.candidate.has_value();
        const std::string nan = "nan";
        os << r.status << ',' << (has_tilde ? fmt17(r.theta_tilde_hs) : nan) << ','
           << (has_tilde ? fmt17(r.theta_tilde_hi) : nan) << ',' << fmt17(r.theta_max_hs) << ','
           << fmt17(r.theta_max_hi) << ',' << (has_tilde ? fmt17(r.theta_tilde_max) : nan) << ','
           << (has_tilde ? fmt17(r.tilde.d) : nan) << ',' << fmt17(r.hs.d) << ',' << fmt17(r.hi.d) << ','
           << r.crossings << ",\n";
    }
}

typicality::TypicalitySummary run_typicality(const typicality::TypicalEnsembleSpec& spec,
                                             const std::filesystem::path& out_dir)
{
    auto summary = typicality::summarize(spec);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        auto j = nlohmann::ordered_json::parse(typicality::report_json(summary));
        j["manifest_hash"] = manifest_hash_for("n_env = " + std::to_string(spec.n_env) + "\nn_samples = " +
                                               std::to_string(spec.n_samples) + "\nseed = " +
                                               std::to_string(spec.seed) + "\n");
        std::ofstream os(out_dir / "typicality.json");
        os << j.dump(2) << '\n';
    }
    return summary;
}

} // namespace plab
