#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "plab/experiment.hpp"

using namespace plab;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(# small run
omega_x = 500
omega_z = 1000
omega_a = 1500
lambda = 0.1
v_times_t = 90
n_rotor = 256
n_steps = 2000
t_a = 1000
t_b = 2000
epsilon_list = 2000
amp0_re = 0.226929748370581
amp0_im = -0.7671394197305108
amp1_re = 0.6
amp1_im = 0
a_state = 0
rotor_seed = 12345
)";

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const auto d = fs::temp_directory_path() / ("plab_test_" + name);
    fs::remove_all(d);
    return d;
}

std::string with(const std::string& text, const std::string& key, const std::string& value)
{
    std::istringstream in(text);
    std::string out, line;
    while (std::getline(in, line)) {
        if (line.rfind(key + " =", 0) == 0)
            line = key + " = " + value;
        out += line + "\n";
    }
    return out;
}

} // namespace

TEST_CASE("config parsing")
{
    SUBCASE("full key set")
    {
        const auto cfg = parse_config(kSmall);
        CHECK(cfg.model.n_rotor == 256);
        CHECK(cfg.n_steps == 2000);
        CHECK(cfg.window.t_a == 1000);
        CHECK(cfg.epsilons == std::vector<double>{2000.0});
        CHECK(cfg.model.kick_times_period() == doctest::Approx(90.0));
        CHECK(cfg.effective_stride() == 1);
        CHECK(cfg.initial_system().norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("defaults: log grid with 20 points per decade")
    {
        const auto cfg = parse_config("");
        CHECK(cfg.epsilons.size() == 101);
        CHECK(cfg.epsilons.front() == doctest::Approx(0.1));
        CHECK(cfg.epsilons.back() == doctest::Approx(1e4));
        CHECK(cfg.epsilons[20] == doctest::Approx(1.0));
        CHECK(cfg.effective_stride() == 10);
        CHECK(cfg.model.n_rotor == 4096);
    }
    SUBCASE("epsilon list forms")
    {
        CHECK(parse_config("epsilon_list = 1, 2.5,1e3").epsilons == std::vector<double>{1.0, 2.5, 1000.0});
        CHECK(parse_config("epsilon_list = log:1:100:2").epsilons.size() == 5);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(parse_config("bogus = 1"), ConfigError);
        CHECK_THROWS_AS(parse_config("omega_x"), ConfigError);
        CHECK_THROWS_AS(parse_config("omega_x = abc"), ConfigError);
        CHECK_THROWS_AS(parse_config("n_rotor = 1000"), ConfigError);
        CHECK_THROWS_AS(parse_config("n_steps = -5"), ConfigError);
        CHECK_THROWS_AS(parse_config(with(kSmall, "amp1_re", "0.7")), ConfigError);
        CHECK_THROWS_AS(parse_config(with(kSmall, "t_b", "5000")), ConfigError);
        CHECK_THROWS_AS(parse_config(with(kSmall, "t_a", "3000")), ConfigError);
        CHECK_THROWS_AS(parse_config(with(kSmall, "a_state", "2")), ConfigError);
        CHECK_THROWS_AS(parse_config("epsilon_list = log:1:100"), ConfigError);
        CHECK_THROWS_AS(load_config("/nonexistent/plab.cfg"), ConfigError);
    }
    SUBCASE("canonical text is stable and parameter sensitive")
    {
        const auto a = parse_config(kSmall), b = parse_config(kSmall);
        CHECK(a.canonical_text() == b.canonical_text());
        CHECK(manifest_hash_for(a.canonical_text()).size() == 16);
        const auto c = parse_config(with(kSmall, "rotor_seed", "1"));
        CHECK(manifest_hash_for(a.canonical_text()) != manifest_hash_for(c.canonical_text()));
    }
}

TEST_CASE("shipped configurations load and validate")
{
    int n = 0;
    for (const auto& e : fs::directory_iterator(PLAB_CONFIG_DIR)) {
        if (e.path().extension() != ".cfg")
            continue;
        CAPTURE(e.path().string());
        CHECK_NOTHROW(load_config(e.path()).validate());
        ++n;
    }
    CHECK(n >= 3);
}

TEST_CASE("zero coupling runs to completion with status no-PS")
{
    auto cfg = parse_config(kSmall);
    const auto r = run_single(cfg, 0.0);
    CHECK(r.status == "no-PS");
    CHECK_FALSE(r.status_reason.empty());
    CHECK(r.mean_purity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.max_norm_drift < 1e-10);
}

TEST_CASE("runs write manifest-tagged outputs and are byte reproducible")
{
    const auto d1 = scratch("run1"), d2 = scratch("run2");
    auto cfg = parse_config(kSmall);
    cfg.out_dir = d1;
    const auto r1 = run_single(cfg, 2000.0);
    cfg.out_dir = d2;
    const auto r2 = run_single(cfg, 2000.0);
    CHECK(r1.manifest_hash == r2.manifest_hash);

    const auto sub = fs::path("eps_2.000000e+03");
    for (const char* f : {"trajectory.csv", "offdiag.csv"}) {
        const std::string a = slurp(d1 / sub / f), b = slurp(d2 / sub / f);
        CHECK(!a.empty());
        CHECK(a == b);
        CHECK(a.rfind("# manifest_hash=" + r1.manifest_hash + "\n", 0) == 0);
    }
    const auto j = nlohmann::json::parse(slurp(d1 / sub / "result.json"));
    CHECK(j["manifest_hash"] == r1.manifest_hash);
    CHECK(j["manifest"]["rotor_seed"] == "12345");
    CHECK(j.contains("wall_seconds"));

    // Trajectory has one row per period plus the initial sample.
    std::istringstream is(slurp(d1 / sub / "trajectory.csv"));
    std::string line;
    int rows = -2;
    while (std::getline(is, line))
        ++rows;
    CHECK(rows == 2001);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("pointer basis outperforms the reference bases at intermediate coupling")
{
    auto cfg = parse_config(with(with(with(with(kSmall, "n_rotor", "1024"), "n_steps", "10000"), "t_a", "7500"),
                                 "t_b", "10000"));
    const auto r = run_single(cfg, 1000.0);
    REQUIRE(r.candidate);
    CHECK(r.status == "PS");
    CHECK(r.tilde.d < r.hs.d);
    CHECK(r.tilde.d < r.hi.d);
    CHECK(r.tilde.offdiag_plateau < r.hs.offdiag_plateau);
}

TEST_CASE("crossing count and window statistics are stable under halving the stride")
{
    auto cfg = parse_config(with(with(with(with(kSmall, "n_rotor", "4096"), "n_steps", "40000"), "t_a", "30000"),
                                 "t_b", "40000"));
    cfg.stride = 10;
    const auto coarse = run_single(cfg, 2000.0);
    cfg.stride = 5;
    const auto fine = run_single(cfg, 2000.0);
    REQUIRE(coarse.candidate);
    REQUIRE(fine.candidate);
    MESSAGE("crossings " << coarse.crossings << " vs " << fine.crossings);
    CHECK(coarse.crossings == fine.crossings);
    CHECK(std::abs(coarse.theta_tilde_hs - fine.theta_tilde_hs) < 0.01);
    CHECK(std::abs(coarse.tilde.d - fine.tilde.d) < 0.1 * fine.tilde.d);
}

TEST_CASE("sweeps")
{
    const auto dir = scratch("sweep");
    auto cfg = parse_config(with(with(with(with(kSmall, "n_steps", "400"), "t_a", "200"), "t_b", "400"),
                                 "epsilon_list", "3000, 0.5, 40"));
    cfg.out_dir = dir;
    cfg.workers = 2;
    const auto s = run_sweep(cfg);
    REQUIRE(s.points.size() == 3);
    CHECK(s.points[0].epsilon == 0.5);
    CHECK(s.points[1].epsilon == 40.0);
    CHECK(s.points[2].epsilon == 3000.0);
    CHECK(s.theory.size() == 3);
    for (const auto& p : s.points)
        CHECK(p.result.has_value());

    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("# manifest_hash=" + s.manifest_hash, 0) == 0);
    CHECK(slurp(dir / "theory.csv").rfind("# manifest_hash=" + s.manifest_hash, 0) == 0);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    std::getline(is, line);
    CHECK(line.rfind("epsilon,status,", 0) == 0);
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    CHECK(rows == 3);

    // Worker count does not change results beyond reduction-order rounding.
    cfg.workers = 1;
    cfg.out_dir.clear();
    const auto serial = run_sweep(cfg);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::abs(serial.points[i].result->tilde.d - s.points[i].result->tilde.d) < 1e-12);

    cfg.epsilons = {1.0};
    CHECK_THROWS_AS(run_sweep(cfg), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("failed sweep points are recorded and the sweep continues")
{
    // A plain file where one point's output directory belongs makes that point fail.
    const auto dir = scratch("failpoint");
    fs::create_directories(dir);
    std::ofstream(dir / "eps_2.000000e+00") << "blocker\n";
    auto cfg = parse_config(with(with(with(kSmall, "n_steps", "300"), "t_a", "150"), "t_b", "300"));
    cfg.epsilons = {1.0, 2.0};
    cfg.out_dir = dir;
    const auto s = run_sweep(cfg);
    REQUIRE(s.points.size() == 2);
    CHECK(s.points[0].result.has_value());
    CHECK_FALSE(s.points[1].result.has_value());
    CHECK_FALSE(s.points[1].error.empty());
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.find("\n2,error,") != std::string::npos);
    CHECK_THROWS_AS(parse_config("epsilon_list = 1, inf"), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("typicality driver writes a tagged report")
{
    const auto dir = scratch("typ");
    const auto s = run_typicality(typicality::TypicalEnsembleSpec{128, 200, 4}, dir);
    const auto j = nlohmann::json::parse(slurp(dir / "typicality.json"));
    CHECK(j["n_env"] == 128);
    CHECK(j["avg_d"].get<double>() == s.avg_d.value);
    CHECK(j.contains("manifest_hash"));
    fs::remove_all(dir);
}
