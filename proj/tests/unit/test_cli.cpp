#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args)
{
    const std::string cmd = std::string(PLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_cfg(const std::string& name, const std::string& text)
{
    const auto p = fs::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("exit codes")
{
    CHECK(run("oracle") == 0);
    CHECK(run("theory --epsilon 2000") == 0);
    CHECK(run("typicality --n-env 64 --samples 200 --seed 3") == 0);

    CHECK(run("run --config /nonexistent.cfg") == 2);
    CHECK(run("run --config " + write_cfg("plab_bad_key.cfg", "nope = 1\n").string()) == 2);
    CHECK(run("run --n-rotor 100 --epsilon 1") == 2);
    CHECK(run("typicality --n-env 1 --samples 10") == 2);
    CHECK(run("sweep --epsilon 5") == 2);

    // A window beyond the run length is a configuration error before any evolution.
    const auto cfg = write_cfg("plab_short.cfg", "n_rotor = 64\nn_steps = 100\nt_a = 50\nt_b = 200\n");
    CHECK(run("run --epsilon 1 --config " + cfg.string()) == 2);

    CHECK(run("") != 0);
    CHECK(run("frobnicate") != 0);
}

TEST_CASE("small run and sweep succeed")
{
    const auto out = fs::temp_directory_path() / "plab_cli_out";
    fs::remove_all(out);
    const auto cfg = write_cfg("plab_small.cfg",
                               "n_rotor = 64\nn_steps = 400\nt_a = 200\nt_b = 400\nepsilon_list = 10, 2000\n");
    CHECK(run("run --epsilon 2000 --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "eps_2.000000e+03" / "result.json"));
    CHECK(run("sweep --workers 2 --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "sweep.csv"));
    CHECK(run("theory --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "r_fixed_basis.csv"));
    fs::remove_all(out);
}
