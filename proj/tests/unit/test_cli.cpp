#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "smx/cli.hpp"

using namespace smx;
using namespace smx::cli;
namespace fs = std::filesystem;

namespace {

const char* harmonic_toml = R"(units = "natural"

[potential]
name = "harmonic"

[solver]
v0 = -1.0
half_width = 0.1

[scan]
e_min = 0.0
e_max = 4.0
n_grid = 80
symmetric = true

[output]
states = [0, 2]
sample_min = -5.0
sample_max = 5.0
sample_points = 101
)";

std::string error_of(const std::string& text)
{
    try {
        parse_toml(text, "cfg.toml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to)
{
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / fs::path("smx_cli_test_" + std::to_string(::getpid()) + "_" +
                                                    std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter()
    {
        static int c = 0;
        return c;
    }
};

fs::path write(const fs::path& dir, const std::string& name, const std::string& text)
{
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("valid config fills defaults")
{
    const RunConfig c = parse_toml(harmonic_toml, "cfg.toml");
    CHECK(c.potential == "harmonic");
    CHECK(c.v0 == -1.0);
    CHECK(c.lambda_order == 10);
    CHECK(c.taylor_order == 2);
    CHECK(c.symmetric);
    CHECK(c.output.states == std::vector<int>{0, 2});
    const auto model = build_model(c);
    const auto scan = build_scan(c, model, 1);
    CHECK(scan.e_max == 4.0);
    CHECK(scan.sweep.slicing.half_width == 0.1);
}

TEST_CASE("missing v0 names the key")
{
    const std::string e = error_of(replace(harmonic_toml, "v0 = -1.0\n", ""));
    CHECK(e.find("'v0'") != std::string::npos);
    CHECK(e.rfind("cfg.toml:", 0) == 0);
}

TEST_CASE("diagnostics carry line numbers")
{
    const std::string e = error_of(replace(harmonic_toml, "half_width = 0.1", "half_widht = 0.1"));
    CHECK(e.find("cfg.toml:8") != std::string::npos);
    CHECK(e.find("half_widht") != std::string::npos);
    CHECK(error_of(replace(harmonic_toml, "n_grid = 80", "n_grid = 1")).find("cfg.toml:13") != std::string::npos);
    CHECK(error_of(replace(harmonic_toml, "v0 = -1.0", "v0 = 0.5")).find("'v0'") != std::string::npos);
    CHECK(error_of(replace(harmonic_toml, "\"harmonic\"", "\"morse\"")).find("morse") != std::string::npos);
    CHECK(error_of(replace(harmonic_toml, "e_min = 0.0", "e_min = [")).rfind("cfg.toml:", 0) == 0);
    CHECK(error_of(replace(harmonic_toml, "n_grid = 80", "n_grid = 8.5")).find("integer") != std::string::npos);
}

TEST_CASE("cross-field checks use converted units")
{
    const char* h = R"([potential]
name = "hydrogen"
l = 1

[solver]
v0 = 1.2
x0 = 2.0
slicing = "geometric"
ratio = 100
taylor_order = 50
lambda_order = 52

[scan]
e_min = 0.009
e_max = 0.26
)";
    const RunConfig c = parse_toml(h, "h.toml");
    const auto model = build_model(c);
    const auto scan = build_scan(c, model, 1);
    // E1 = -1/2: the window flips
    CHECK(scan.e_min == doctest::Approx(-0.13));
    CHECK(scan.e_max == doctest::Approx(-0.0045));
    CHECK(scan.sweep.v0 == doctest::Approx(-0.6));
    CHECK(error_of(replace(h, "x0 = 2.0", "x0 = -2.0")).find("'x0'") != std::string::npos);
    CHECK(error_of(replace(h, "e_min = 0.009", "e_min = -0.1")).find("asymptote") != std::string::npos);
}

TEST_CASE("JSON echo round-trips")
{
    const RunConfig a = parse_toml(harmonic_toml, "cfg.toml");
    const nlohmann::json echo = to_json(a);
    const RunConfig b = parse_json(echo.dump(), "echo.json");
    CHECK(to_json(b) == echo);
    nlohmann::json wrapped;
    wrapped["config"] = echo;
    CHECK(to_json(parse_json(wrapped.dump(), "spectrum.json")) == echo);
    CHECK_THROWS_AS(parse_json("[1, 2]", "x.json"), ConfigError);
    CHECK_THROWS_AS(parse_json("{", "x.json"), ConfigError);
}

TEST_CASE("spectrum run writes deterministic files")
{
    TempDir tmp;
    const fs::path cfg = write(tmp.path, "h.toml", harmonic_toml);
    RunOptions o;
    o.timings = false;
    o.threads = 1;
    o.output_dir = tmp.path / "a";
    std::ostringstream out, err;
    REQUIRE(run_spectrum(cfg, o, out, err) == exit_ok);
    o.threads = 3;
    o.output_dir = tmp.path / "b";
    REQUIRE(run_spectrum(cfg, o, out, err) == exit_ok);
    const std::string csv = slurp(tmp.path / "a" / "spectrum.csv");
    CHECK(csv == slurp(tmp.path / "b" / "spectrum.csv"));
    CHECK(slurp(tmp.path / "a" / "spectrum.json") == slurp(tmp.path / "b" / "spectrum.json"));
    CHECK(csv.rfind("n,E[hbar_omega],E_raw,ReF,parity,iterations,residual,status\n", 0) == 0);
    CHECK(csv.find("\n0,0.5") != std::string::npos);
    CHECK(csv.find("\n3,3.5") != std::string::npos);

    // re-running from the JSON echo reproduces the CSV
    o.output_dir = tmp.path / "c";
    REQUIRE(run_spectrum(tmp.path / "a" / "spectrum.json", o, out, err) == exit_ok);
    CHECK(slurp(tmp.path / "c" / "spectrum.csv") == csv);
}

TEST_CASE("wavefunction run writes states and moments")
{
    TempDir tmp;
    const fs::path cfg = write(tmp.path, "h.toml", harmonic_toml);
    RunOptions o;
    o.threads = 2;
    o.output_dir = tmp.path;
    o.format = "csv";
    std::ostringstream out, err;
    REQUIRE(run_wavefunctions(cfg, o, out, err) == exit_ok);
    CHECK(fs::exists(tmp.path / "psi_0.csv"));
    CHECK(fs::exists(tmp.path / "psi_2.csv"));
    CHECK_FALSE(fs::exists(tmp.path / "psi_1.csv"));
    const std::string moments = slurp(tmp.path / "moments.csv");
    CHECK(moments.rfind("n,norm,r_mean,r2_mean,sigma_r,nodes\n", 0) == 0);
    const std::string psi0 = slurp(tmp.path / "psi_0.csv");
    CHECK(psi0.rfind("x,psi\n", 0) == 0);
    CHECK(std::count(psi0.begin(), psi0.end(), '\n') == 102);
}

TEST_CASE("exit codes")
{
    TempDir tmp;
    std::ostringstream out, err;
    RunOptions o;
    o.threads = 1;
    o.output_dir = tmp.path / "out";

    const fs::path bad = write(tmp.path, "bad.toml", replace(harmonic_toml, "v0 = -1.0\n", ""));
    CHECK(run_spectrum(bad, o, out, err) == exit_config);
    CHECK(err.str().find("v0") != std::string::npos);

    CHECK(run_spectrum(tmp.path / "missing.toml", o, out, err) == exit_config);

    const fs::path many = write(tmp.path, "many.toml", replace(harmonic_toml, "states = [0, 2]", "states = [9]"));
    CHECK(run_wavefunctions(many, o, out, err) == exit_nonconvergence);

    const fs::path good = write(tmp.path, "good.toml", harmonic_toml);
    write(tmp.path, "file", "x");
    o.output_dir = tmp.path / "file" / "sub";
    CHECK(run_spectrum(good, o, out, err) == exit_io);
}

TEST_CASE("selfcheck passes")
{
    std::ostringstream out;
    CHECK(run_selfcheck({}, out) == exit_ok);
    CHECK(out.str().find("FAIL") == std::string::npos);
}
