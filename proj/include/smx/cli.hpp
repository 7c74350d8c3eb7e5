#pragma once

// Run configuration and the `smx` subcommands.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smx/spectrum.hpp"
#include "smx/wavefunction.hpp"

namespace smx::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_check_failed = 1,
    exit_config = 2,
    exit_nonconvergence = 3,
    exit_io = 4,
};

/// Bad configuration; `what()` already carries the source location.
class ConfigError : public Error {
public:
    using Error::Error;
};

class OutputError : public Error {
public:
    using Error::Error;
};

struct OutputConfig {
    std::filesystem::path dir = ".";
    std::vector<std::string> formats{"csv", "json"};
    std::optional<std::vector<int>> states; ///< wavefn: default all roots
    int sample_points = 1001;
    std::optional<real> sample_min, sample_max;
};

struct RunConfig {
    std::string origin; ///< file name for diagnostics
    std::string potential;
    std::map<std::string, real> params;
    bool natural_units = true; ///< energies in the potential's natural unit
    // as written by the user, before unit conversion
    real v0 = 0, e_min = 0, e_max = 0;
    std::optional<real> x0;
    std::string slicing = "uniform";
    real half_width = 0.1;
    real ratio = 100;
    int taylor_order = 2;
    int lambda_order = 10;
    real eps_trunc = 1e-40;
    real eps_validity = 1e-12;
    std::string reconstruction = "stabilized";
    int n_grid = 200;
    real refine_tol = 1e-14;
    int max_iter = 60;
    bool symmetric = false;
    OutputConfig output;
};

/// TOML, or JSON (a spectrum.json is accepted through its "config" member).
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_toml(const std::string& text, const std::string& origin);
RunConfig parse_json(const std::string& text, const std::string& origin);

/// Canonical echo with every default filled in; parse_json(echo) reproduces the run.
nlohmann::json to_json(const RunConfig& cfg);

PotentialModel build_model(const RunConfig& cfg);
ScanConfig build_scan(const RunConfig& cfg, const PotentialModel& model, unsigned threads);

struct RunOptions {
    unsigned threads = 0; ///< 0: hardware count
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::string> format; ///< csv, json or both
    bool timings = true;
};

int run_spectrum(const std::filesystem::path& config, const RunOptions& opts, std::ostream& out,
                 std::ostream& err);
int run_wavefunctions(const std::filesystem::path& config, const RunOptions& opts, std::ostream& out,
                      std::ostream& err);
int run_selfcheck(const RunOptions& opts, std::ostream& out);

/// `smx` entry point.
int main(int argc, char** argv);

} // namespace smx::cli
