#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "smx/cli.hpp"

namespace smx::cli {

namespace {

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("smx");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char* env = std::getenv("SMX_LOG")) {
        level = spdlog::level::from_str(env);
        // from_str maps unknown names to off
        if (level == spdlog::level::off && std::string(env) != "off")
            level = spdlog::level::warn;
    }
    spdlog::set_level(level);
}

} // namespace

int main(int argc, char** argv)
{
    setup_logging();

    CLI::App app{"Bound states of one-dimensional potentials by scattering-matrix composition", "smx"};
    app.require_subcommand(1);
    app.fallthrough();

    RunOptions opts;
    std::string output_dir, format;
    app.add_option("--threads", opts.threads, "worker threads (default: hardware count)")
        ->check(CLI::PositiveNumber);
    app.add_option("--output-dir", output_dir, "directory for result files (overrides [output].dir)");
    app.add_option("--format", format, "output format for the spectrum")->check(CLI::IsMember({"csv", "json", "both"}));
    app.add_flag("!--no-timings", opts.timings, "omit wall-clock timings from spectrum.json");

    std::string config;
    auto* spectrum = app.add_subcommand("spectrum", "scan and refine bound-state energies");
    spectrum->add_option("config", config, "run configuration (TOML or JSON)")->required();
    auto* wavefn = app.add_subcommand("wavefn", "reconstruct, normalize and sample wavefunctions");
    wavefn->add_option("config", config, "run configuration (TOML or JSON)")->required();
    auto* selfcheck = app.add_subcommand("selfcheck", "run the built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    if (!output_dir.empty())
        opts.output_dir = output_dir;
    if (!format.empty())
        opts.format = format;

    if (spectrum->parsed())
        return run_spectrum(config, opts, std::cout, std::cerr);
    if (wavefn->parsed())
        return run_wavefunctions(config, opts, std::cout, std::cerr);
    if (selfcheck->parsed())
        return run_selfcheck(opts, std::cout);
    return exit_config;
}

} // namespace smx::cli
