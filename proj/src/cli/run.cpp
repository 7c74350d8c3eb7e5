#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

#include "smx/cli.hpp"
#include "smx/parallel.hpp"

namespace smx::cli {

namespace {

using json = nlohmann::json;
using clock = std::chrono::steady_clock;

std::string g17(real v)
{
    return fmt::format("{:.17g}", v);
}

struct Prepared {
    RunConfig cfg;
    PotentialModel model;
    ScanConfig scan;
    std::filesystem::path out_dir;
    bool csv = true;
    bool json = true;
};

Prepared prepare(const std::filesystem::path& path, const RunOptions& opts)
{
    Prepared p;
    p.cfg = load_config(path);
    p.model = build_model(p.cfg);
    try {
        p.scan = build_scan(p.cfg, p.model, opts.threads ? opts.threads : default_threads());
    } catch (const ParameterError& e) {
        throw ConfigError(fmt::format("{}: {}", p.cfg.origin, e.what()));
    }
    p.out_dir = opts.output_dir ? *opts.output_dir : p.cfg.output.dir;
    if (opts.format) {
        p.csv = *opts.format != "json";
        p.json = *opts.format != "csv";
    } else {
        const auto& f = p.cfg.output.formats;
        p.csv = std::find(f.begin(), f.end(), "csv") != f.end();
        p.json = std::find(f.begin(), f.end(), "json") != f.end();
    }
    return p;
}

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw OutputError(fmt::format("cannot create output directory '{}': {}", dir.string(),
                                      ec ? ec.message() : "not a directory"));
}

void write_file(const std::filesystem::path& file, const std::string& content)
{
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out)
        throw OutputError(fmt::format("cannot open '{}' for writing", file.string()));
    out << content;
    out.flush();
    if (!out)
        throw OutputError(fmt::format("write to '{}' failed", file.string()));
}

real natural(const Prepared& p, real e)
{
    return p.cfg.natural_units ? e / p.model.energy_unit() : e;
}

std::string unit_label(const Prepared& p)
{
    return p.cfg.natural_units ? p.model.energy_unit_label() : "raw";
}

std::string spectrum_csv(const Prepared& p, const SpectrumResult& res)
{
    std::string s = fmt::format("n,E[{}],E_raw,ReF,parity,iterations,residual,status\n", unit_label(p));
    for (std::size_t n = 0; n < res.roots.size(); ++n) {
        const EnergyRoot& r = res.roots[n];
        s += fmt::format("{},{},{},{},{},{},{},ok\n", n, g17(natural(p, r.energy)), g17(r.energy), g17(r.re_f),
                         to_string(r.parity), r.iterations, g17(r.residual));
    }
    for (const RefineFailure& f : res.failures) {
        const EnergyRoot& r = f.best;
        s += fmt::format(",{},{},{},{},{},{},nonconverged\n", g17(natural(p, r.energy)), g17(r.energy),
                         g17(r.re_f), to_string(r.parity), r.iterations, g17(r.residual));
    }
    return s;
}

json root_json(const Prepared& p, const EnergyRoot& r)
{
    return {{"energy", natural(p, r.energy)},
            {"energy_raw", r.energy},
            {"re_f", r.re_f},
            {"parity", to_string(r.parity)},
            {"iterations", r.iterations},
            {"residual", r.residual},
            {"converged", r.converged}};
}

json spectrum_json(const Prepared& p, const SpectrumResult& res)
{
    json roots = json::array();
    for (std::size_t n = 0; n < res.roots.size(); ++n) {
        json r = root_json(p, res.roots[n]);
        r["n"] = n;
        roots.push_back(r);
    }
    json failures = json::array();
    for (const RefineFailure& f : res.failures)
        failures.push_back({{"bracket_raw", {f.bracket.lo, f.bracket.hi}},
                            {"best", root_json(p, f.best)},
                            {"message", f.message}});
    return {{"potential", p.model.name()},
            {"energy_unit", {{"label", unit_label(p)}, {"value", p.cfg.natural_units ? p.model.energy_unit() : 1.0}}},
            {"x0", matching_point(p.model, p.scan)},
            {"roots", roots},
            {"failures", failures},
            {"config", to_json(p.cfg)}};
}

void report_failures(const SpectrumResult& res, std::ostream& err)
{
    for (const RefineFailure& f : res.failures)
        fmt::print(err, "error: refinement in [{}, {}] did not converge: {} (best E = {}, |Im F| = {:.3e})\n",
                   g17(f.bracket.lo), g17(f.bracket.hi), f.message, g17(f.best.energy), f.best.residual);
}

template <class Body>
int guarded(std::ostream& err, Body&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        fmt::print(err, "config error: {}\n", e.what());
        return exit_config;
    } catch (const OutputError& e) {
        fmt::print(err, "output error: {}\n", e.what());
        return exit_io;
    } catch (const ParameterError& e) {
        fmt::print(err, "config error: {}\n", e.what());
        return exit_config;
    } catch (const Error& e) {
        fmt::print(err, "error: {}\n", e.what());
        return exit_nonconvergence;
    }
}

std::vector<real> sample_grid(const Prepared& p, const PiecewiseWavefunction& psi)
{
    const real lo = p.cfg.output.sample_min.value_or(psi.validity_lo);
    const real hi = p.cfg.output.sample_max.value_or(psi.validity_hi);
    const int n = p.cfg.output.sample_points;
    std::vector<real> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

} // namespace

int run_spectrum(const std::filesystem::path& config, const RunOptions& opts, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const Prepared p = prepare(config, opts);
        const auto t0 = clock::now();
        const SpectrumResult res = solve_spectrum(p.model, p.scan);
        const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();

        ensure_dir(p.out_dir);
        if (p.csv)
            write_file(p.out_dir / "spectrum.csv", spectrum_csv(p, res));
        if (p.json) {
            json j = spectrum_json(p, res);
            if (opts.timings)
                j["timings"] = {{"solve_s", elapsed}, {"threads", p.scan.threads}};
            write_file(p.out_dir / "spectrum.json", j.dump(2) + "\n");
        }

        fmt::print(out, "{}: {} bound states\n", p.model.name(), res.roots.size());
        for (std::size_t n = 0; n < res.roots.size(); ++n)
            fmt::print(out, "  {:3d}  E = {:<24} {}  parity {}\n", n, g17(natural(p, res.roots[n].energy)),
                       unit_label(p), to_string(res.roots[n].parity));
        fmt::print(out, "solved in {:.2f} s\n", elapsed);
        report_failures(res, err);
        return res.failures.empty() ? exit_ok : exit_nonconvergence;
    });
}

int run_wavefunctions(const std::filesystem::path& config, const RunOptions& opts, std::ostream& out,
                      std::ostream& err)
{
    return guarded(err, [&] {
        const Prepared p = prepare(config, opts);
        const SpectrumResult res = solve_spectrum(p.model, p.scan);
        report_failures(res, err);

        std::vector<int> states;
        if (p.cfg.output.states) {
            states = *p.cfg.output.states;
        } else {
            for (std::size_t n = 0; n < res.roots.size(); ++n)
                states.push_back(static_cast<int>(n));
        }
        for (int n : states)
            if (static_cast<std::size_t>(n) >= res.roots.size()) {
                fmt::print(err, "error: state {} requested but only {} bound states were found\n", n,
                           res.roots.size());
                return static_cast<int>(exit_nonconvergence);
            }

        ReconstructOptions ro;
        ro.mode = p.cfg.reconstruction == "direct" ? ReconstructionMode::direct : ReconstructionMode::stabilized;
        ro.eps_validity = p.cfg.eps_validity;

        struct Built {
            PiecewiseWavefunction psi;
            std::vector<real> xs, values;
            real r1 = 0, r2 = 0, sigma = 0;
            int nodes = 0;
        };
        std::vector<Built> built(states.size());
        parallel_for(states.size(), p.scan.threads, [&](std::size_t i) {
            Built& b = built[i];
            b.psi = normalize(reconstruct(p.model, p.scan, res.roots[static_cast<std::size_t>(states[i])], ro));
            b.xs = sample_grid(p, b.psi);
            b.values = sample(b.psi, b.xs);
            b.r1 = expectation(b.psi, 1);
            b.r2 = expectation(b.psi, 2);
            b.sigma = std_dev_r(b.psi);
            b.nodes = node_count(b.psi);
        });

        ensure_dir(p.out_dir);
        std::string moments = "n,norm,r_mean,r2_mean,sigma_r,nodes\n";
        for (std::size_t i = 0; i < states.size(); ++i) {
            const Built& b = built[i];
            std::string csv = "x,psi\n";
            for (std::size_t j = 0; j < b.xs.size(); ++j)
                csv += fmt::format("{},{}\n", g17(b.xs[j]), g17(b.values[j]));
            write_file(p.out_dir / fmt::format("psi_{}.csv", states[i]), csv);
            moments += fmt::format("{},{},{},{},{},{}\n", states[i], g17(b.psi.norm), g17(b.r1), g17(b.r2),
                                   g17(b.sigma), b.nodes);
            fmt::print(out, "  n = {:3d}  E = {:<24} <r> = {:<20} sigma_r = {:<20} nodes = {}\n", states[i],
                       g17(natural(p, b.psi.energy)), g17(b.r1), g17(b.sigma), b.nodes);
        }
        write_file(p.out_dir / "moments.csv", moments);
        return res.failures.empty() ? static_cast<int>(exit_ok) : static_cast<int>(exit_nonconvergence);
    });
}

} // namespace smx::cli
