// Acceptance suite: one PASS/FAIL line per criterion.
//
//   smx_acceptance                 all criteria
//   smx_acceptance --criterion N   criterion N only

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles/lj_reference.hpp"
#include "oracles/numerov.hpp"
#include "support/configs.hpp"
#include "smx/parallel.hpp"
#include "smx/wavefunction.hpp"

using namespace smx;
using testcfg::rel;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, std::string note)
    {
        pass = pass && ok;
        notes.push_back((ok ? "" : "!! ") + std::move(note));
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

unsigned threads()
{
    return default_threads();
}

// 1. Oscillator, Delta = 0.1, Lambda = 10, M = 2.
Outcome harmonic_spectrum()
{
    Outcome o;
    const PotentialModel m = make_harmonic();
    ScanConfig cfg = testcfg::harmonic();
    cfg.threads = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = solve_spectrum(m, cfg);
    const double dt = seconds_since(t0);
    o.require(res.roots.size() >= 10, fmt::format("{} roots in [0, 10)", res.roots.size()));
    double worst = 0;
    int worst_n = -1;
    bool parity_ok = true;
    for (std::size_t n = 0; n < std::min<std::size_t>(10, res.roots.size()); ++n) {
        const double e = rel(res.roots[n].energy, n + 0.5);
        if (e > worst) {
            worst = e;
            worst_n = static_cast<int>(n);
        }
        parity_ok = parity_ok && res.roots[n].parity == (n % 2 ? Parity::odd : Parity::even);
    }
    o.require(worst <= 1e-12, fmt::format("max relative error {:.3e} (n = {}), tol 1e-12", worst, worst_n));
    o.require(parity_ok, "parity even iff n even");
    o.require(dt < 10, fmt::format("runtime {:.2f} s single-threaded, limit 10 s", dt));
    return o;
}

// 2. Hydrogen, l = 1, n = 2..10.
Outcome hydrogen_spectrum()
{
    Outcome o;
    const PotentialModel m = make_hydrogen(1);
    const ScanConfig cfg = testcfg::hydrogen(threads());
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = solve_spectrum(m, cfg);
    const double dt = seconds_since(t0);
    o.require(res.roots.size() == 9, fmt::format("{} roots", res.roots.size()));
    double worst = 0;
    for (std::size_t i = 0; i < std::min<std::size_t>(9, res.roots.size()); ++i) {
        const double n = static_cast<double>(i + 2);
        worst = std::max(worst, rel(res.roots[i].energy, -0.5 / (n * n)));
    }
    o.require(worst <= 1e-10, fmt::format("max relative error {:.3e}, tol 1e-10", worst));
    o.require(dt < 300, fmt::format("runtime {:.2f} s, limit 300 s", dt));
    return o;
}

std::vector<PiecewiseWavefunction> reconstruct_all(const PotentialModel& m, const ScanConfig& cfg,
                                                   const std::vector<EnergyRoot>& roots)
{
    std::vector<PiecewiseWavefunction> out(roots.size());
    parallel_for(roots.size(), threads(), [&](std::size_t i) { out[i] = normalize(reconstruct(m, cfg, roots[i])); });
    return out;
}

// 3. Lennard-Jones energies and moments.
Outcome lennard_jones_table()
{
    Outcome o;
    const PotentialModel m = make_lennard_jones(0);
    const ScanConfig cfg = testcfg::lennard_jones(threads());
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = solve_spectrum(m, cfg);
    o.require(res.roots.size() == 19, fmt::format("{} roots", res.roots.size()));
    const std::size_t n = std::min<std::size_t>(19, res.roots.size());
    double worst_e = 0;
    for (std::size_t i = 0; i < n; ++i)
        worst_e = std::max(worst_e,
                           rel(res.roots[i].energy / default_lj_depth(), reference::lennard_jones_levels[i].energy));
    o.require(worst_e <= 1e-13, fmt::format("max relative energy error {:.3e}, tol 1e-13", worst_e));

    const auto psi = reconstruct_all(m, cfg, {res.roots.begin(), res.roots.begin() + static_cast<long>(n)});
    double worst_r = 0, worst_s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        worst_r = std::max(worst_r, rel(expectation(psi[i], 1), reference::lennard_jones_levels[i].r_mean));
        worst_s = std::max(worst_s, rel(std_dev_r(psi[i]), reference::lennard_jones_levels[i].sigma_r));
    }
    const double dt = seconds_since(t0);
    o.require(worst_r <= 1e-6, fmt::format("max relative <r> error {:.3e}, tol 1e-6", worst_r));
    o.require(worst_s <= 1e-6, fmt::format("max relative sigma_r error {:.3e}, tol 1e-6", worst_s));
    o.require(dt < 900, fmt::format("runtime {:.2f} s, limit 900 s", dt));
    return o;
}

// 4. Independent finite-difference shooting on a 1e-4 sigma grid.
Outcome numerov_oracle()
{
    Outcome o;
    const double eps = default_lj_depth();
    auto v = [eps](double r) {
        const double s6 = std::pow(r, -6);
        return 4 * eps * (s6 * s6 - s6);
    };
    const oracle::NumerovShooter shooter(v, 0.6, 12.0, 1e-4);

    const PotentialModel m = make_lennard_jones(0);
    const auto res = solve_spectrum(m, testcfg::lennard_jones(threads()));
    o.require(res.roots.size() == 19, fmt::format("{} roots from the solver", res.roots.size()));
    const std::size_t n = std::min<std::size_t>(19, res.roots.size());
    std::vector<double> fd(n);
    parallel_for(n, threads(), [&](std::size_t i) {
        fd[i] = shooter.level(static_cast<int>(i), -0.999 * eps, -0.001 * eps);
    });
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, rel(res.roots[i].energy, fd[i]));
    o.require(worst <= 1e-6, fmt::format("max relative deviation from the shooting oracle {:.3e}, tol 1e-6", worst));
    return o;
}

// 5. Wavefunction properties for every reconstructed state.
Outcome wavefunction_properties()
{
    Outcome o;
    struct Case {
        std::string name;
        PotentialModel model;
        ScanConfig cfg;
    };
    std::vector<Case> cases;
    cases.push_back({"harmonic", make_harmonic(), testcfg::harmonic()});
    cases.push_back({"hydrogen", make_hydrogen(1), testcfg::hydrogen(threads())});
    cases.push_back({"lennard_jones", make_lennard_jones(0), testcfg::lennard_jones(threads())});
    cases[0].cfg.threads = threads();

    for (const Case& c : cases) {
        const auto roots = solve_spectrum(c.model, c.cfg).roots;
        const auto psi = reconstruct_all(c.model, c.cfg, roots);
        double norm = 0, cont = 0, ode = 0, ratio = 0;
        int bad_nodes = 0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            norm = std::max(norm, std::abs(norm_integral(psi[i]) - 1));
            const auto d = continuity_defect(psi[i]);
            cont = std::max({cont, d.value, d.derivative});
            ode = std::max(ode, ode_residual(psi[i], c.model));
            ratio = std::max(ratio, std::abs(matching_ratio(psi[i]) - psi[i].phase_right));
            bad_nodes += node_count(psi[i]) != static_cast<int>(i);
        }
        o.require(!psi.empty(), fmt::format("{}: {} states", c.name, psi.size()));
        o.require(norm <= 1e-10, fmt::format("{}: |norm - 1| {:.2e}, tol 1e-10", c.name, norm));
        o.require(bad_nodes == 0, fmt::format("{}: {} states with wrong node count", c.name, bad_nodes));
        o.require(cont <= 1e-9, fmt::format("{}: continuity {:.2e}, tol 1e-9", c.name, cont));
        o.require(ode <= 1e-8, fmt::format("{}: ODE residual {:.2e}, tol 1e-8", c.name, ode));
        o.require(ratio <= 1e-8, fmt::format("{}: matching ratio vs S^R {:.2e}, tol 1e-8", c.name, ratio));
    }
    return o;
}

// 6. Randomized S-matrix algebra.
Outcome smatrix_algebra()
{
    Outcome o;
    constexpr int cases = 10000;
    std::mt19937_64 gen(31337);
    std::uniform_real_distribution<double> u(0, 1);
    auto random_slice = [&](double xa, double k) {
        const double h = 0.02 + 0.28 * u(gen);
        std::vector<double> v(5);
        for (double& c : v)
            c = -5 + 10 * u(gen);
        auto s = slice_smatrix(local_solutions(TaylorSeries<double>(xa + h, v), 30, h), k);
        return s;
    };
    double unit = 0, recip = 0, assoc = 0, ident = 0, closure = 0;
    for (int i = 0; i < cases; ++i) {
        const double k = 0.2 + 2.8 * u(gen);
        const auto a = random_slice(0.0, k);
        const auto b = random_slice(a.xb, k);
        const auto c = random_slice(b.xb, k);
        unit = std::max({unit, std::abs(std::norm(a.s11) + std::norm(a.s21) - 1),
                         std::abs(std::norm(a.s22) + std::norm(a.s12) - 1)});
        recip = std::max(recip, std::abs(a.s12 - a.s21));
        const auto l = star(star(a, b), c), r = star(a, star(b, c));
        assoc = std::max({assoc, std::abs(l.s11 - r.s11), std::abs(l.s12 - r.s12), std::abs(l.s21 - r.s21),
                          std::abs(l.s22 - r.s22)});
        const auto id = star(star(SegmentS<double>::identity(a.xa, k), a), SegmentS<double>::identity(a.xb, k));
        ident = std::max({ident, std::abs(id.s11 - a.s11), std::abs(id.s12 - a.s12), std::abs(id.s21 - a.s21),
                          std::abs(id.s22 - a.s22)});

        const double h = 0.01 + 0.5 * u(gen);
        const auto f = slice_smatrix(local_solutions(TaylorSeries<double>(0.0, {k * k, 0, 0}), 10, h), k);
        const auto p = close_right(f, barrier_phase(h, k));
        closure = std::max(closure, std::abs(p.value + std::exp(complex(0, 4 * k * h))));
    }
    o.require(unit <= 1e-12, fmt::format("unitarity {:.2e}, tol 1e-12", unit));
    o.require(recip <= 1e-12, fmt::format("reciprocity {:.2e}, tol 1e-12", recip));
    o.require(assoc <= 1e-13, fmt::format("associativity {:.2e}, tol 1e-13", assoc));
    o.require(ident <= 1e-15, fmt::format("identity composition {:.2e}, tol 1e-15", ident));
    o.require(closure <= 1e-14, fmt::format("free slice + barrier {:.2e}, tol 1e-14", closure));
    o.notes.insert(o.notes.begin(), fmt::format("{} randomized cases", cases));
    return o;
}

// 7. Robustness.
Outcome robustness()
{
    Outcome o;
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> u(-5, 5);

    double constant = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto s = local_solutions(TaylorSeries<double>(0.0, {u(gen), 0, 0, 0}), 20, 0.05 + std::abs(u(gen)) / 10);
        for (int l = 1; l <= 20; ++l)
            constant = std::max({constant, std::abs(s.phi_plus[l]), std::abs(s.phi_minus[l])});
    }
    o.require(constant == 0, fmt::format("constant slice max |phi_l|, l >= 1: {:.1e}, required 0", constant));

    double branch = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> v(5);
        for (double& c : v)
            c = u(gen);
        const double h = 0.05 + std::abs(u(gen)) / 20;
        const auto sol = local_solutions(TaylorSeries<double>(0.0, v), 30, h);
        std::vector<double> w(v);
        double f = h * h;
        for (double& c : w) {
            c *= f;
            f *= h;
        }
        SeriesSolutionPair<double> flipped = sol;
        flipped.q = -sol.q;
        flipped.phi_plus = detail::series_recursion(w, flipped.q_scaled(), 30, +1);
        flipped.phi_minus = detail::series_recursion(w, flipped.q_scaled(), 30, -1);
        const double k = 0.3 + std::abs(u(gen)) / 2;
        const auto a = slice_smatrix(sol, k), b = slice_smatrix(flipped, k);
        branch = std::max({branch, std::abs(a.s11 - b.s11), std::abs(a.s12 - b.s12), std::abs(a.s21 - b.s21),
                           std::abs(a.s22 - b.s22)});
    }
    o.require(branch <= 1e-13, fmt::format("branch flip q -> -q {:.2e}, tol 1e-13", branch));

    double grid = 0;
    {
        const PotentialModel ho = make_harmonic();
        const PotentialModel lj = make_lennard_jones(0);
        for (auto [model, cfg] : {std::pair{&ho, testcfg::harmonic()}, std::pair{&lj, testcfg::lennard_jones(0)}}) {
            cfg.threads = threads();
            ScanConfig doubled = cfg;
            doubled.n_grid *= 2;
            const auto a = solve_spectrum(*model, cfg).roots;
            const auto b = solve_spectrum(*model, doubled).roots;
            if (a.size() != b.size()) {
                grid = INFINITY;
                continue;
            }
            for (std::size_t i = 0; i < a.size(); ++i)
                grid = std::max(grid, rel(a[i].energy, b[i].energy));
        }
    }
    o.require(grid <= 1e-12, fmt::format("doubling n_grid {:.2e}, tol 1e-12", grid));

    double trunc = 0;
    {
        const PotentialModel lj = make_lennard_jones(0);
        const PotentialModel ho = make_harmonic();
        const double eps_trunc = 1e-40;
        auto check = [&](const PotentialModel& m, SweepOptions s, double x0, double e) {
            s.eps_trunc = eps_trunc;
            SweepOptions half = s;
            half.eps_trunc = eps_trunc / 2;
            for (Side side : {Side::left, Side::right}) {
                const auto a = sweep_halfline(m, e, x0, side, s).phase.value;
                const auto b = sweep_halfline(m, e, x0, side, half).phase.value;
                trunc = std::max(trunc, std::abs(a - b) / eps_trunc);
            }
        };
        for (int i = 0; i < 20; ++i) {
            check(lj, testcfg::lennard_jones(1).sweep, *lj.well_center(), (-0.94 + 0.045 * i) * default_lj_depth());
            check(ho, testcfg::harmonic().sweep, 0.0, 0.2 + 0.45 * i);
        }
    }
    o.require(trunc <= 10, fmt::format("halving eps_trunc: max change {:.2e} eps_trunc, tol 10 eps_trunc", trunc));
    return o;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all = {
        {1, "harmonic oscillator spectrum", harmonic_spectrum},
        {2, "hydrogen l = 1 spectrum", hydrogen_spectrum},
        {3, "Lennard-Jones energies and moments", lennard_jones_table},
        {4, "finite-difference shooting oracle", numerov_oracle},
        {5, "wavefunction properties", wavefunction_properties},
        {6, "S-matrix algebra", smatrix_algebra},
        {7, "robustness", robustness},
    };

    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }

    bool ok = true;
    int ran = 0;
    for (const Criterion& c : all) {
        if (only && c.id != only)
            continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r.require(false, fmt::format("exception: {}", e.what()));
        }
        ok = ok && r.pass;
        std::string detail;
        for (const auto& n : r.notes)
            detail += (detail.empty() ? "" : "; ") + n;
        fmt::print("{} criterion {}: {} [{:.1f} s] {}\n", r.pass ? "PASS" : "FAIL", c.id, c.title, seconds_since(t0),
                   detail);
        std::fflush(stdout);
    }
    if (!ran) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    return ok ? 0 : 1;
}
