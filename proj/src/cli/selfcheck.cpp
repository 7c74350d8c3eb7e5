#include <cmath>
#include <functional>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "smx/cli.hpp"

namespace smx::cli {

namespace {

struct Check {
    std::string name;
    std::function<real()> measure; ///< returns the defect
    real tolerance;
};

std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20240611);
    return gen;
}

real uniform(real a, real b)
{
    return std::uniform_real_distribution<real>(a, b)(rng());
}

SegmentS<real> random_slice(real xa, real k)
{
    const real h = uniform(0.02, 0.3);
    std::vector<real> v(5);
    for (real& c : v)
        c = uniform(-5, 5);
    const TaylorSeries<real> series(xa + h, v);
    return slice_smatrix(local_solutions(series, 30, h), k);
}

/// Coefficients of e^{-iqt} (psi'' + w psi) through degree order-2, relative to the largest term.
real series_residual()
{
    const std::vector<real> w{1, 0, -1};
    const TaylorSeries<real> series(0.0, w);
    const auto s = local_solutions(series, 10, 1.0);
    real worst = 0;
    for (int sign : {1, -1}) {
        const auto& phi = sign > 0 ? s.phi_plus : s.phi_minus;
        const complex iq = complex(0, sign) * s.q;
        for (int n = 0; n <= 8; ++n) {
            // P'' + 2 i q P' + (w - w0) P, degree n
            complex r = phi[n + 2] * real((n + 2) * (n + 1)) + 2.0 * iq * phi[n + 1] * real(n + 1);
            real size = std::abs(phi[n + 2]) * (n + 2) * (n + 1) + 2 * std::abs(iq * phi[n + 1]) * (n + 1);
            for (int j = 1; j <= n && j < 3; ++j) {
                r += w[j] * phi[n - j];
                size += std::abs(w[j] * phi[n - j]);
            }
            if (size > 0)
                worst = std::max(worst, std::abs(r) / size);
        }
    }
    return worst;
}

real unitarity()
{
    real worst = 0;
    for (int i = 0; i < 200; ++i) {
        const auto s = random_slice(0, uniform(0.2, 3));
        worst = std::max({worst, std::abs(std::norm(s.s11) + std::norm(s.s21) - 1),
                          std::abs(std::norm(s.s22) + std::norm(s.s12) - 1)});
    }
    return worst;
}

real associativity()
{
    real worst = 0;
    for (int i = 0; i < 200; ++i) {
        const real k = uniform(0.2, 3);
        const auto a = random_slice(0, k);
        const auto b = random_slice(a.xb, k);
        const auto c = random_slice(b.xb, k);
        const auto l = star(star(a, b), c);
        const auto r = star(a, star(b, c));
        worst = std::max({worst, std::abs(l.s11 - r.s11), std::abs(l.s12 - r.s12), std::abs(l.s21 - r.s21),
                          std::abs(l.s22 - r.s22)});
    }
    return worst;
}

real constant_slice()
{
    const real h = 0.3, k = 1.7;
    const TaylorSeries<real> series(0.0, {k * k, 0, 0, 0});
    const auto sol = local_solutions(series, 12, h);
    real worst = 0;
    for (std::size_t l = 1; l < sol.phi_plus.size(); ++l)
        worst = std::max({worst, std::abs(sol.phi_plus[l]), std::abs(sol.phi_minus[l])});
    const auto s = slice_smatrix(sol, k);
    const complex t = std::exp(complex(0, 2 * k * h));
    return std::max({worst, std::abs(s.s11), std::abs(s.s22), std::abs(s.s12 - t), std::abs(s.s21 - t)});
}

real harmonic_ground_state()
{
    const PotentialModel m = make_harmonic(1.0);
    ScanConfig cfg;
    cfg.e_min = 0.1;
    cfg.e_max = 1.0;
    cfg.n_grid = 20;
    cfg.sweep.v0 = -1;
    cfg.sweep.slicing = Slicing::uniform(0.1);
    cfg.symmetric = true;
    const auto res = solve_spectrum(m, cfg);
    if (res.roots.size() != 1)
        return 1;
    return std::abs(res.roots[0].energy - 0.5) / 0.5;
}

} // namespace

int run_selfcheck(const RunOptions&, std::ostream& out)
{
    const std::vector<Check> checks = {
        {"series residual (harmonic, order 10)", series_residual, 1e-13},
        {"slice unitarity (200 random slices)", unitarity, 1e-12},
        {"star associativity (200 random triples)", associativity, 1e-13},
        {"constant-potential slice", constant_slice, 1e-14},
        {"harmonic ground state", harmonic_ground_state, 1e-10},
    };
    bool ok = true;
    for (const Check& c : checks) {
        real defect;
        std::string note;
        try {
            defect = c.measure();
        } catch (const std::exception& e) {
            defect = INFINITY;
            note = fmt::format(" ({})", e.what());
        }
        const bool pass = defect <= c.tolerance;
        ok = ok && pass;
        fmt::print(out, "{}  {:<42} defect {:.2e}  tol {:.0e}{}\n", pass ? "PASS" : "FAIL", c.name, defect,
                   c.tolerance, note);
    }
    fmt::print(out, "{}\n", ok ? "selfcheck passed" : "selfcheck FAILED");
    return ok ? exit_ok : exit_check_failed;
}

} // namespace smx::cli
