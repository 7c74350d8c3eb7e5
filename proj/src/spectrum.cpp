#include "smx/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "smx/parallel.hpp"

namespace smx {

const char* to_string(Parity p)
{
    switch (p) {
    case Parity::even:
        return "even";
    case Parity::odd:
        return "odd";
    case Parity::none:
        break;
    }
    return "none";
}

real matching_point(const PotentialModel& model, const ScanConfig& cfg)
{
    if (cfg.x0)
        return *cfg.x0;
    if (auto c = model.well_center())
        return *c;
    throw ParameterError("x0 not given and the potential has no well center");
}

void validate(const PotentialModel& model, const ScanConfig& cfg)
{
    if (!(cfg.e_min < cfg.e_max))
        throw ParameterError(fmt::format("e_min ({}) must be < e_max ({})", cfg.e_min, cfg.e_max));
    if (!(cfg.sweep.v0 < cfg.e_min))
        throw ParameterError(fmt::format("v0 ({}) must be < e_min ({})", cfg.sweep.v0, cfg.e_min));
    if (!(cfg.e_max < model.asymptote()))
        throw ParameterError(fmt::format("e_max ({}) must be below the potential asymptote ({})", cfg.e_max,
                                         model.asymptote()));
    if (cfg.n_grid < 2)
        throw ParameterError("n_grid must be >= 2");
    if (cfg.sweep.taylor_order < 0)
        throw ParameterError("taylor_order must be >= 0");
    if (cfg.sweep.lambda_order < 3 || cfg.sweep.lambda_order < cfg.sweep.taylor_order + 2)
        throw ParameterError("lambda_order must be >= max(3, taylor_order + 2)");
    if (!(cfg.sweep.eps_trunc > 0))
        throw ParameterError("eps_trunc must be > 0");
    if (!(cfg.refine_tol > 0))
        throw ParameterError("refine_tol must be > 0");
    if (cfg.max_iter < 1)
        throw ParameterError("max_iter must be >= 1");
    const real x0 = matching_point(model, cfg);
    if (!(x0 > model.domain_lo() && x0 < model.domain_hi()))
        throw ParameterError(fmt::format("x0 ({}) must lie inside the domain", x0));
}

namespace {

complex eval_once(const PotentialModel& model, const ScanConfig& cfg, real energy)
{
    const real x0 = matching_point(model, cfg);
    SweepOptions opts = cfg.sweep;
    opts.keep_trace = false;
    const complex right = sweep_halfline(model, energy, x0, Side::right, opts).phase.value;
    if (cfg.symmetric)
        return right;
    const complex left = sweep_halfline(model, energy, x0, Side::left, opts).phase.value;
    return left * right;
}

real imag_part(complex f) { return f.imag(); }

bool negative(real g) { return std::signbit(g); }

} // namespace

complex eval_condition(const PotentialModel& model, const ScanConfig& cfg, real energy)
{
    // An exact cavity resonance is perturbed away by a few ulps.
    real e = energy;
    for (int attempt = 0;; ++attempt) {
        try {
            return eval_once(model, cfg, e);
        } catch (const ResonanceError&) {
            if (attempt == 3)
                throw;
            e = std::nextafter(std::nextafter(e, std::numeric_limits<real>::infinity()),
                               std::numeric_limits<real>::infinity());
            spdlog::debug("resonance at E = {:.17g}, retrying at {:.17g}", energy, e);
        }
    }
}

std::vector<Bracket> scan(const PotentialModel& model, const ScanConfig& cfg)
{
    validate(model, cfg);
    const std::size_t n = static_cast<std::size_t>(cfg.n_grid);
    std::vector<real> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = i + 1 == n ? cfg.e_max
                             : cfg.e_min + (cfg.e_max - cfg.e_min) * static_cast<real>(i) / static_cast<real>(n - 1);
    std::vector<complex> f(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) { f[i] = eval_condition(model, cfg, grid[i]); });

    std::vector<Bracket> out;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (negative(imag_part(f[i])) == negative(imag_part(f[i + 1])))
            continue;
        if (!cfg.symmetric && !(f[i].real() > 0 && f[i + 1].real() > 0))
            continue;
        out.push_back({grid[i], grid[i + 1], f[i], f[i + 1]});
    }
    spdlog::debug("scan [{}, {}] with {} points: {} brackets", cfg.e_min, cfg.e_max, n, out.size());
    return out;
}

EnergyRoot refine(const PotentialModel& model, const ScanConfig& cfg, const Bracket& bracket,
                  std::vector<Bracket>* history)
{
    real a = bracket.lo, b = bracket.hi;
    complex fa = bracket.f_lo, fb = bracket.f_hi;
    if (history)
        history->push_back({a, b, fa, fb});

    auto finish = [&](real e, complex f, int iters, bool converged) {
        EnergyRoot r;
        r.energy = e;
        r.re_f = f.real();
        r.residual = std::abs(f.imag());
        r.iterations = iters;
        r.converged = converged;
        if (cfg.symmetric)
            r.parity = f.real() > 0 ? Parity::even : Parity::odd;
        return r;
    };

    if (std::abs(fa.imag()) <= cfg.refine_tol)
        return finish(a, fa, 0, true);
    if (std::abs(fb.imag()) <= cfg.refine_tol)
        return finish(b, fb, 0, true);
    if (negative(fa.imag()) == negative(fb.imag()))
        throw ParameterError(fmt::format("refine: no sign change of Im F on [{}, {}]", a, b));

    real x_prev = a, x_cur = b;
    real g_prev = fa.imag(), g_cur = fb.imag();
    real best_x = std::abs(fa.imag()) < std::abs(fb.imag()) ? a : b;
    complex best_f = std::abs(fa.imag()) < std::abs(fb.imag()) ? fa : fb;

    for (int it = 1; it <= cfg.max_iter; ++it) {
        real x = x_cur - g_cur * (x_cur - x_prev) / (g_cur - g_prev);
        if (!(x > a && x < b)) {
            const real ga = fa.imag(), gb = fb.imag();
            x = (a * gb - b * ga) / (gb - ga);
            if (!(x > a && x < b))
                x = 0.5 * (a + b);
        }
        const complex f = eval_condition(model, cfg, x);
        const real g = f.imag();

        if (negative(g) == negative(fa.imag())) {
            a = x;
            fa = f;
        } else {
            b = x;
            fb = f;
        }
        if (history)
            history->push_back({a, b, fa, fb});
        x_prev = x_cur;
        g_prev = g_cur;
        x_cur = x;
        g_cur = g;
        if (std::abs(g) < std::abs(best_f.imag())) {
            best_x = x;
            best_f = f;
        }
        if (std::abs(g) <= cfg.refine_tol)
            return finish(x, f, it, true);
        // bracket resolved to a few ulps: the root is pinned at working precision
        if (b - a <= 4 * std::numeric_limits<real>::epsilon() * std::max(std::abs(a), std::abs(b)))
            return finish(best_x, best_f, it, true);
        if (g == g_prev)
            break;
    }
    return finish(best_x, best_f, cfg.max_iter, false);
}

SpectrumResult solve_spectrum(const PotentialModel& model, const ScanConfig& cfg)
{
    const auto brackets = scan(model, cfg);
    std::vector<EnergyRoot> roots(brackets.size());
    std::vector<std::string> errors(brackets.size());
    parallel_for(brackets.size(), cfg.threads, [&](std::size_t i) {
        try {
            roots[i] = refine(model, cfg, brackets[i]);
        } catch (const Error& e) {
            errors[i] = e.what();
            roots[i].converged = false;
            roots[i].energy = 0.5 * (brackets[i].lo + brackets[i].hi);
        }
    });

    SpectrumResult res;
    for (std::size_t i = 0; i < brackets.size(); ++i) {
        const EnergyRoot& r = roots[i];
        if (!errors[i].empty() || !r.converged) {
            res.failures.push_back({brackets[i], r,
                                    errors[i].empty() ? fmt::format("refinement did not converge in {} iterations",
                                                                    cfg.max_iter)
                                                      : errors[i]});
            continue;
        }
        // a refined crossing with Re F = -1 is not a state of the full well
        if (!cfg.symmetric && !(r.re_f > 0))
            continue;
        res.roots.push_back(r);
    }
    std::sort(res.roots.begin(), res.roots.end(),
              [](const EnergyRoot& x, const EnergyRoot& y) { return x.energy < y.energy; });
    auto dup = [](const EnergyRoot& x, const EnergyRoot& y) {
        return std::abs(x.energy - y.energy) <= 1e-12 * std::max(std::abs(x.energy), std::abs(y.energy));
    };
    res.roots.erase(std::unique(res.roots.begin(), res.roots.end(), dup), res.roots.end());
    return res;
}

} // namespace smx
