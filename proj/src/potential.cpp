#include "smx/potential.hpp"

#include <cmath>
#include <fmt/format.h>

namespace smx {

namespace {

real param_or(const std::map<std::string, real>& params, const std::string& key, real fallback)
{
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

int integer_param(const std::map<std::string, real>& params, const std::string& key, int fallback)
{
    const real v = param_or(params, key, fallback);
    if (v != std::floor(v) || v < 0)
        throw ParameterError(fmt::format("parameter '{}' must be a non-negative integer, got {}", key, v));
    return static_cast<int>(v);
}

void check_radial_bounds(real h1, real h2)
{
    if (!(h1 > 0) || !(h2 > h1) || !std::isfinite(h2))
        throw ParameterError(fmt::format("radial domain needs 0 < h1 < h2 < inf, got [{}, {}]", h1, h2));
}

} // namespace

real default_lj_depth()
{
    return 1e4 / std::pow(2.0, 4.0 / 3.0);
}

TaylorSeries<real> PotentialModel::expand(real energy, real center, int order, real scale) const
{
    if (order < 0)
        throw ParameterError("expansion order must be >= 0");
    if (!std::isfinite(energy))
        throw ParameterError("expansion energy must be finite");
    if (!(scale > 0) || !std::isfinite(scale))
        throw ParameterError("expansion scale must be positive and finite");
    if (!(center > lo_ && center < hi_))
        throw DomainError(fmt::format("expansion center {} outside domain ({}, {})", center, lo_, hi_));

    std::vector<real> v(static_cast<std::size_t>(order) + 1, 0.0);
    if (provider_) {
        TaylorSeries<real> pot;
        try {
            pot = provider_(TaylorSeries<real>::variable(center, order, scale));
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw SingularityError(fmt::format("potential provider failed at x = {}: {}", center, e.what()));
        }
        if (pot.order() != order)
            throw SingularityError(fmt::format("potential provider returned order {} instead of {}",
                                               pot.order(), order));
        for (int mu = 0; mu <= order; ++mu)
            v[static_cast<std::size_t>(mu)] = -2.0 * pot[static_cast<std::size_t>(mu)];
    } else {
        for (const PowerTerm& t : terms_) {
            const auto c = power_law_coeffs(t.coeff, t.p, center, order, scale);
            for (std::size_t mu = 0; mu < v.size(); ++mu)
                v[mu] -= 2.0 * c[mu];
        }
    }
    v[0] += 2.0 * energy;

    TaylorSeries<real> out(center, std::move(v), scale);
    if (!out.all_finite())
        throw SingularityError(fmt::format("non-finite Taylor coefficient of the potential at x = {}", center));
    return out;
}

real PotentialModel::value(real x) const
{
    return -0.5 * expand(0.0, x, 0)[0];
}

PotentialModel make_harmonic(real omega)
{
    if (!(omega > 0) || !std::isfinite(omega))
        throw ParameterError(fmt::format("harmonic: omega must be > 0, got {}", omega));
    PotentialModel m;
    m.name_ = "harmonic";
    m.terms_ = {{0.5 * omega * omega, -2}};
    m.left_ = Closure::constant();
    m.right_ = Closure::constant();
    m.well_center_ = 0.0;
    m.symmetric_ = true;
    m.energy_unit_ = omega;
    m.energy_unit_label_ = "hbar_omega";
    m.length_unit_ = 1.0 / std::sqrt(omega);
    m.params_ = {{"omega", omega}};
    return m;
}

PotentialModel make_hydrogen(int l, real h1, real h2)
{
    if (l < 0)
        throw ParameterError("hydrogen_effective: l must be >= 0");
    check_radial_bounds(h1, h2);
    PotentialModel m;
    m.name_ = "hydrogen_effective";
    if (l > 0)
        m.terms_.push_back({0.5 * l * (l + 1), 2});
    m.terms_.push_back({-1.0, 1});
    m.lo_ = h1;
    m.hi_ = h2;
    m.left_ = Closure::barrier();
    m.right_ = Closure::step(0.0);
    m.asymptote_ = 0.0;
    // minimum of l(l+1)/2r^2 - 1/r; for l = 0 the Bohr radius
    m.well_center_ = l > 0 ? static_cast<real>(l * (l + 1)) : 1.0;
    m.energy_unit_ = -0.5;
    m.energy_unit_label_ = "E1";
    m.length_unit_ = 1.0;
    m.params_ = {{"l", static_cast<real>(l)}, {"h1", h1}, {"h2", h2}};
    return m;
}

PotentialModel make_lennard_jones(int l, real h1, real h2, real epsilon, real sigma)
{
    if (l < 0)
        throw ParameterError("lennard_jones: l must be >= 0");
    if (!(epsilon > 0) || !(sigma > 0))
        throw ParameterError(fmt::format("lennard_jones: need epsilon > 0 and sigma > 0, got {}, {}", epsilon, sigma));
    check_radial_bounds(h1 * sigma, h2 * sigma);
    PotentialModel m;
    m.name_ = "lennard_jones";
    const real s6 = std::pow(sigma, 6);
    m.terms_ = {{4.0 * epsilon * s6 * s6, 12}, {-4.0 * epsilon * s6, 6}};
    if (l > 0)
        m.terms_.push_back({0.5 * l * (l + 1), 2});
    m.lo_ = h1 * sigma;
    m.hi_ = h2 * sigma;
    m.left_ = Closure::barrier();
    m.right_ = Closure::step(0.0);
    m.asymptote_ = 0.0;

    // Newton on V'(r) = 0 from the l = 0 minimum
    real r = std::pow(2.0, 1.0 / 6.0) * sigma;
    if (l > 0) {
        for (int it = 0; it < 50; ++it) {
            const auto d = m.expand(0.0, r, 2);
            const real step = d[1] / (2.0 * d[2]);
            r -= step;
            if (std::abs(step) < 1e-15 * r)
                break;
        }
    }
    m.well_center_ = r;
    m.energy_unit_ = epsilon;
    m.energy_unit_label_ = "eps_LJ";
    m.length_unit_ = sigma;
    m.params_ = {{"l", static_cast<real>(l)}, {"h1", h1}, {"h2", h2}, {"epsilon", epsilon}, {"sigma", sigma}};
    return m;
}

PotentialModel make_builtin(const std::string& name, const std::map<std::string, real>& params)
{
    if (name == "harmonic")
        return make_harmonic(param_or(params, "omega", 1.0));
    if (name == "hydrogen_effective" || name == "hydrogen")
        return make_hydrogen(integer_param(params, "l", 1), param_or(params, "h1", 9.7844e-11),
                             param_or(params, "h2", 20200.0));
    if (name == "lennard_jones")
        return make_lennard_jones(integer_param(params, "l", 0), param_or(params, "h1", 0.22),
                                  param_or(params, "h2", 200.0), param_or(params, "epsilon", default_lj_depth()),
                                  param_or(params, "sigma", 1.0));
    throw ParameterError(fmt::format("unknown built-in potential '{}'", name));
}

PotentialModel make_custom(SeriesProvider provider, real lo, real hi, Closure left, Closure right,
                           real asymptote, std::optional<real> well_center)
{
    if (!provider)
        throw ParameterError("custom potential needs a series provider");
    if (!(lo < hi))
        throw ParameterError(fmt::format("custom potential: domain_lo {} must be < domain_hi {}", lo, hi));
    PotentialModel m;
    m.name_ = "custom";
    m.provider_ = std::move(provider);
    m.lo_ = lo;
    m.hi_ = hi;
    m.left_ = left;
    m.right_ = right;
    m.asymptote_ = asymptote;
    m.well_center_ = well_center;
    return m;
}

} // namespace smx
