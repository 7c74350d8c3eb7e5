#pragma once

// Potential models in units hbar = m = 1.  A model yields, on demand, the
// Taylor coefficients of the scaled term v(x) = 2m[E - V(x)]/hbar^2 about any
// interior point, together with its domain and the closures that terminate
// each half-line.

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smx/scalar.hpp"
#include "smx/taylor.hpp"

namespace smx {

enum class ClosureKind {
    barrier,  ///< infinite wall, phase -1
    step,     ///< constant level V1 above E, phase (ik + kappa)/(ik - kappa)
    constant, ///< potential continues at the reference level V0, phase 0
};

struct Closure {
    ClosureKind kind = ClosureKind::constant;
    real level = 0; ///< V1 for a step

    static Closure barrier() { return {ClosureKind::barrier, 0}; }
    static Closure step(real v1) { return {ClosureKind::step, v1}; }
    static Closure constant() { return {ClosureKind::constant, 0}; }
};

/// Maps the series of the independent variable x = center + d to the series
/// of V(x).  Built from TaylorSeries arithmetic (+, -, *, /, powi, exp, log).
using SeriesProvider = std::function<TaylorSeries<real>(const TaylorSeries<real>& x)>;

/// c * x^(-p); p <= 0 gives a polynomial term.
struct PowerTerm {
    real coeff;
    int p;
};

class PotentialModel {
public:
    /// v_mu of 2[E - V(x)] about `center`, mu = 0..order.  With scale != 1
    /// the coefficients are those of v(center + scale*t) in t.
    TaylorSeries<real> expand(real energy, real center, int order, real scale = 1) const;

    /// V(x) at a single point.
    real value(real x) const;

    real domain_lo() const { return lo_; }
    real domain_hi() const { return hi_; }
    const Closure& left_closure() const { return left_; }
    const Closure& right_closure() const { return right_; }

    /// Limit of V at the open ends of the well; bound states lie below it.
    real asymptote() const { return asymptote_; }

    /// Preferred matching point (the well minimum for built-ins).
    std::optional<real> well_center() const { return well_center_; }

    /// V(x0 + d) == V(x0 - d) about the well center.
    bool symmetric() const { return symmetric_; }

    const std::string& name() const { return name_; }

    /// Natural energy unit in raw units (hbar*omega, E1, eps_LJ); 1 for custom.
    real energy_unit() const { return energy_unit_; }
    const std::string& energy_unit_label() const { return energy_unit_label_; }

    /// Natural length unit in raw units (1, a, sigma).
    real length_unit() const { return length_unit_; }

    const std::map<std::string, real>& params() const { return params_; }

private:
    friend PotentialModel make_harmonic(real);
    friend PotentialModel make_hydrogen(int, real, real);
    friend PotentialModel make_lennard_jones(int, real, real, real, real);
    friend PotentialModel make_custom(SeriesProvider, real, real, Closure, Closure, real,
                                      std::optional<real>);

    std::string name_;
    real lo_ = -std::numeric_limits<real>::infinity();
    real hi_ = std::numeric_limits<real>::infinity();
    Closure left_;
    Closure right_;
    real asymptote_ = std::numeric_limits<real>::infinity();
    std::optional<real> well_center_;
    bool symmetric_ = false;
    real energy_unit_ = 1;
    std::string energy_unit_label_ = "raw";
    real length_unit_ = 1;
    std::map<std::string, real> params_;

    std::vector<PowerTerm> terms_; // built-ins
    SeriesProvider provider_;      // custom
};

/// Default LJ depth in hbar^2/(m sigma^2): 1e4 / 2^(4/3).
real default_lj_depth();

/// V = omega^2 x^2 / 2 on the full line.
PotentialModel make_harmonic(real omega = 1);

/// V_l = l(l+1)/(2r^2) - 1/r on [h1, h2] (lengths in Bohr radii), barrier at
/// h1 and a zero step beyond h2.
PotentialModel make_hydrogen(int l, real h1 = 9.7844e-11, real h2 = 20200);

/// V_l = l(l+1)/(2r^2) + 4 eps[(sigma/r)^12 - (sigma/r)^6] on [h1, h2]
/// (h1, h2 in units of sigma).
PotentialModel make_lennard_jones(int l, real h1 = 0.22, real h2 = 200,
                                  real epsilon = default_lj_depth(), real sigma = 1);

/// Built-in by name: "harmonic" {omega}, "hydrogen_effective" {l, h1, h2},
/// "lennard_jones" {l, h1, h2, epsilon, sigma}.  Missing keys take defaults.
PotentialModel make_builtin(const std::string& name, const std::map<std::string, real>& params);

/// User-defined potential.  `provider` must return finite coefficients inside
/// [lo, hi]; a non-finite result surfaces as SingularityError from expand.
PotentialModel make_custom(SeriesProvider provider, real lo, real hi, Closure left, Closure right,
                           real asymptote, std::optional<real> well_center = std::nullopt);

} // namespace smx
