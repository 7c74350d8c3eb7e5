#pragma once

// Finite-difference shooting for the radial equation u'' = 2(V(r) - E) u on
// [r0, r1] with u(r0) = 0.  Levels are bracketed by counting nodes of the
// outward solution and bisected; independent of the scattering machinery.

#include <functional>
#include <vector>

namespace oracle {

class NumerovShooter {
public:
    NumerovShooter(const std::function<double(double)>& potential, double r0, double r1, double h);

    /// Sign changes of the outward solution on (r0, r1].
    int nodes(double energy) const;

    /// E_n as the lowest energy with more than n nodes, bisected to `rel_tol`.
    double level(int n, double e_lo, double e_hi, double rel_tol = 1e-13) const;

    std::size_t points() const { return v_.size(); }

private:
    std::vector<double> v_;
    double h_;
};

} // namespace oracle
