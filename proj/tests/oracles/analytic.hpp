#pragma once

// Closed-form references used by the tests.  Nothing here calls into the
// solver library.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

/// Normalized oscillator eigenfunction (hbar = m = omega = 1) by the stable
/// three-term recurrence in n.
inline double hermite_function(int n, double x)
{
    double prev = 0.0;
    double cur = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    for (int j = 0; j < n; ++j) {
        const double next = std::sqrt(2.0 / (j + 1)) * x * cur - std::sqrt(double(j) / (j + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Generalized Laguerre polynomial L_n^(alpha)(x).
inline double laguerre(int n, double alpha, double x)
{
    if (n == 0)
        return 1.0;
    double l0 = 1.0, l1 = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double l2 = ((2 * k + 1 + alpha - x) * l1 - (k + alpha) * l0) / (k + 1);
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

/// Hydrogen radial function u_nl(r) = r R_nl(r) in atomic units, positive near the origin.
inline double hydrogen_u(int n, int l, double r)
{
    const double rho = 2.0 * r / n;
    const double norm = std::sqrt(std::pow(2.0 / n, 3) * std::tgamma(n - l) / (2.0 * n * std::tgamma(n + l + 1)));
    return r * norm * std::exp(-rho / 2) * std::pow(rho, l) * laguerre(n - l - 1, 2 * l + 1, rho);
}

/// Coefficient of d^mu in (c + d)^(-p), from the binomial series with the
/// binomial coefficient built as an integer product.
inline long double inverse_power_coeff(int p, int mu, long double c)
{
    // binom(p + mu - 1, mu)
    long double b = 1;
    for (int j = 1; j <= mu; ++j)
        b = b * (p + j - 1) / j;
    const long double sign = mu % 2 ? -1.0L : 1.0L;
    return sign * b * std::pow(c, -(long double)(p + mu));
}

struct SquareS {
    std::complex<double> r; ///< s11 = s22
    std::complex<double> t; ///< s12 = s21, edge-referenced
};

/// Rectangular region of width L with v = 2(E - V) = v_in inside, against
/// plane waves of wavenumber k outside; amplitudes referenced at the edges.
inline SquareS square_region(double v_in, double k, double L)
{
    using C = std::complex<double>;
    const C kappa = std::sqrt(C(-v_in, 0)); // v_in < 0 gives a real barrier decay rate
    const C ch = std::cosh(kappa * L), sh = std::sinh(kappa * L);
    const C i(0, 1);
    const C d = ch + i * (kappa * kappa - k * k) / (2.0 * k * kappa) * sh;
    return {-i * (k * k + kappa * kappa) / (2.0 * k * kappa) * sh / d, 1.0 / d};
}

} // namespace oracle
