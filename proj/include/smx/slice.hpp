#pragma once

// Local series solutions on one slice and the slice scattering matrix.
//
// On [c - h, c + h] with v(c + d) = sum v_mu d^mu the two solutions are
//   psi_pm(d) = exp(+-i q d) * sum_lambda phi_lambda^(pm) d^lambda,  q = sqrt(v_0),
// and the slice S-matrix maps the incoming exterior amplitudes (C+, D+) to the
// outgoing ones (C-, D-), with plane waves referenced to the slice edges.
//
// Coefficients are kept in the normalized coordinate t = d/h: the stored
// phi_lambda are phi_lambda * h^lambda, which stay O(1) even where v_mu grows
// like r^-mu near a singular point.

#include <cmath>
#include <algorithm>
#include <complex>
#include <limits>
#include <vector>

#include "smx/error.hpp"
#include "smx/taylor.hpp"

namespace smx {

template <class Real>
struct SeriesSolutionPair {
    Real center{};
    Real half_width{};
    std::complex<Real> q;                      ///< sqrt(v_0), principal branch
    std::vector<std::complex<Real>> phi_plus;  ///< phi_lambda^(+) h^lambda
    std::vector<std::complex<Real>> phi_minus; ///< phi_lambda^(-) h^lambda

    int order() const { return static_cast<int>(phi_plus.size()) - 1; }
    std::complex<Real> q_scaled() const { return q * half_width; }
};

/// 2x2 scattering matrix of a segment [xa, xb] embedded in the reference level.
template <class Real>
struct SegmentS {
    using C = std::complex<Real>;
    C s11, s12, s21, s22;
    Real xa{}, xb{};
    Real k{};

    /// Zero-width segment: perfect transmission, no reflection.
    static SegmentS identity(Real x, Real k)
    {
        return {C(0), C(1), C(1), C(0), x, x, k};
    }
};

template <class Real>
using SliceSMatrix = SegmentS<Real>;

/// Value and first derivative of one local solution at an edge.
template <class Real>
struct EdgeValue {
    std::complex<Real> value;
    std::complex<Real> derivative;
};

namespace detail {

/// phi_n for n = 3..order by the local-series recursion, for the equation
/// psi'' + (sum w_j t^j) psi = 0 with q^2 = w_0; `sign` is +1 for psi_plus and
/// -1 for psi_minus.
template <class Real>
std::vector<std::complex<Real>> series_recursion(const std::vector<Real>& w, std::complex<Real> q, int order,
                                                 int sign)
{
    using C = std::complex<Real>;
    const int m = static_cast<int>(w.size()) - 1;
    auto coef = [&](int j) { return j <= m ? w[static_cast<std::size_t>(j)] : Real(0); };

    std::vector<C> phi(static_cast<std::size_t>(order) + 1, C(0));
    phi[0] = C(1);
    const C two_iq = C(0, 2) * q;
#ifdef SMX_MUTATE_RECURSION_SIGN
    sign = -sign;
#endif
    for (int n = 3; n <= order; ++n) {
        C sum = C(coef(n - 2));
        for (int lam = 3; lam <= n - 3; ++lam)
            sum += phi[static_cast<std::size_t>(lam)] * coef(n - lam - 2);
        phi[static_cast<std::size_t>(n)] = -Real(sign) * two_iq / Real(n) * phi[static_cast<std::size_t>(n - 1)]
            - sum / Real(n * (n - 1));
    }
    return phi;
}

} // namespace detail

/// Coefficients of both local solutions on the slice centered at series.center().
template <class Real>
SeriesSolutionPair<Real> local_solutions(const TaylorSeries<Real>& series, int lambda_order, Real half_width)
{
    if (lambda_order < 3)
        throw ParameterError("local_solutions: lambda order must be >= 3");
    if (lambda_order < series.order() + 2)
        throw ParameterError("local_solutions: lambda order must be >= taylor order + 2");
    if (!(half_width > 0))
        throw DegenerateSliceError("local_solutions: half width must be > 0");

    // coefficients of h^2 v(c + h t) in t
    const Real ratio = half_width / series.scale();
    std::vector<Real> w(series.coeffs().begin(), series.coeffs().end());
    Real f = half_width * half_width;
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] *= f;
        f *= ratio;
    }

    SeriesSolutionPair<Real> s;
    s.center = series.center();
    s.half_width = half_width;
    s.q = std::sqrt(std::complex<Real>(series[0], Real(0)));
    const std::complex<Real> qt = s.q_scaled();
    s.phi_plus = detail::series_recursion(w, qt, lambda_order, +1);
    s.phi_minus = detail::series_recursion(w, qt, lambda_order, -1);
    return s;
}

/// psi and d psi/dt of one branch at normalized position t, by Horner on the
/// polynomial factor times the un-expanded exponential.
template <class Real>
EdgeValue<Real> evaluate_branch(const std::vector<std::complex<Real>>& phi, std::complex<Real> q_scaled, int sign,
                                Real t)
{
    using C = std::complex<Real>;
    C p(0), dp(0);
    for (std::size_t i = phi.size(); i-- > 0;) {
        dp = dp * t + p;
        p = p * t + phi[i];
    }
    const C iq = C(0, Real(sign)) * q_scaled;
    const C e = std::exp(iq * t);
    return {e * p, e * (iq * p + dp)};
}

/// psi_+ and psi_+' (d/dx) at x = center + d.
template <class Real>
EdgeValue<Real> evaluate_plus(const SeriesSolutionPair<Real>& s, Real d)
{
    auto e = evaluate_branch(s.phi_plus, s.q_scaled(), +1, d / s.half_width);
    e.derivative /= s.half_width;
    return e;
}

/// psi_- and psi_-' (d/dx) at x = center + d.
template <class Real>
EdgeValue<Real> evaluate_minus(const SeriesSolutionPair<Real>& s, Real d)
{
    auto e = evaluate_branch(s.phi_minus, s.q_scaled(), -1, d / s.half_width);
    e.derivative /= s.half_width;
    return e;
}

/// Scattering matrix of the slice against plane waves of wavenumber k.
template <class Real>
SliceSMatrix<Real> slice_smatrix(const SeriesSolutionPair<Real>& s, Real k)
{
    using C = std::complex<Real>;
    if (!(k > 0))
        throw DegenerateSliceError("slice_smatrix: exterior wavenumber must be > 0");
    if (!(s.half_width > 0))
        throw DegenerateSliceError("slice_smatrix: half width must be > 0");

    const Real h = s.half_width;
    // derivatives in t: psi' / (ik) = (d psi/dt) / (ik h)
    const C ik(0, k * h);
    const C qt = s.q_scaled();
    const EdgeValue<Real> basis_l[2] = {evaluate_branch(s.phi_plus, qt, +1, Real(-1)),
                                        evaluate_branch(s.phi_minus, qt, -1, Real(-1))};
    const EdgeValue<Real> basis_r[2] = {evaluate_branch(s.phi_plus, qt, +1, Real(1)),
                                        evaluate_branch(s.phi_minus, qt, -1, Real(1))};

    // Columns: basis functions.  Rows of `in`: 2C+ and 2D+; rows of `out`: 2C-, 2D-.
    C in[2][2], out[2][2];
    for (int j = 0; j < 2; ++j) {
        const EdgeValue<Real>& l = basis_l[j];
        const EdgeValue<Real>& r = basis_r[j];
        in[0][j] = l.value + l.derivative / ik;
        out[0][j] = l.value - l.derivative / ik;
        in[1][j] = r.value - r.derivative / ik;
        out[1][j] = r.value + r.derivative / ik;
        // S = out * in^{-1} is invariant under column scaling
        Real scale = std::max({std::abs(in[0][j]), std::abs(in[1][j]), std::abs(out[0][j]), std::abs(out[1][j])});
        if (scale > 0 && std::isfinite(scale)) {
            for (int i = 0; i < 2; ++i) {
                in[i][j] /= scale;
                out[i][j] /= scale;
            }
        }
    }

    const C det = in[0][0] * in[1][1] - in[0][1] * in[1][0];
    const Real size = std::abs(in[0][0] * in[1][1]) + std::abs(in[0][1] * in[1][0]);
    if (!(std::abs(det) > std::numeric_limits<Real>::epsilon() * size) || !std::isfinite(std::abs(det)))
        throw DegenerateSliceError("slice_smatrix: singular edge-matching system");

    const C inv[2][2] = {{in[1][1] / det, -in[0][1] / det}, {-in[1][0] / det, in[0][0] / det}};
    SliceSMatrix<Real> S;
    S.s11 = out[0][0] * inv[0][0] + out[0][1] * inv[1][0];
    S.s12 = out[0][0] * inv[0][1] + out[0][1] * inv[1][1];
    S.s21 = out[1][0] * inv[0][0] + out[1][1] * inv[1][0];
    S.s22 = out[1][0] * inv[0][1] + out[1][1] * inv[1][1];
    S.xa = s.center - h;
    S.xb = s.center + h;
    S.k = k;
    return S;
}

} // namespace smx
