#pragma once

// Scattering-matrix algebra: star composition of segments, half-line
// closures and the analytic boundary phases.

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "smx/error.hpp"
#include "smx/slice.hpp"

namespace smx {

enum class Side { left, right };

/// Unit-modulus reflection phase of a half-line region beyond `anchor`.
template <class Real>
struct PhaseFactor {
    std::complex<Real> value;
    Real anchor{};
    Side side = Side::right;
    Real k{};
};

/// Denominators below this magnitude are treated as exact cavity resonances.
inline constexpr double resonance_threshold = 1e-14;

namespace detail {

template <class Real>
void check_denominator(std::complex<Real> d, const char* where)
{
    if (!(std::abs(d) >= Real(resonance_threshold)))
        throw ResonanceError(fmt::format("{}: multiple-reflection denominator {:.3e} below threshold",
                                         where, static_cast<double>(std::abs(d))));
}

template <class Real>
bool same_edge(Real a, Real b)
{
    using std::abs;
    const Real scale = std::max({Real(1), abs(a), abs(b)});
    return abs(a - b) <= Real(1e-9) * scale;
}

} // namespace detail

/// Composition of adjacent segments, left.xb == right.xa.
template <class Real>
SegmentS<Real> star(const SegmentS<Real>& left, const SegmentS<Real>& right)
{
    using C = std::complex<Real>;
    if (!detail::same_edge(left.xb, right.xa))
        throw std::invalid_argument(fmt::format("star: segments do not share an edge ({} vs {})",
                                                static_cast<double>(left.xb), static_cast<double>(right.xa)));
    if (left.k != right.k)
        throw std::invalid_argument("star: segments have different exterior wavenumbers");

    const C d = C(1) - left.s22 * right.s11;
    detail::check_denominator(d, "star");
    SegmentS<Real> out;
    out.s11 = left.s11 + left.s12 * right.s11 * left.s21 / d;
    out.s12 = left.s12 * right.s12 / d;
    out.s21 = right.s21 * left.s21 / d;
    out.s22 = right.s22 + right.s21 * left.s22 * right.s12 / d;
    out.xa = left.xa;
    out.xb = right.xb;
    out.k = left.k;
    return out;
}

/// Binary-tree reduction of a run of adjacent segments.
template <class Real>
SegmentS<Real> star_tree(std::span<const SegmentS<Real>> segs)
{
    if (segs.empty())
        throw std::invalid_argument("star_tree: empty range");
    if (segs.size() == 1)
        return segs.front();
    const std::size_t mid = segs.size() / 2;
    return star(star_tree(segs.subspan(0, mid)), star_tree(segs.subspan(mid)));
}

/// Phase of the half-line starting at segment.xa, given the phase of the
/// half-line beyond segment.xb.
template <class Real>
PhaseFactor<Real> close_right(const SegmentS<Real>& segment, const PhaseFactor<Real>& closure)
{
    using C = std::complex<Real>;
    if (closure.side != Side::right)
        throw std::invalid_argument("close_right: closure must be a right-side phase");
    if (!detail::same_edge(closure.anchor, segment.xb))
        throw std::invalid_argument("close_right: closure is not anchored at the segment end");
    const C d = C(1) - segment.s22 * closure.value;
    detail::check_denominator(d, "close_right");
    PhaseFactor<Real> out;
    out.value = segment.s11 + segment.s12 * segment.s21 * closure.value / d;
    out.anchor = segment.xa;
    out.side = Side::right;
    out.k = segment.k;
    return out;
}

/// Infinite wall at `anchor`.
template <class Real>
PhaseFactor<Real> barrier_phase(Real anchor, Real k)
{
    return {std::complex<Real>(-1, 0), anchor, Side::right, k};
}

/// Step up to v1 at `anchor`, reference level v0:  (ik + kappa)/(ik - kappa).
template <class Real>
PhaseFactor<Real> step_phase(Real energy, Real v1, Real v0, Real anchor)
{
    using C = std::complex<Real>;
    if (!(energy < v1))
        throw InvalidClosureError(fmt::format("step closure needs E < V1 (E = {}, V1 = {})",
                                              static_cast<double>(energy), static_cast<double>(v1)));
    if (!(energy > v0))
        throw InvalidClosureError(fmt::format("step closure needs E > V0 (E = {}, V0 = {})",
                                              static_cast<double>(energy), static_cast<double>(v0)));
    const Real k = std::sqrt(Real(2) * (energy - v0));
    const Real kappa = std::sqrt(Real(2) * (v1 - energy));
    const C ik(0, k);
    return {(ik + kappa) / (ik - kappa), anchor, Side::right, k};
}

} // namespace smx
