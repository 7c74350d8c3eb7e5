#include "smx/sweep.hpp"

#include <cmath>

#include <fmt/format.h>

namespace smx {

real exterior_k(real energy, real v0)
{
    if (!(energy > v0))
        throw ParameterError(fmt::format("energy {} must lie above the reference level V0 = {}", energy, v0));
    return std::sqrt(2.0 * (energy - v0));
}

bool next_slice(const PotentialModel& model, const Slicing& slicing, Side direction, real edge,
                real& center, real& half_width, bool& last)
{
    const real end = direction == Side::right ? model.domain_hi() : model.domain_lo();
    if (edge == end)
        return false;
    const real sgn = direction == Side::right ? 1.0 : -1.0;

    if (slicing.kind == Slicing::Kind::uniform) {
        half_width = slicing.half_width;
        center = edge + sgn * half_width;
    } else {
        if (!(edge > 0))
            throw ParameterError(fmt::format("geometric slicing needs positive coordinates, edge = {}", edge));
        // edge = c (1 - sgn/A)
        center = edge / (1.0 - sgn / slicing.ratio);
        half_width = center / slicing.ratio;
    }

    last = false;
    const real far = center + sgn * half_width;
    if (std::isfinite(end) && sgn * (far - end) >= 0) {
        center = 0.5 * (edge + end);
        half_width = 0.5 * std::abs(end - edge);
        last = true;
    }
    return half_width > 0;
}

TaylorSeries<real> frame_expansion(const PotentialModel& model, real energy, real center, int order, Side direction,
                                   real scale)
{
    TaylorSeries<real> s = model.expand(energy, center, order, scale);
    if (direction == Side::left) {
        auto& c = s.mutable_coeffs();
        for (std::size_t mu = 1; mu < c.size(); mu += 2)
            c[mu] = -c[mu];
    }
    return s;
}

PhaseFactor<real> domain_closure_phase(const PotentialModel& model, real energy, real v0, Side direction,
                                       real frame_anchor)
{
    const Closure& c = direction == Side::right ? model.right_closure() : model.left_closure();
    const real k = exterior_k(energy, v0);
    switch (c.kind) {
    case ClosureKind::barrier:
        return barrier_phase(frame_anchor, k);
    case ClosureKind::step:
        return step_phase(energy, c.level, v0, frame_anchor);
    case ClosureKind::constant:
        break;
    }
    return {complex(0, 0), frame_anchor, Side::right, k};
}

SweepResult sweep_halfline(const PotentialModel& model, real energy, real x0, Side direction,
                           const SweepOptions& opts)
{
    if (opts.slicing.kind == Slicing::Kind::uniform && !(opts.slicing.half_width > 0))
        throw ParameterError("uniform slicing needs half_width > 0");
    if (opts.slicing.kind == Slicing::Kind::geometric && !(opts.slicing.ratio > 1))
        throw ParameterError("geometric slicing needs ratio > 1");
    if (!(x0 > model.domain_lo() && x0 < model.domain_hi()))
        throw DomainError(fmt::format("matching point {} outside domain", x0));

    const real k = exterior_k(energy, opts.v0);
    const real frame_sign = direction == Side::right ? 1.0 : -1.0;
    auto to_frame = [&](real x) { return direction == Side::right ? x : 2.0 * x0 - x; };

    SweepResult res;
    res.trace.direction = direction;
    res.trace.anchor = x0;
    SegmentS<real> total = SegmentS<real>::identity(x0, k);

    real edge = x0;
    bool reached_end = false;
    bool truncated = false;
    std::size_t count = 0;
    for (;;) {
        real center = 0, hw = 0;
        bool last = false;
        if (!next_slice(model, opts.slicing, direction, edge, center, hw, last)) {
            reached_end = true;
            break;
        }
        if (count >= opts.max_slices)
            throw NonConvergenceError(fmt::format(
                "sweep from x0 = {} did not reach |S12| < {:.1e} within {} slices", x0, opts.eps_trunc, opts.max_slices));

        const auto series = frame_expansion(model, energy, center, opts.taylor_order, direction, hw);
        const auto sol = local_solutions(series, opts.lambda_order, hw);
        SegmentS<real> s = slice_smatrix(sol, k);
        const real far = last ? (direction == Side::right ? model.domain_hi() : model.domain_lo())
                              : center + frame_sign * hw;
        s.xa = to_frame(edge);
        s.xb = to_frame(far);

        if (opts.keep_trace)
            res.trace.entries.push_back({center, hw, s, total});
        total = star(total, s);
        edge = far;
        ++count;

        if (std::abs(total.s12) < opts.eps_trunc) {
            truncated = true;
            break;
        }
        if (last) {
            reached_end = true;
            break;
        }
    }

    PhaseFactor<real> tail{complex(0, 0), total.xb, Side::right, k};
    if (reached_end && !truncated)
        tail = domain_closure_phase(model, energy, opts.v0, direction, total.xb);

    PhaseFactor<real> phase = count == 0 ? tail : close_right(total, tail);
    phase.anchor = x0;
    phase.side = direction;

    res.phase = phase;
    res.trace.total = total;
    res.trace.tail = tail;
    res.trace.truncated = truncated;
    res.slices = count;
    return res;
}

} // namespace smx
