#pragma once

// Half-line sweeps: compose slice S-matrices outward from the matching point
// until the domain closure is reached or the cumulative transmission falls
// below the truncation threshold.

#include <cstddef>
#include <vector>

#include "smx/potential.hpp"
#include "smx/scalar.hpp"
#include "smx/smatrix.hpp"

namespace smx {

struct Slicing {
    enum class Kind { uniform, geometric };
    Kind kind = Kind::uniform;
    real half_width = 0.1; ///< uniform: fixed half width
    real ratio = 100;      ///< geometric: half width = |center| / ratio

    static Slicing uniform(real half_width) { return {Kind::uniform, half_width, 0}; }
    static Slicing geometric(real ratio) { return {Kind::geometric, 0, ratio}; }
};

struct SweepOptions {
    real v0 = 0;           ///< reference level V0 of the associated potentials
    Slicing slicing;
    int taylor_order = 2;  ///< M
    int lambda_order = 10; ///< Lambda
    real eps_trunc = 1e-40;
    std::size_t max_slices = 1'000'000;
    bool keep_trace = false;
};

/// One slice of a sweep.  Positions are in the model's coordinates; the
/// S-matrices live in the sweep frame (x -> 2 x0 - x for left sweeps).
struct TraceEntry {
    real center;
    real half_width;
    SegmentS<real> slice;  ///< this slice alone
    SegmentS<real> before; ///< cumulative from x0 to this slice's near edge
};

struct CumulativeTrace {
    Side direction = Side::right;
    real anchor = 0;
    std::vector<TraceEntry> entries;
    SegmentS<real> total;
    /// Phase of the region beyond the last slice: the analytic closure when the
    /// domain end was reached, 0 when the sweep was truncated.
    PhaseFactor<real> tail;
    bool truncated = false;
};

struct SweepResult {
    PhaseFactor<real> phase;
    CumulativeTrace trace; ///< entries empty unless keep_trace
    std::size_t slices = 0;
};

/// Exterior wavenumber sqrt(2(E - V0)); throws ParameterError unless E > V0.
real exterior_k(real energy, real v0);

/// Next slice outward from `edge`; returns false when `edge` already sits on
/// the domain end.  `last` is set when the slice was clipped to the end.
bool next_slice(const PotentialModel& model, const Slicing& slicing, Side direction, real edge,
                real& center, real& half_width, bool& last);

/// v_mu in the sweep frame (odd coefficients negated for left sweeps).
TaylorSeries<real> frame_expansion(const PotentialModel& model, real energy, real center, int order, Side direction,
                                   real scale = 1);

/// S^{x0,R} (direction right) or S^{x0,L} (direction left).
SweepResult sweep_halfline(const PotentialModel& model, real energy, real x0, Side direction,
                           const SweepOptions& opts);

/// Phase of the closure that terminates the domain on `direction`.
PhaseFactor<real> domain_closure_phase(const PotentialModel& model, real energy, real v0, Side direction,
                                       real frame_anchor);

} // namespace smx
