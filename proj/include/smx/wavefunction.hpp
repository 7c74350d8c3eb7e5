#pragma once

// Bound-state wavefunctions as piecewise polynomials.
//
// Each slice of a sweep carries psi = a+ psi_+ + a- psi_-, with (a+, a-) fixed by
// matching to the exterior amplitudes D(+-) of the cumulative segment from x0
// to the slice's near edge.  The exponential factor is expanded and multiplied
// in, so every piece is a plain polynomial in t = (x - center)/half_width and
// norms and moments reduce to monomial integrals.

#include <cstdint>
#include <span>
#include <vector>

#include "smx/spectrum.hpp"

namespace smx {

struct PieceRecord {
    real center = 0;
    real half_width = 0;
    complex alpha_plus, alpha_minus;
    std::vector<complex> merged; ///< coefficients in t = (x - center)/half_width

    real lo() const { return center - half_width; }
    real hi() const { return center + half_width; }
    complex value_at(real t) const;
    complex derivative_at(real t) const;        ///< d/dx
    complex second_derivative_at(real t) const; ///< d2/dx2
};

struct PiecewiseWavefunction {
    std::vector<PieceRecord> pieces; ///< ascending, adjacent pieces share an edge
    real energy = 0;
    real x0 = 0;
    real k = 0;         ///< exterior wavenumber sqrt(2(E - V0))
    complex phase_right; ///< S^{x0,R} at `energy`
    real norm = 0;      ///< integral of |psi|^2 (1 after normalize)
    real validity_lo = 0, validity_hi = 0;
    real match_defect = 0; ///< relative mismatch of the non-matched quantity at x0
    std::size_t first_right = 0; ///< index of the piece starting at x0

    /// Index of the piece containing x, or -1 outside the covered span.
    std::ptrdiff_t locate(real x) const;
    complex value(real x) const;
    complex derivative(real x) const;
    real max_amplitude() const;
};

enum class ReconstructionMode {
    /// D(+) = (S^{x0,R} - S11)/S12 with truncation where |S^{x0,R} - S11| <= eps_validity.
    direct,
    /// Same amplitudes through the half-line phases S^{x,R} of every slice edge,
    /// composed inward from the sweep end; no cancellation in the tail.
    stabilized,
};

struct ReconstructOptions {
    ReconstructionMode mode = ReconstructionMode::stabilized;
    real eps_validity = 1e-12;
};

/// Pieces of one half-line, ordered outward from x0, in the model's coordinates
/// and with the pre-normalization constant A = 1.
std::vector<PieceRecord> reconstruct_half(const PotentialModel& model, const SweepOptions& sweep, real energy,
                                          const CumulativeTrace& trace, const PhaseFactor<real>& phase,
                                          const ReconstructOptions& opts, real* cutoff = nullptr);

/// Full wavefunction at a refined root (not normalized).
PiecewiseWavefunction reconstruct(const PotentialModel& model, const ScanConfig& cfg, const EnergyRoot& root,
                                  const ReconstructOptions& opts = {});

/// Unit norm, real, positive at the maximum-|psi| point of the first piece
/// carrying appreciable amplitude.
PiecewiseWavefunction normalize(PiecewiseWavefunction psi);

/// Integral of |psi|^2.
real norm_integral(const PiecewiseWavefunction& psi);

/// <x^p> (psi normalized).
real expectation(const PiecewiseWavefunction& psi, int p);

/// sqrt(<r^2> - <r>^2).
real std_dev_r(const PiecewiseWavefunction& psi);

/// Re psi at each position; 0 outside the covered span.
std::vector<real> sample(const PiecewiseWavefunction& psi, std::span<const real> xs);

// Diagnostics

struct ContinuityDefect {
    real value = 0;      ///< max jump of psi across interior edges / max|psi|
    real derivative = 0; ///< max jump of psi' / max|psi'|
};

ContinuityDefect continuity_defect(const PiecewiseWavefunction& psi);

/// Max over random interior points of |psi'' + v psi| / (max|psi| max(|v|, 1)).
real ode_residual(const PiecewiseWavefunction& psi, const PotentialModel& model, int points_per_piece = 5,
                  std::uint64_t seed = 12345);

/// B(-)/B(+) = (ik psi(x0) - psi'(x0)) / (ik psi(x0) + psi'(x0)); equals S^{x0,R} at a bound state.
complex matching_ratio(const PiecewiseWavefunction& psi);

/// Sign changes of Re psi over points where |psi| exceeds rel_threshold * max|psi|.
int node_count(const PiecewiseWavefunction& psi, real rel_threshold = 1e-6, int samples_per_piece = 8);

/// Norm beyond the covered span estimated as |psi(edge)|^2 / (2 kappa(edge)), relative to the norm.
real tail_norm_estimate(const PiecewiseWavefunction& psi, const PotentialModel& model);

} // namespace smx
