#pragma once

// Bound-state search: the product F(E) = S^{x0,L} S^{x0,R} has unit modulus
// and equals 1 exactly at the eigenvalues.  Energies are located by a grid
// scan on Im F followed by secant refinement with a regula falsi safeguard.

#include <optional>
#include <string>
#include <vector>

#include "smx/potential.hpp"
#include "smx/sweep.hpp"

namespace smx {

struct ScanConfig {
    real e_min = 0;
    real e_max = 1;
    int n_grid = 200;
    std::optional<real> x0; ///< defaults to the model's well center
    SweepOptions sweep;
    real refine_tol = 1e-14;
    int max_iter = 60;
    bool symmetric = false; ///< use F = S^{x0,R} for wells symmetric about x0
    unsigned threads = 1;
};

enum class Parity { none, even, odd };

const char* to_string(Parity p);

struct EnergyRoot {
    real energy = 0;
    real re_f = 0;
    Parity parity = Parity::none;
    int iterations = 0;
    real residual = 0; ///< |Im F| at `energy`
    bool converged = false;
};

struct Bracket {
    real lo = 0, hi = 0;
    complex f_lo, f_hi;
};

struct RefineFailure {
    Bracket bracket;
    EnergyRoot best;
    std::string message;
};

struct SpectrumResult {
    std::vector<EnergyRoot> roots; ///< sorted ascending
    std::vector<RefineFailure> failures;
};

/// Checks the cross-field constraints; throws ParameterError naming the field.
void validate(const PotentialModel& model, const ScanConfig& cfg);

/// Matching point actually used (cfg.x0 or the model's well center).
real matching_point(const PotentialModel& model, const ScanConfig& cfg);

/// F(E) = S^{x0,L} S^{x0,R}, or S^{x0,R} in symmetric mode.
complex eval_condition(const PotentialModel& model, const ScanConfig& cfg, real energy);

/// Grid brackets of sign changes of Im F.  Crossings with Re F <= 0 at either
/// end are dropped unless cfg.symmetric.
std::vector<Bracket> scan(const PotentialModel& model, const ScanConfig& cfg);

/// Secant iteration on Im F seeded with the bracket ends; an iterate that
/// leaves the current bracket is replaced by the regula falsi point.  Bracket
/// history is appended to `history` when given.
EnergyRoot refine(const PotentialModel& model, const ScanConfig& cfg, const Bracket& bracket,
                  std::vector<Bracket>* history = nullptr);

/// Scan plus refinement of every bracket; per-bracket failures are collected.
SpectrumResult solve_spectrum(const PotentialModel& model, const ScanConfig& cfg);

} // namespace smx
