#include "smx/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace smx {

namespace {

constexpr real max_merge_exponent = 40;

complex horner(const std::vector<complex>& c, real t)
{
    complex p(0);
    for (std::size_t i = c.size(); i-- > 0;)
        p = p * t + c[i];
    return p;
}

std::vector<complex> derivative_coeffs(const std::vector<complex>& c)
{
    if (c.size() < 2)
        return {complex(0)};
    std::vector<complex> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i)
        d[i - 1] = c[i] * static_cast<real>(i);
    return d;
}

/// Taylor coefficients of exp(a t) up to the point where the remaining terms
/// are below double resolution of exp(|a|).
std::vector<complex> exp_series(complex a)
{
    const real r = std::abs(a);
    std::vector<complex> e{complex(1)};
    real term = 1;
    complex c(1);
    for (int n = 1;; ++n) {
        term *= r / n;
        c *= a / static_cast<real>(n);
        e.push_back(c);
        if (n > r && term < 1e-18)
            break;
    }
    return e;
}

std::vector<complex> product(const std::vector<complex>& a, const std::vector<complex>& b)
{
    std::vector<complex> out(a.size() + b.size() - 1, complex(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

/// Coefficients of |p(t)|^2 (real polynomial).
std::vector<real> abs2_coeffs(const std::vector<complex>& p)
{
    std::vector<real> out(2 * p.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j)
            out[i + j] += (p[i] * std::conj(p[j])).real();
    return out;
}

/// Integral over [-1, 1] of t^n.
real monomial_integral(std::size_t n)
{
    return n % 2 == 0 ? 2.0 / static_cast<real>(n + 1) : 0.0;
}

PieceRecord mirrored(const PieceRecord& p, real x0, real sign)
{
    PieceRecord m = p;
    m.center = 2.0 * x0 - p.center;
    for (std::size_t j = 0; j < m.merged.size(); ++j)
        m.merged[j] *= (j % 2 == 0 ? sign : -sign);
    return m;
}

/// Phase of the evanescent region beyond a truncated sweep, treated as a step
/// at the local potential level.
PhaseFactor<real> truncated_tail(const PotentialModel& model, const CumulativeTrace& trace, real energy, real k,
                                 Side direction)
{
    PhaseFactor<real> tail = trace.tail;
    const real edge = direction == Side::right ? trace.total.xb : 2.0 * trace.anchor - trace.total.xb;
    try {
        const real v = model.expand(energy, edge, 0)[0];
        if (v < 0) {
            const real kappa = std::sqrt(-v);
            const complex ik(0, k);
            tail.value = (ik + kappa) / (ik - kappa);
        }
    } catch (const Error&) {
        // keep the zero phase
    }
    return tail;
}

template <class F>
void for_each_sample(const PiecewiseWavefunction& psi, int per_piece, F&& f)
{
    for (std::size_t i = 0; i < psi.pieces.size(); ++i)
        for (int s = 0; s <= per_piece; ++s)
            f(i, -1.0 + 2.0 * s / per_piece);
}

} // namespace

complex PieceRecord::value_at(real t) const
{
    return horner(merged, t);
}

complex PieceRecord::derivative_at(real t) const
{
    return horner(derivative_coeffs(merged), t) / half_width;
}

complex PieceRecord::second_derivative_at(real t) const
{
    return horner(derivative_coeffs(derivative_coeffs(merged)), t) / (half_width * half_width);
}

std::ptrdiff_t PiecewiseWavefunction::locate(real x) const
{
    if (pieces.empty() || x < pieces.front().lo() || x > pieces.back().hi())
        return -1;
    auto it = std::upper_bound(pieces.begin(), pieces.end(), x,
                               [](real v, const PieceRecord& p) { return v < p.lo(); });
    if (it == pieces.begin())
        return 0;
    return std::distance(pieces.begin(), it) - 1;
}

complex PiecewiseWavefunction::value(real x) const
{
    const auto i = locate(x);
    if (i < 0)
        return complex(0);
    const PieceRecord& p = pieces[static_cast<std::size_t>(i)];
    return p.value_at(std::clamp((x - p.center) / p.half_width, -1.0, 1.0));
}

complex PiecewiseWavefunction::derivative(real x) const
{
    const auto i = locate(x);
    if (i < 0)
        return complex(0);
    const PieceRecord& p = pieces[static_cast<std::size_t>(i)];
    return p.derivative_at(std::clamp((x - p.center) / p.half_width, -1.0, 1.0));
}

real PiecewiseWavefunction::max_amplitude() const
{
    real m = 0;
    for_each_sample(*this, 8, [&](std::size_t i, real t) { m = std::max(m, std::abs(pieces[i].value_at(t))); });
    return m;
}

std::vector<PieceRecord> reconstruct_half(const PotentialModel& model, const SweepOptions& sweep, real energy,
                                          const CumulativeTrace& trace, const PhaseFactor<real>& phase,
                                          const ReconstructOptions& opts, real* cutoff)
{
    const std::size_t n = trace.entries.size();
    const real k = exterior_k(energy, sweep.v0);
    const complex ik(0, k);
    const complex amplitude(1);

    std::vector<complex> half_line(n);
    if (opts.mode == ReconstructionMode::stabilized && n > 0) {
        PhaseFactor<real> r = trace.truncated ? truncated_tail(model, trace, energy, k, trace.direction) : trace.tail;
        for (std::size_t j = n; j-- > 0;) {
            r = close_right(trace.entries[j].slice, r);
            half_line[j] = r.value;
        }
    }

    std::vector<PieceRecord> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const TraceEntry& e = trace.entries[j];
        const SegmentS<real>& b = e.before;
        complex d_plus, d_minus;
        if (opts.mode == ReconstructionMode::direct) {
            const complex num = phase.value - b.s11;
            if (!(std::abs(num) > opts.eps_validity) || b.s12 == complex(0))
                break;
            d_plus = num / b.s12 * amplitude;
            d_minus = b.s21 * amplitude + b.s22 * d_plus;
        } else {
            d_minus = b.s21 * amplitude / (complex(1) - b.s22 * half_line[j]);
            d_plus = half_line[j] * d_minus;
        }

        const auto series = frame_expansion(model, energy, e.center, sweep.taylor_order, trace.direction,
                                            e.half_width);
        const auto sol = local_solutions(series, sweep.lambda_order, e.half_width);
        const complex qt = sol.q_scaled();
        if (std::abs(qt.imag()) > max_merge_exponent)
            throw ReconstructionError(fmt::format("slice at x = {} too wide to merge (|q h| = {:.3g})", e.center,
                                                  std::abs(qt)));

        // psi and d/dx at the near edge t = -1 of the frame
        const auto p = evaluate_plus(sol, -e.half_width);
        const auto m = evaluate_minus(sol, -e.half_width);
        const complex rhs0 = d_minus + d_plus;
        const complex rhs1 = ik * (d_minus - d_plus);
        const complex det = p.value * m.derivative - m.value * p.derivative;
        if (det == complex(0) || !std::isfinite(std::abs(det)))
            throw ReconstructionError(fmt::format("singular matching at slice x = {}", e.center));

        PieceRecord rec;
        rec.center = e.center;
        rec.half_width = e.half_width;
        rec.alpha_plus = (rhs0 * m.derivative - m.value * rhs1) / det;
        rec.alpha_minus = (p.value * rhs1 - p.derivative * rhs0) / det;

        const complex iq(0, 1);
        auto plus = product(exp_series(iq * qt), sol.phi_plus);
        auto minus = product(exp_series(-iq * qt), sol.phi_minus);
        rec.merged.assign(std::max(plus.size(), minus.size()), complex(0));
        for (std::size_t i = 0; i < plus.size(); ++i)
            rec.merged[i] += rec.alpha_plus * plus[i];
        for (std::size_t i = 0; i < minus.size(); ++i)
            rec.merged[i] += rec.alpha_minus * minus[i];
        // frame t is -t in the model's coordinates on a left sweep
        if (trace.direction == Side::left)
            for (std::size_t i = 1; i < rec.merged.size(); i += 2)
                rec.merged[i] = -rec.merged[i];
        for (const complex& c : rec.merged)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw ReconstructionError(fmt::format("non-finite coefficients at slice x = {}", e.center));
        out.push_back(std::move(rec));
    }

    if (cutoff) {
        if (out.empty())
            *cutoff = trace.anchor;
        else
            *cutoff = trace.direction == Side::right ? out.back().hi() : out.back().lo();
    }
    return out;
}

PiecewiseWavefunction reconstruct(const PotentialModel& model, const ScanConfig& cfg, const EnergyRoot& root,
                                  const ReconstructOptions& opts)
{
    const real x0 = matching_point(model, cfg);
    SweepOptions sweep = cfg.sweep;
    sweep.keep_trace = true;

    PiecewiseWavefunction psi;
    psi.energy = root.energy;
    psi.x0 = x0;
    psi.k = exterior_k(root.energy, sweep.v0);

    const SweepResult right = sweep_halfline(model, root.energy, x0, Side::right, sweep);
    psi.phase_right = right.phase.value;
    auto right_pieces = reconstruct_half(model, sweep, root.energy, right.trace, right.phase, opts);
    if (right_pieces.empty())
        throw ReconstructionError("no valid slice on the right of the matching point");

    std::vector<PieceRecord> left_pieces;
    if (cfg.symmetric) {
        Parity parity = root.parity;
        if (parity == Parity::none)
            parity = psi.phase_right.real() > 0 ? Parity::even : Parity::odd;
        const real sign = parity == Parity::even ? 1.0 : -1.0;
        for (const PieceRecord& p : right_pieces)
            left_pieces.push_back(mirrored(p, x0, sign));
    } else {
        const SweepResult left = sweep_halfline(model, root.energy, x0, Side::left, sweep);
        left_pieces = reconstruct_half(model, sweep, root.energy, left.trace, left.phase, opts);
        if (!left_pieces.empty()) {
            const PieceRecord& r0 = right_pieces.front();
            const PieceRecord& l0 = left_pieces.front();
            const complex vr = r0.value_at(-1), dr = r0.derivative_at(-1);
            const complex vl = l0.value_at(1), dl = l0.derivative_at(1);
            const real size = std::abs(dr) + psi.k * std::abs(vr);
            complex c;
            if (psi.k * std::abs(vr) >= std::abs(dr)) {
                c = vr / vl;
                psi.match_defect = std::abs(c * dl - dr) / size;
            } else {
                c = dr / dl;
                psi.match_defect = psi.k * std::abs(c * vl - vr) / size;
            }
            if (!std::isfinite(std::abs(c)))
                throw ReconstructionError("left and right halves cannot be matched at x0");
            for (PieceRecord& p : left_pieces) {
                p.alpha_plus *= c;
                p.alpha_minus *= c;
                for (complex& m : p.merged)
                    m *= c;
            }
            if (psi.match_defect > 1e-8)
                spdlog::warn("wavefunction at E = {:.17g}: halves disagree at x0 by {:.2e}", root.energy,
                             psi.match_defect);
        }
    }

    std::reverse(left_pieces.begin(), left_pieces.end());
    psi.first_right = left_pieces.size();
    psi.pieces = std::move(left_pieces);
    psi.pieces.insert(psi.pieces.end(), std::make_move_iterator(right_pieces.begin()),
                      std::make_move_iterator(right_pieces.end()));
    psi.validity_lo = psi.pieces.front().lo();
    psi.validity_hi = psi.pieces.back().hi();
    psi.norm = norm_integral(psi);
    return psi;
}

real norm_integral(const PiecewiseWavefunction& psi)
{
    real total = 0;
    for (const PieceRecord& p : psi.pieces) {
        const auto a = abs2_coeffs(p.merged);
        real s = 0;
        for (std::size_t n = 0; n < a.size(); n += 2)
            s += a[n] * monomial_integral(n);
        total += p.half_width * s;
    }
    return total;
}

PiecewiseWavefunction normalize(PiecewiseWavefunction psi)
{
    const real n = norm_integral(psi);
    if (!(n > 0) || !std::isfinite(n))
        throw ReconstructionError(fmt::format("cannot normalize, norm = {}", n));

    // global phase from the largest sample
    complex peak(0);
    std::vector<real> piece_max(psi.pieces.size(), 0.0);
    for_each_sample(psi, 8, [&](std::size_t i, real t) {
        const complex v = psi.pieces[i].value_at(t);
        piece_max[i] = std::max(piece_max[i], std::abs(v));
        if (std::abs(v) > std::abs(peak))
            peak = v;
    });
    complex factor = std::abs(peak) > 0 ? std::conj(peak) / std::abs(peak) : complex(1);
    factor /= std::sqrt(n);

    // sign: positive at the maximum of the first piece above 1e-3 of the peak
    const real threshold = 1e-3 * std::abs(peak);
    for (std::size_t i = 0; i < psi.pieces.size(); ++i) {
        if (piece_max[i] < threshold)
            continue;
        complex best(0);
        for (int s = 0; s <= 8; ++s) {
            const complex v = psi.pieces[i].value_at(-1.0 + 2.0 * s / 8);
            if (std::abs(v) > std::abs(best))
                best = v;
        }
        if ((best * factor).real() < 0)
            factor = -factor;
        break;
    }

    for (PieceRecord& p : psi.pieces) {
        p.alpha_plus *= factor;
        p.alpha_minus *= factor;
        for (complex& c : p.merged)
            c *= factor;
    }
    psi.norm = norm_integral(psi);
    return psi;
}

real expectation(const PiecewiseWavefunction& psi, int p)
{
    if (p < 0)
        throw ParameterError("expectation: power must be >= 0");
    real total = 0;
    for (const PieceRecord& piece : psi.pieces) {
        const auto a = abs2_coeffs(piece.merged);
        // (c + h t)^p = sum_k binom(p, k) c^(p-k) h^k t^k
        std::vector<real> xp(static_cast<std::size_t>(p) + 1);
        real binom = 1;
        for (int k = 0; k <= p; ++k) {
            xp[static_cast<std::size_t>(k)] = binom * std::pow(piece.center, p - k) * std::pow(piece.half_width, k);
            binom = binom * (p - k) / (k + 1);
        }
        real s = 0;
        for (std::size_t n = 0; n < a.size(); ++n)
            for (std::size_t k = 0; k < xp.size(); ++k)
                s += a[n] * xp[k] * monomial_integral(n + k);
        total += piece.half_width * s;
    }
    if (!std::isfinite(total))
        throw RangeError(fmt::format("<x^{}> is not representable", p));
    return total / psi.norm;
}

real std_dev_r(const PiecewiseWavefunction& psi)
{
    const real m1 = expectation(psi, 1);
    const real m2 = expectation(psi, 2);
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

std::vector<real> sample(const PiecewiseWavefunction& psi, std::span<const real> xs)
{
    std::vector<real> out;
    out.reserve(xs.size());
    for (real x : xs)
        out.push_back(psi.value(x).real());
    return out;
}

ContinuityDefect continuity_defect(const PiecewiseWavefunction& psi)
{
    real vmax = 0, dmax = 0;
    for_each_sample(psi, 8, [&](std::size_t i, real t) {
        vmax = std::max(vmax, std::abs(psi.pieces[i].value_at(t)));
        dmax = std::max(dmax, std::abs(psi.pieces[i].derivative_at(t)));
    });
    ContinuityDefect d;
    for (std::size_t i = 0; i + 1 < psi.pieces.size(); ++i) {
        const PieceRecord& a = psi.pieces[i];
        const PieceRecord& b = psi.pieces[i + 1];
        d.value = std::max(d.value, std::abs(a.value_at(1) - b.value_at(-1)));
        d.derivative = std::max(d.derivative, std::abs(a.derivative_at(1) - b.derivative_at(-1)));
    }
    if (vmax > 0)
        d.value /= vmax;
    if (dmax > 0)
        d.derivative /= dmax;
    return d;
}

real ode_residual(const PiecewiseWavefunction& psi, const PotentialModel& model, int points_per_piece,
                  std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<real> dist(-1.0, 1.0);
    const real amp = psi.max_amplitude();
    if (!(amp > 0))
        return 0;
    real worst = 0;
    for (const PieceRecord& p : psi.pieces) {
        for (int i = 0; i < points_per_piece; ++i) {
            const real t = dist(rng);
            const real x = p.center + p.half_width * t;
            real v;
            try {
                v = model.expand(psi.energy, x, 0)[0];
            } catch (const DomainError&) {
                continue;
            }
            const complex r = p.second_derivative_at(t) + v * p.value_at(t);
            worst = std::max(worst, std::abs(r) / (amp * std::max(std::abs(v), 1.0)));
        }
    }
    return worst;
}

complex matching_ratio(const PiecewiseWavefunction& psi)
{
    if (psi.first_right >= psi.pieces.size())
        throw ReconstructionError("wavefunction has no piece at the matching point");
    const PieceRecord& p = psi.pieces[psi.first_right];
    const complex v = p.value_at(-1), d = p.derivative_at(-1);
    const complex ik(0, psi.k);
    return (ik * v - d) / (ik * v + d);
}

int node_count(const PiecewiseWavefunction& psi, real rel_threshold, int samples_per_piece)
{
    const real cut = rel_threshold * psi.max_amplitude();
    int nodes = 0;
    int last_sign = 0;
    for (const PieceRecord& p : psi.pieces) {
        for (int s = 0; s < samples_per_piece; ++s) {
            const real t = -1.0 + 2.0 * (s + 0.5) / samples_per_piece;
            const complex v = p.value_at(t);
            if (std::abs(v) <= cut)
                continue;
            const int sign = v.real() > 0 ? 1 : -1;
            if (last_sign != 0 && sign != last_sign)
                ++nodes;
            last_sign = sign;
        }
    }
    return nodes;
}

real tail_norm_estimate(const PiecewiseWavefunction& psi, const PotentialModel& model)
{
    if (psi.pieces.empty() || !(psi.norm > 0))
        return 0;
    real tail = 0;
    auto near = [](real a, real b) { return std::isfinite(b) && std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
    auto add = [&](real edge, complex value, real end) {
        if (near(edge, end))
            return;
        const real v = model.expand(psi.energy, edge, 0)[0];
        if (v < 0)
            tail += std::norm(value) / (2.0 * std::sqrt(-v));
    };
    add(psi.validity_lo, psi.pieces.front().value_at(-1), model.domain_lo());
    add(psi.validity_hi, psi.pieces.back().value_at(1), model.domain_hi());
    return tail / psi.norm;
}

} // namespace smx
