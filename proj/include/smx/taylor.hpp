#pragma once

// Truncated power series arithmetic (Taylor mode).
//
// A TaylorSeries holds v_0..v_M of  f(center + scale*t) = sum_mu v_mu t^mu + O(t^{M+1}),
// i.e. the Taylor coefficients times scale^mu.  scale = 1 gives the plain
// coefficients; a slice half-width keeps them O(1) near singular points.
// Arithmetic between two series requires equal center, scale and order; the
// result carries the exact coefficients of the composed function through M.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "smx/error.hpp"

namespace smx {

template <class Real>
class TaylorSeries {
public:
    TaylorSeries() = default;

    TaylorSeries(Real center, std::vector<Real> coeffs, Real scale = Real(1))
        : center_(center), scale_(scale), coeffs_(std::move(coeffs))
    {
        if (coeffs_.empty())
            throw ParameterError("TaylorSeries needs at least one coefficient");
    }

    /// The constant function c.
    static TaylorSeries constant(Real center, int order, Real c, Real scale = Real(1))
    {
        std::vector<Real> v(static_cast<std::size_t>(order) + 1, Real(0));
        v[0] = c;
        return {center, std::move(v), scale};
    }

    /// The independent variable x = center + scale*t.
    static TaylorSeries variable(Real center, int order, Real scale = Real(1))
    {
        std::vector<Real> v(static_cast<std::size_t>(order) + 1, Real(0));
        v[0] = center;
        if (order >= 1)
            v[1] = scale;
        return {center, std::move(v), scale};
    }

    Real center() const { return center_; }
    Real scale() const { return scale_; }
    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const Real> coeffs() const { return coeffs_; }
    std::vector<Real>& mutable_coeffs() { return coeffs_; }

    Real operator[](std::size_t i) const { return coeffs_[i]; }
    Real& operator[](std::size_t i) { return coeffs_[i]; }

    /// Horner evaluation at t (position center + scale*t).
    Real evaluate(Real t) const
    {
        Real acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            acc = acc * t + *it;
        return acc;
    }

    bool all_finite() const
    {
        for (const Real& c : coeffs_)
            if (!std::isfinite(c))
                return false;
        return true;
    }

    TaylorSeries& operator+=(const TaylorSeries& o)
    {
        check_compatible(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    TaylorSeries& operator-=(const TaylorSeries& o)
    {
        check_compatible(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    TaylorSeries& operator+=(Real c)
    {
        coeffs_[0] += c;
        return *this;
    }
    TaylorSeries& operator-=(Real c)
    {
        coeffs_[0] -= c;
        return *this;
    }
    TaylorSeries& operator*=(Real c)
    {
        for (Real& x : coeffs_)
            x *= c;
        return *this;
    }
    TaylorSeries& operator/=(Real c)
    {
        for (Real& x : coeffs_)
            x /= c;
        return *this;
    }

    TaylorSeries operator-() const
    {
        TaylorSeries r = *this;
        for (Real& x : r.coeffs_)
            x = -x;
        return r;
    }

    friend TaylorSeries operator+(TaylorSeries a, const TaylorSeries& b) { return a += b; }
    friend TaylorSeries operator-(TaylorSeries a, const TaylorSeries& b) { return a -= b; }
    friend TaylorSeries operator+(TaylorSeries a, Real c) { return a += c; }
    friend TaylorSeries operator+(Real c, TaylorSeries a) { return a += c; }
    friend TaylorSeries operator-(TaylorSeries a, Real c) { return a -= c; }
    friend TaylorSeries operator-(Real c, const TaylorSeries& a) { return (-a) += c; }
    friend TaylorSeries operator*(TaylorSeries a, Real c) { return a *= c; }
    friend TaylorSeries operator*(Real c, TaylorSeries a) { return a *= c; }
    friend TaylorSeries operator/(TaylorSeries a, Real c) { return a /= c; }

    friend TaylorSeries operator*(const TaylorSeries& a, const TaylorSeries& b)
    {
        a.check_compatible(b);
        const std::size_t n = a.coeffs_.size();
        std::vector<Real> r(n, Real(0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; i + j < n; ++j)
                r[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return {a.center_, std::move(r), a.scale_};
    }

    friend TaylorSeries operator/(const TaylorSeries& a, const TaylorSeries& b)
    {
        a.check_compatible(b);
        const std::size_t n = a.coeffs_.size();
        std::vector<Real> q(n, Real(0));
        for (std::size_t k = 0; k < n; ++k) {
            Real acc = a.coeffs_[k];
            for (std::size_t j = 1; j <= k; ++j)
                acc -= b.coeffs_[j] * q[k - j];
            q[k] = acc / b.coeffs_[0];
        }
        return {a.center_, std::move(q), a.scale_};
    }

    friend TaylorSeries operator/(Real c, const TaylorSeries& b)
    {
        return TaylorSeries::constant(b.center_, b.order(), c, b.scale_) / b;
    }

private:
    void check_compatible(const TaylorSeries& o) const
    {
        if (o.coeffs_.size() != coeffs_.size() || o.center_ != center_ || o.scale_ != scale_)
            throw std::invalid_argument("TaylorSeries: mismatched center, scale or order");
    }

    Real center_{0};
    Real scale_{1};
    std::vector<Real> coeffs_{Real(0)};
};

/// a^p for real p via the recurrence  a f' = p a' f.  Requires a_0 != 0.
template <class Real>
TaylorSeries<Real> pow(const TaylorSeries<Real>& a, Real p)
{
    const auto ac = a.coeffs();
    const std::size_t n = ac.size();
    std::vector<Real> f(n, Real(0));
    f[0] = std::pow(ac[0], p);
    for (std::size_t k = 1; k < n; ++k) {
        Real acc(0);
        for (std::size_t j = 1; j <= k; ++j)
            acc += (p * Real(j) - Real(k - j)) * ac[j] * f[k - j];
        f[k] = acc / (Real(k) * ac[0]);
    }
    return {a.center(), std::move(f), a.scale()};
}

/// Integer power; negative exponents go through the reciprocal.
template <class Real>
TaylorSeries<Real> powi(const TaylorSeries<Real>& a, int p)
{
    if (p == 0)
        return TaylorSeries<Real>::constant(a.center(), a.order(), Real(1), a.scale());
    if (p < 0)
        return Real(1) / powi(a, -p);
    TaylorSeries<Real> result = TaylorSeries<Real>::constant(a.center(), a.order(), Real(1), a.scale());
    TaylorSeries<Real> base = a;
    while (p > 0) {
        if (p & 1)
            result = result * base;
        p >>= 1;
        if (p > 0)
            base = base * base;
    }
    return result;
}

template <class Real>
TaylorSeries<Real> exp(const TaylorSeries<Real>& a)
{
    const auto ac = a.coeffs();
    const std::size_t n = ac.size();
    std::vector<Real> f(n, Real(0));
    f[0] = std::exp(ac[0]);
    for (std::size_t k = 1; k < n; ++k) {
        Real acc(0);
        for (std::size_t j = 1; j <= k; ++j)
            acc += Real(j) * ac[j] * f[k - j];
        f[k] = acc / Real(k);
    }
    return {a.center(), std::move(f), a.scale()};
}

template <class Real>
TaylorSeries<Real> log(const TaylorSeries<Real>& a)
{
    const auto ac = a.coeffs();
    const std::size_t n = ac.size();
    std::vector<Real> f(n, Real(0));
    f[0] = std::log(ac[0]);
    for (std::size_t k = 1; k < n; ++k) {
        Real acc = ac[k];
        for (std::size_t j = 1; j < k; ++j)
            acc -= Real(j) * f[j] * ac[k - j] / Real(k);
        f[k] = acc / ac[0];
    }
    return {a.center(), std::move(f), a.scale()};
}

/// Taylor coefficients of c * x^(-p) about x = center, p any integer, times scale^mu.
/// For p > 0:  c (-1)^mu p(p+1)...(p+mu-1)/mu! center^(-p-mu) scale^mu.
template <class Real>
std::vector<Real> power_law_coeffs(Real c, int p, Real center, int order, Real scale = Real(1))
{
    std::vector<Real> v(static_cast<std::size_t>(order) + 1, Real(0));
    if (p <= 0) {
        // polynomial c x^n, n = -p: binomial expansion, valid at center = 0
        const int n = -p;
        Real binom(1);
        for (int mu = 0; mu <= std::min(n, order); ++mu) {
            v[static_cast<std::size_t>(mu)] = c * binom * std::pow(center, Real(n - mu)) * std::pow(scale, Real(mu));
            binom = binom * Real(n - mu) / Real(mu + 1);
        }
        return v;
    }
    const Real ratio = scale / center;
    Real t = c * std::pow(center, Real(-p));
    v[0] = t;
    for (int mu = 1; mu <= order; ++mu) {
        t = t * (-Real(p + mu - 1) / Real(mu)) * ratio;
        v[static_cast<std::size_t>(mu)] = t;
    }
    return v;
}

} // namespace smx
