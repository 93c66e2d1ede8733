#ifndef PARLAB_QUADRATURE_HPP
#define PARLAB_QUADRATURE_HPP

#include <cmath>
#include <functional>

#include "parlab/common.hpp"

namespace parlab {

struct QuadratureOptions {
    Real abs_tol = 1e-10;
    Real rel_tol = 1e-8;
    int max_depth = 40;
};

namespace detail {

template <class F>
Real adaptive_simpson_rec(const F& f, Real a, Real b, Real fa, Real fm, Real fb,
                          Real whole, Real tol, int depth, const QuadratureOptions& opt,
                          bool& ok) {
    const Real m = 0.5 * (a + b);
    const Real lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const Real flm = f(lm), frm = f(rm);
    const Real left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const Real right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    const Real delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth >= opt.max_depth) {
        if (depth >= opt.max_depth && std::abs(delta) > 15.0 * tol) ok = false;
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, opt, ok) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, opt, ok);
}

} // namespace detail

// Adaptive Simpson on [a, b]. Throws QuadratureFailure when the requested
// tolerance cannot be met within the depth budget.
template <class F>
Real integrate(const F& f, Real a, Real b, const QuadratureOptions& opt = {}) {
    if (a == b) return 0;
    const Real fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    if (!finite(fa) || !finite(fb) || !finite(fm))
        throw QuadratureFailure("non-finite integrand sample");
    const Real whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    const Real tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(whole));
    bool ok = true;
    const Real value =
        detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0, opt, ok);
    if (!ok) throw QuadratureFailure("tolerance not met at max depth");
    return value;
}

struct ImproperResult {
    Real value = 0;
    bool divergent = false;
};

// Integral of f over [a, +inf). Dyadic blocks are accumulated until the tail
// contribution is negligible; block ratios near 1 mean the integrand decays
// slower than any integrable power, reported as divergent rather than summed
// forever. Geometric tail extrapolation closes convergent power-law tails.
template <class F>
ImproperResult integrate_to_infinity(const F& f, Real a, const QuadratureOptions& opt = {},
                                     int max_blocks = 80) {
    ImproperResult res;
    Real lo = a;
    Real width = std::max<Real>(1.0, std::abs(a));
    Real prev_block = std::numeric_limits<Real>::infinity();
    int non_decaying = 0;
    for (int k = 0; k < max_blocks; ++k) {
        const Real hi = lo + width;
        const Real block = integrate(f, lo, hi, opt);
        res.value += block;
        const Real ratio = std::abs(block) / std::abs(prev_block);
        if (k > 0 && ratio < 0.9 && block >= 0) {
            // geometric tail estimate
            const Real tail = std::abs(block) * ratio / (1 - ratio);
            if (tail <= std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value))) {
                res.value += tail;
                return res;
            }
        }
        if (std::abs(block) <= std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value)))
            return res;
        if (k > 0 && ratio >= 0.9) {
            if (++non_decaying >= 6) {
                res.divergent = true;
                return res;
            }
        } else if (k > 0) {
            non_decaying = 0;
        }
        prev_block = block;
        lo = hi;
        width *= 2;
    }
    res.divergent = true;
    return res;
}

} // namespace parlab

#endif
