// sphkep/quadrature.hpp
//
// The two quadrature rules used by the library.
//
//  * trapezoid_periodic: composite trapezoid with node doubling. For a smooth
//    periodic integrand over a full period the rule converges geometrically,
//    so it is the method of choice for full-revolution integrals.
//  * adaptive_simpson: classic recursive Simpson with Richardson correction,
//    used for partial arcs where periodicity does not help.
#pragma once

#include <cmath>
#include <utility>

#include "sphkep/errors.hpp"

namespace sphkep {

/// Integrate f over one full period [0, period]. Doubles the node count until
/// two consecutive refinements agree within abs_tol twice in a row.
/// Throws QuadratureFailure if max_doublings is exhausted first.
template <class F>
[[nodiscard]] double trapezoid_periodic(F&& f, double period, double abs_tol,
                                        int max_doublings = 18)
{
    if (!(period > 0.0) || !(abs_tol > 0.0)) {
        throw InvalidArgument("trapezoid_periodic: period and abs_tol must be positive");
    }
    long n = 32;
    double h = period / static_cast<double>(n);
    double sum = 0.0;
    for (long k = 0; k < n; ++k) {
        sum += f(static_cast<double>(k) * h);
    }
    double value = h * sum;
    int agreements = 0;
    for (int pass = 0; pass < max_doublings; ++pass) {
        double odd = 0.0;
        for (long k = 0; k < n; ++k) {
            odd += f((static_cast<double>(k) + 0.5) * h);
        }
        const double refined = 0.5 * value + 0.5 * h * odd;
        const double diff = std::abs(refined - value);
        value = refined;
        n *= 2;
        h *= 0.5;
        agreements = (diff < abs_tol) ? agreements + 1 : 0;
        if (agreements >= 2) {
            return value;
        }
    }
    throw QuadratureFailure("trapezoid_periodic: tolerance not reached");
}

namespace detail {

template <class F>
double simpson_recurse(F& f, double a, double b, double fa, double fm, double fb,
                       double whole, double abs_tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * abs_tol) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0) {
        throw QuadratureFailure("adaptive_simpson: recursion depth exhausted");
    }
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1)
         + simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1);
}

} // namespace detail

/// Integrate f over the oriented interval [a, b] (b < a yields the negated
/// integral). abs_tol is an absolute tolerance on the result.
template <class F>
[[nodiscard]] double adaptive_simpson(F&& f, double a, double b, double abs_tol,
                                      int max_depth = 60)
{
    if (!(abs_tol > 0.0)) {
        throw InvalidArgument("adaptive_simpson: abs_tol must be positive");
    }
    if (a == b) {
        return 0.0;
    }
    if (b < a) {
        return -adaptive_simpson(std::forward<F>(f), b, a, abs_tol, max_depth);
    }
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

} // namespace sphkep
