#pragma once

#include <cmath>
#include <concepts>

namespace billiard {

/// 7-point Gauss-Legendre rule on [a, b]; machine precision for smooth
/// integrands on sub-panel intervals.
template <std::invocable<double> F>
double gauss7(F&& f, double a, double b) {
    static constexpr double x[3] = {
        0.4058451513773971669066064, 0.7415311855993944398638648,
        0.9491079123427585245261897};
    static constexpr double w0 = 0.4179591836734693877551020;
    static constexpr double w[3] = {
        0.3818300505051189449503698, 0.2797053914892766679014678,
        0.1294849661688696932706114};
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double sum = w0 * f(c);
    for (int i = 0; i < 3; ++i)
        sum += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
    return sum * h;
}

namespace detail {

template <typename F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * tol)
        return left + right + err / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature to absolute tolerance tol.
template <std::invocable<double> F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 40) {
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace billiard
