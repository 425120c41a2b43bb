#pragma once

// Small scalar numerics used throughout: bracketed root finding
// (secant with bisection fallback), adaptive Simpson quadrature,
// and an ordinary least-squares line fit.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "syl/common.hpp"

namespace syl {

// Root of f on [a,b] with f(a), f(b) of opposite sign (or zero at an end).
// Secant step when it stays inside the bracket and converges, bisection
// otherwise; stops when the bracket width is below tol_t.
template <class F>
double find_root(F&& f, double a, double b, double tol_t) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw Error("find_root: endpoints do not bracket a root");
    for (int it = 0; it < 200; ++it) {
        if (std::abs(b - a) <= tol_t) break;
        double m;
        if (fb != fa) {
            m = b - fb * (b - a) / (fb - fa); // secant
            const double lo = std::min(a, b), hi = std::max(a, b);
            const double pad = 0.01 * (hi - lo);
            if (!(m > lo + pad && m < hi - pad)) m = 0.5 * (a + b);
        } else {
            m = 0.5 * (a + b);
        }
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

namespace detail {
template <class F>
double simpson_rec(F& f, double a, double fa, double b, double fb, double m, double fm,
                   double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) return left + right + delta / 15.0;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
} // namespace detail

// Adaptive Simpson on [a,b] to absolute tolerance tol (a <= b or b < a).
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, fa, b, fb, m, fm, whole, std::abs(tol), 40);
}

// Least-squares fit y ~= slope * x + icept.
struct LineFit {
    double slope = 0.0;
    double icept = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw Error("fit_line: degenerate abscissae");
    LineFit r;
    r.slope = (n * sxy - sx * sy) / den;
    r.icept = (sy - r.slope * sx) / n;
    return r;
}

} // namespace syl
