#pragma once

// Explicit embedded Runge-Kutta pair of orders 5(4) (Dormand-Prince
// coefficients) with proportional-integral step-size control, FSAL, and
// dense output by cubic Hermite interpolation on accepted steps.
// Tolerances enter as err_i / (abs + rel * max(|y_i|, |y_i_new|)) with an
// RMS norm; a step is accepted when the norm is <= 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "syl/common.hpp"

namespace syl {

template <int N>
using Vec = std::array<double, N>;

struct IntegStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

// One accepted node: time, state, and state derivative (for Hermite data).
template <int N>
struct DenseNode {
    double t;
    Vec<N> y;
    Vec<N> f;
};

// Piecewise cubic Hermite path over accepted steps, each component
// interpolated from its own endpoint values and derivatives.
template <int N>
class DensePath {
public:
    std::vector<DenseNode<N>> nodes;

    bool empty() const { return nodes.empty(); }
    double t_front() const { return nodes.front().t; }
    double t_back() const { return nodes.back().t; }

    // Merge a path integrated backward in time (decreasing t) in front of
    // this one; both must share the t=anchor node.
    void splice_front(const DensePath<N>& backward) {
        if (backward.nodes.size() <= 1) return;
        std::vector<DenseNode<N>> merged(backward.nodes.rbegin(), backward.nodes.rend());
        merged.pop_back(); // drop duplicated anchor
        merged.insert(merged.end(), nodes.begin(), nodes.end());
        nodes = std::move(merged);
    }

    Vec<N> eval(double t) const {
        const auto [i, s, h] = locate(t);
        const DenseNode<N>& a = nodes[i];
        const DenseNode<N>& b = nodes[i + 1];
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        Vec<N> out;
        for (int c = 0; c < N; ++c)
            out[c] = h00 * a.y[c] + h10 * h * a.f[c] + h01 * b.y[c] + h11 * h * b.f[c];
        return out;
    }

    // Derivative of the interpolant (rarely needed; component derivatives of
    // the underlying system are usually available as other components).
    Vec<N> eval_deriv(double t) const {
        const auto [i, s, h] = locate(t);
        const DenseNode<N>& a = nodes[i];
        const DenseNode<N>& b = nodes[i + 1];
        const double s2 = s * s;
        const double d00 = (6 * s2 - 6 * s) / h;
        const double d10 = 3 * s2 - 4 * s + 1;
        const double d01 = (-6 * s2 + 6 * s) / h;
        const double d11 = 3 * s2 - 2 * s;
        Vec<N> out;
        for (int c = 0; c < N; ++c)
            out[c] = d00 * a.y[c] + d10 * a.f[c] + d01 * b.y[c] + d11 * b.f[c];
        return out;
    }

private:
    std::array<double, 3> locate(double t) const {
        if (nodes.size() < 2) throw Error("DensePath: empty path");
        const double lo = nodes.front().t, hi = nodes.back().t;
        const double slack = 1e-9 * (1.0 + std::abs(lo) + std::abs(hi));
        if (t < lo - slack || t > hi + slack)
            throw Error("DensePath: t outside stored span");
        t = std::clamp(t, lo, hi);
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(nodes.begin(), nodes.end(), t,
                             [](double v, const DenseNode<N>& nd) { return v < nd.t; }) -
            nodes.begin());
        if (i > 0) --i;
        if (i >= nodes.size() - 1) i = nodes.size() - 2;
        const double h = nodes[i + 1].t - nodes[i].t;
        const double s = (t - nodes[i].t) / h;
        return {static_cast<double>(i), s, h};
    }
};

namespace detail {
// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b(5th) - b(4th): error estimator weights (k2 absent).
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
} // namespace detail

// Integrate dy/dt = rhs(t, y) from t0 to t1 (either direction).
// If `path` is non-null, accepted nodes (t, y, f) are appended to it.
// `on_accept(t, y) -> bool` is called after every accepted step (and once
// at t0); returning false stops the integration early.
template <int N, class RHS, class OnAccept>
IntegStats integrate(RHS&& rhs, double t0, Vec<N> y, double t1, const Tolerances& tol,
                     DensePath<N>* path, OnAccept&& on_accept) {
    using namespace detail;
    IntegStats st;
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    if (span == 0.0) throw Error("integrate: empty span");

    auto call = [&](double t, const Vec<N>& u, Vec<N>& du) {
        rhs(t, u, du);
        ++st.rhs_evals;
    };

    Vec<N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    double t = t0;
    call(t, y, k1);
    if (path) path->nodes.push_back({t, y, k1});
    if (!on_accept(t, y)) return st;

    double h = dir * std::min({0.5 * tol.max_step, 1e-3, span});
    double errold = 1e-4; // PI memory
    const long max_steps = 50'000'000;
    long guard_steps = 0;

    while (dir * (t1 - t) > 0.0) {
        if (++guard_steps > max_steps) throw IntegrationFailure("integrate: step budget exhausted");
        if (std::abs(h) > tol.max_step) h = dir * tol.max_step;
        if (dir * (t + h - t1) > 0.0) h = t1 - t;
        if (std::abs(h) < 4.0 * 2.2e-16 * std::max(1.0, std::abs(t)))
            throw IntegrationFailure("integrate: step size underflow");

        for (int c = 0; c < N; ++c) ytmp[c] = y[c] + h * a21 * k1[c];
        call(t + c2 * h, ytmp, k2);
        for (int c = 0; c < N; ++c) ytmp[c] = y[c] + h * (a31 * k1[c] + a32 * k2[c]);
        call(t + c3 * h, ytmp, k3);
        for (int c = 0; c < N; ++c)
            ytmp[c] = y[c] + h * (a41 * k1[c] + a42 * k2[c] + a43 * k3[c]);
        call(t + c4 * h, ytmp, k4);
        for (int c = 0; c < N; ++c)
            ytmp[c] = y[c] + h * (a51 * k1[c] + a52 * k2[c] + a53 * k3[c] + a54 * k4[c]);
        call(t + c5 * h, ytmp, k5);
        for (int c = 0; c < N; ++c)
            ytmp[c] = y[c] + h * (a61 * k1[c] + a62 * k2[c] + a63 * k3[c] + a64 * k4[c] +
                                  a65 * k5[c]);
        call(t + h, ytmp, k6);
        for (int c = 0; c < N; ++c)
            ynew[c] = y[c] + h * (b1 * k1[c] + b3 * k3[c] + b4 * k4[c] + b5 * k5[c] + b6 * k6[c]);
        call(t + h, ynew, k7); // FSAL

        double err = 0.0;
        for (int c = 0; c < N; ++c) {
            const double ec = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] + e5 * k5[c] +
                                   e6 * k6[c] + e7 * k7[c]);
            const double sc = tol.abs + tol.rel * std::max(std::abs(y[c]), std::abs(ynew[c]));
            err += (ec / sc) * (ec / sc);
        }
        err = std::sqrt(err / N);

        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;
            ++st.accepted;
            if (path) path->nodes.push_back({t, y, k1});
            if (!on_accept(t, y)) return st;
            const double e = std::max(err, 1e-16);
            double fac = 0.9 * std::pow(e, -0.17) * std::pow(errold, 0.04);
            fac = std::clamp(fac, 0.2, 10.0);
            errold = e;
            h *= fac;
        } else {
            ++st.rejected;
            double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
            h *= fac;
        }
    }
    return st;
}

template <int N, class RHS>
IntegStats integrate(RHS&& rhs, double t0, const Vec<N>& y0, double t1, const Tolerances& tol,
                     DensePath<N>* path) {
    return integrate<N>(std::forward<RHS>(rhs), t0, y0, t1, tol, path,
                        [](double, const Vec<N>&) { return true; });
}

} // namespace syl
