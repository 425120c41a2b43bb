#include "syl/orbit.hpp"

#include <cmath>
#include <limits>

#include "syl/numerics.hpp"

namespace syl {

namespace {

double ipow(double x, int m) {
    double r = 1.0;
    for (int i = 0; i < m; ++i) r *= x;
    return r;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

const char* to_string(SolutionKind k) {
    switch (k) {
        case SolutionKind::Spherical: return "Spherical";
        case SolutionKind::Periodic: return "Periodic";
        case SolutionKind::CylinderConstant: return "CylinderConstant";
        case SolutionKind::ConeLike: return "ConeLike";
        case SolutionKind::FiniteLimit: return "FiniteLimit";
    }
    return "?";
}

double rhs_accel(const Params& p, const RadialState& s, double guard) {
    const double q = slope_factor(s.xi_dot);
    if (p.k >= 2 && std::abs(q) < guard)
        throw DegenerateSlope("rhs_accel: |1 - xi_dot^2| below guard");
    const double n = p.n, k = p.k;
    const double ek = std::exp(-2.0 * k * s.xi);
    return 0.5 * n / k * ek / ipow(q, p.k - 1) - 0.5 * (n - 2.0 * k) / k * q;
}

RhsPartials rhs_partials(const Params& p, const RadialState& s, double guard) {
    const double q = slope_factor(s.xi_dot);
    if (p.k >= 2 && std::abs(q) < guard)
        throw DegenerateSlope("rhs_partials: |1 - xi_dot^2| below guard");
    const double n = p.n, k = p.k;
    const double ekq = std::exp(-2.0 * k * s.xi) / ipow(q, p.k - 1);
    RhsPartials d;
    d.d_xi = -n * ekq;
    d.d_xi_dot = s.xi_dot * (n * (k - 1.0) / k * ekq / q + (n - 2.0 * k) / k);
    return d;
}

double rhs_accel_dt(const Params& p, const RadialState& s, double guard) {
    const RhsPartials d = rhs_partials(p, s, guard);
    return d.d_xi * s.xi_dot + d.d_xi_dot * rhs_accel(p, s, guard);
}

double orbit_accel(const Params& p, double h, const RadialState& s) {
    const double q = std::max(slope_factor(s.xi_dot), 0.0);
    const double en = std::exp(-static_cast<double>(p.n) * s.xi);
    const double w = en / (h + en);
    const double n = p.n, k = p.k;
    return q * (0.5 * n / k * w - 0.5 * (n - 2.0 * k) / k);
}

double first_integral(const Params& p, const RadialState& s) {
    const double q = slope_factor(s.xi_dot);
    return std::exp((2.0 * p.k - p.n) * s.xi) * ipow(q, p.k) - std::exp(-p.n * s.xi);
}

double stationary_value(const Params& p, double y) {
    return std::exp((2.0 * p.k - p.n) * y) - std::exp(-static_cast<double>(p.n) * y);
}

double stationary_slope(const Params& p, double y) {
    return (2.0 * p.k - p.n) * std::exp((2.0 * p.k - p.n) * y) +
           p.n * std::exp(-static_cast<double>(p.n) * y);
}

double y_star(const Params& p) {
    if (2 * p.k >= p.n) throw InadmissibleInput("y_star: requires 2k < n");
    return std::log(static_cast<double>(p.n) / (p.n - 2.0 * p.k)) / (2.0 * p.k);
}

double hstar(const Params& p) {
    if (2 * p.k >= p.n) throw InadmissibleInput("hstar: requires 2k < n");
    const double n = p.n, k = p.k;
    return 2.0 * k / (n - 2.0 * k) * std::pow((n - 2.0 * k) / n, n / (2.0 * k));
}

namespace {

// Bisection of g(y) = h on a bracket where g is monotone increasing,
// to residual <= 1e-13, then two Newton polish steps.
double solve_stationary(const Params& p, double h, double lo, double hi) {
    double flo = stationary_value(p, lo) - h;
    double fhi = stationary_value(p, hi) - h;
    if (flo > 0.0 || fhi < 0.0) throw InadmissibleInput("xi_minus: no root in bracket");
    double mid = lo, fmid = flo;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        fmid = stationary_value(p, mid) - h;
        if (std::abs(fmid) <= 1e-13 || hi - lo <= 4.4e-16 * (1.0 + std::abs(mid))) break;
        if (fmid < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    for (int it = 0; it < 2; ++it) {
        const double d = stationary_slope(p, mid);
        if (std::abs(d) < 1e-8) break;
        mid -= (stationary_value(p, mid) - h) / d;
    }
    return mid;
}

} // namespace

double xi_minus(const Params& p, double h) {
    if (h < 0.0) throw InadmissibleInput("xi_minus: h must be >= 0");
    if (h == 0.0) return 0.0;
    switch (p.regime) {
        case Regime::Subcritical: {
            const double hs = hstar(p);
            const double snap = 64.0 * 2.2e-16 * std::max(1.0, hs);
            if (std::abs(h - hs) <= snap) return y_star(p);
            if (h > hs) throw InadmissibleInput("xi_minus: h exceeds hstar");
            return solve_stationary(p, h, 0.0, y_star(p));
        }
        case Regime::Critical:
            if (h >= 1.0) throw InadmissibleInput("xi_minus: need h < 1 at 2k = n");
            // g(y) = 1 - e^{-ny} here, so the root is explicit.
            return -std::log1p(-h) / p.n;
        case Regime::Supercritical: {
            double hi = 1.0;
            while (stationary_value(p, hi) < h) {
                hi *= 2.0;
                if (hi > 1e6) throw InadmissibleInput("xi_minus: h out of reach");
            }
            return solve_stationary(p, h, 0.0, hi);
        }
    }
    throw InadmissibleInput("xi_minus: bad regime");
}

double xi_plus(const Params& p, double h) {
    if (p.regime != Regime::Subcritical)
        throw InadmissibleInput("xi_plus: requires 2k < n");
    const double hs = hstar(p);
    if (!(h > 0.0 && h < hs)) throw InadmissibleInput("xi_plus: need 0 < h < hstar");
    // g decreases from h* to 0 on [y*, inf).
    double lo = y_star(p), hi = lo + 1.0;
    while (stationary_value(p, hi) > h) hi += 1.0;
    double y = find_root([&](double yy) { return stationary_value(p, yy) - h; }, lo, hi, 1e-14);
    for (int it = 0; it < 2; ++it) {
        const double d = stationary_slope(p, y);
        if (std::abs(d) < 1e-8) break;
        y -= (stationary_value(p, y) - h) / d;
    }
    return y;
}

ClassInfo classify(const Params& p, double h) {
    if (h < 0.0) throw InadmissibleInput("classify: h must be >= 0");
    ClassInfo ci;
    ci.exponent = kNaN;
    if (h == 0.0) {
        ci.kind = SolutionKind::Spherical;
        return ci;
    }
    switch (p.regime) {
        case Regime::Subcritical: {
            const double hs = hstar(p);
            const double snap = 64.0 * 2.2e-16 * std::max(1.0, hs);
            if (std::abs(h - hs) <= snap) {
                ci.kind = SolutionKind::CylinderConstant;
            } else if (h < hs) {
                ci.kind = SolutionKind::Periodic;
            } else {
                throw InadmissibleInput("classify: h exceeds hstar for 2k < n");
            }
            return ci;
        }
        case Regime::Critical:
            if (h >= 1.0) throw InadmissibleInput("classify: need h < 1 at 2k = n");
            ci.kind = SolutionKind::ConeLike;
            ci.exponent = std::sqrt(1.0 - std::pow(h, 1.0 / p.k));
            return ci;
        case Regime::Supercritical:
            ci.kind = SolutionKind::FiniteLimit;
            ci.exponent = 2.0 - static_cast<double>(p.n) / p.k;
            return ci;
    }
    throw InadmissibleInput("classify: bad regime");
}

RadialState Orbit::at(double t) const {
    const Vec<2> y = path_.eval(t);
    return RadialState{y[0], y[1]};
}

Orbit build_orbit(const Params& p, double h, double t_min, double t_max, const Tolerances& tol) {
    if (!(t_min <= 0.0 && 0.0 <= t_max && t_min < t_max))
        throw InadmissibleInput("build_orbit: need t_min <= 0 <= t_max, t_min < t_max");
    Orbit o;
    o.params = p;
    o.h = h;
    o.cls = classify(p, h);
    o.t_min = t_min;
    o.t_max = t_max;
    o.tol = tol;

    const double y0 = (o.cls.kind == SolutionKind::CylinderConstant) ? y_star(p) : xi_minus(p, h);
    const Vec<2> init{y0, 0.0};
    auto rhs = [&p, h](double, const Vec<2>& y, Vec<2>& dy) {
        if (y[1] * y[1] > 1.0 + 1e-9)
            throw IntegrationFailure("build_orbit: slope left the admissible band");
        dy[0] = y[1];
        dy[1] = orbit_accel(p, h, RadialState{y[0], y[1]});
    };

    if (t_max > 0.0) {
        o.stats = integrate<2>(rhs, 0.0, init, t_max, tol, &o.path());
    } else {
        Vec<2> f;
        rhs(0.0, init, f);
        o.path().nodes.push_back({0.0, init, f});
    }
    if (t_min < 0.0) {
        DensePath<2> back;
        const IntegStats sb = integrate<2>(rhs, 0.0, init, t_min, tol, &back);
        o.stats.accepted += sb.accepted;
        o.stats.rejected += sb.rejected;
        o.stats.rhs_evals += sb.rhs_evals;
        o.path().splice_front(back);
    }

    double drift = 0.0;
    for (const auto& nd : o.path().nodes)
        drift = std::max(drift, std::abs(first_integral(p, RadialState{nd.y[0], nd.y[1]}) - h));
    o.max_drift = drift;

    if (o.cls.kind == SolutionKind::Periodic)
        o.period = detect_period(o);
    else if (o.cls.kind == SolutionKind::CylinderConstant)
        o.period = 0.0;
    return o;
}

double detect_period(const Orbit& o) {
    if (o.cls.kind != SolutionKind::Periodic)
        throw NoPeriod("detect_period: orbit class is not Periodic");
    const Params& p = o.params;
    const Tolerances& tol = o.tol;

    // Walk minima: after the start the slope turns positive, crosses down at
    // the profile maximum, then crosses up again at the next minimum.
    int phase = 0; // 0: waiting for downward slope crossing, 1: waiting for upward
    DenseNode<2> prev{};
    bool have_prev = false;
    DenseNode<2> bra{}, brb{};
    bool found = false;

    auto feed = [&](const DenseNode<2>& nd) -> bool {
        if (nd.t < 0.0) return true;
        if (have_prev) {
            const double da = prev.y[1], db = nd.y[1];
            if (phase == 0 && da >= 0.0 && db < 0.0) {
                phase = 1;
            } else if (phase == 1 && da <= 0.0 && db > 0.0) {
                bra = prev;
                brb = nd;
                found = true;
                return false;
            }
        }
        prev = nd;
        have_prev = true;
        return true;
    };

    for (const auto& nd : o.path().nodes)
        if (!feed(nd)) break;

    if (!found) {
        // Continue past the stored span with a scratch integration.
        const double h = o.h;
        auto rhs = [&p, h](double, const Vec<2>& y, Vec<2>& dy) {
            dy[0] = y[1];
            dy[1] = orbit_accel(p, h, RadialState{y[0], y[1]});
        };
        const DenseNode<2>& last = o.path().nodes.back();
        integrate<2>(rhs, last.t, last.y, last.t + 4000.0, tol, nullptr,
                     [&](double t, const Vec<2>& y) {
                         Vec<2> f;
                         f[0] = y[1];
                         f[1] = orbit_accel(p, h, RadialState{y[0], y[1]});
                         return feed(DenseNode<2>{t, y, f});
                     });
        if (!found) throw NoPeriod("detect_period: no second minimum found in span");
    }

    DensePath<2> local;
    local.nodes = {bra, brb};
    const double T =
        find_root([&](double t) { return local.eval(t)[1]; }, bra.t, brb.t, tol.event);

    const RadialState sT{local.eval(T)[0], local.eval(T)[1]};
    if (orbit_accel(p, o.h, sT) <= 0.0)
        throw NoPeriod("detect_period: located critical point is not a minimum");
    const double xi0 = o.xi(0.0);
    if (std::abs(sT.xi - xi0) > 1e-8)
        throw NoPeriod("detect_period: phase did not return to the starting minimum");
    return T;
}

RadialState orbit_state(const Orbit& o, double t) {
    if (t >= o.t_min && t <= o.t_max) return o.at(t);
    if (o.cls.kind == SolutionKind::Periodic && o.period && *o.period > 0.0) {
        const double T = *o.period;
        if (o.t_max + 1e-9 < T)
            throw InadmissibleInput("orbit_state: stored span shorter than one period");
        double t0 = std::fmod(t, T);
        if (t0 < 0.0) t0 += T;
        return o.at(t0);
    }
    throw InadmissibleInput("orbit_state: t outside the stored span of a non-periodic orbit");
}

K1Constants k1_constants(int n) {
    if (n < 3) throw InadmissibleInput("k1_constants: need n >= 3");
    K1Constants c;
    const double r = (n - 2.0) / n;
    c.eps0 = std::pow(r, 0.25 * (n - 2.0));
    c.dstar = -0.5 * (n - 2.0) * std::pow(r, 0.5 * n);
    return c;
}

double k1_accel(int n, double psi) {
    if (psi < 0.0) throw InadmissibleInput("k1_accel: psi must be >= 0");
    const double a = 0.25 * (n - 2.0) * (n - 2.0);
    const double b = 0.25 * n * (n - 2.0);
    return a * psi - b * std::pow(psi, (n + 2.0) / (n - 2.0));
}

double k1_energy(int n, double psi_dot, double psi) {
    const double a = 0.25 * (n - 2.0) * (n - 2.0);
    return psi_dot * psi_dot + a * (std::pow(psi, 2.0 * n / (n - 2.0)) - psi * psi);
}

} // namespace syl
