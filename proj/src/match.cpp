#include "syl/match.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>

#include "syl/numerics.hpp"

namespace syl {

const char* to_string(PsiCase c) {
    switch (c) {
        case PsiCase::ConstantPsi: return "ConstantPsi";
        case PsiCase::PeriodicPsi: return "PeriodicPsi";
    }
    return "?";
}

namespace {

// Grid sampling of the decay integrand e2^{1/l} + sup_{tau >= t} |e1(tau)|
// over [t0, t1], with suffix trapezoid integrals for tail lookups.  The
// sup-tail is the suffix maximum of |e1| on the same grid, so a forcing
// that is not monotone is still majorized correctly at grid resolution.
struct DecayGrid {
    std::vector<double> ts, g, tail; // tail[i] = integral of g over [ts[i], ts.back()]

    double tail_from(double t) const {
        if (ts.size() < 2) return 0.0;
        if (t <= ts.front()) return tail.front();
        if (t >= ts.back()) return 0.0;
        const std::size_t i =
            static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
        const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
        const double gt = g[i] + w * (g[i + 1] - g[i]);
        return 0.5 * (gt + g[i + 1]) * (ts[i + 1] - t) + tail[i + 1];
    }
};

DecayGrid make_decay_grid(const MatchProblem& p, double t0, double t1, int npts) {
    DecayGrid d;
    if (!(t1 > t0)) throw InadmissibleInput("decay grid: empty horizon");
    npts = std::max(npts, 16);
    d.ts.resize(npts);
    d.g.resize(npts);
    d.tail.assign(npts, 0.0);
    std::vector<double> e1abs(npts);
    for (int i = 0; i < npts; ++i) {
        d.ts[i] = t0 + (t1 - t0) * i / (npts - 1);
        e1abs[i] = std::abs(p.e1(d.ts[i]));
    }
    for (int i = npts - 2; i >= 0; --i) e1abs[i] = std::max(e1abs[i], e1abs[i + 1]);
    for (int i = 0; i < npts; ++i)
        d.g[i] = std::pow(std::max(p.e2(d.ts[i]), 0.0), 1.0 / p.l) + e1abs[i];
    for (int i = npts - 2; i >= 0; --i)
        d.tail[i] = d.tail[i + 1] + 0.5 * (d.g[i] + d.g[i + 1]) * (d.ts[i + 1] - d.ts[i]);
    return d;
}

// C_fit and the health flags shared by match_orbit and verify_envelope.
// Ratios are informative only where the bound exceeds 1e-8; below that the
// mathematical envelope is buried under integration round-off, and the row
// is instead required to be small outright.
struct RatioStats {
    double cfit = 0.0;
    bool tiny_ok = true;
    bool trend_ok = true;
};

RatioStats ratio_stats(const std::vector<std::array<double, 3>>& rows) {
    RatioStats rs;
    std::vector<double> ratios;
    ratios.reserve(rows.size());
    for (const auto& r : rows) {
        if (r[2] >= 1e-8) {
            ratios.push_back(r[1] / r[2]);
            rs.cfit = std::max(rs.cfit, ratios.back());
        } else if (r[1] > 1e-7) {
            rs.tiny_ok = false;
        }
    }
    if (ratios.size() >= 4) {
        const std::size_t half = ratios.size() / 2;
        double early = 0.0, late = 0.0;
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            double& side = (i < half) ? early : late;
            side = std::max(side, ratios[i]);
        }
        rs.trend_ok = late <= std::max(5.0 * early, 1e-3);
    }
    return rs;
}

double eval_v(const Trajectory& tr, double t) { return tr.at(t)[1]; }

} // namespace

std::array<double, 2> Trajectory::at(double t) const {
    const Vec<2> y = path.eval(t);
    return {y[0], y[1]};
}

void estimate_constants(MatchProblem& p, const PsiProfile& psi) {
    p.m = psi.m;
    p.M = psi.M;
    p.T = psi.T;
    p.a = std::abs(p.f(0.0, p.m));
    if (!(p.eps1 > 0.0)) throw InadmissibleInput("estimate_constants: eps1 must be positive");

    if (p.kind == PsiCase::ConstantPsi) {
        p.Lambda = 0.0;
        p.eps2 = p.eps1;
        p.T0 = 0.0;
    } else {
        if (!(p.T > 0.0))
            throw InadmissibleInput("estimate_constants: periodic attractor needs T > 0");
        double lam = 0.0;
        for (int i = 0; i <= 512; ++i) {
            const auto s = psi.eval(p.T * i / 512.0);
            lam = std::max({lam, std::abs(s[1]), std::abs(p.f(s[1], s[0]))});
        }
        p.Lambda = lam;

        if (!(p.a > 0.0))
            throw InadmissibleInput("estimate_constants: the tracked minimum is an equilibrium");
        double eps = p.eps1;
        bool found = false;
        for (int halving = 0; halving < 40; ++halving) {
            double fmin = std::numeric_limits<double>::infinity();
            const int ng = 32;
            for (int i = -ng; i <= ng; ++i)
                for (int j = -ng; j <= ng; ++j) {
                    const double x = eps * i / ng, dy = eps * j / ng;
                    if (std::abs(x) + std::abs(dy) > eps) continue;
                    fmin = std::min(fmin, std::abs(p.f(x, p.m + dy)));
                }
            if (fmin >= 0.75 * p.a) {
                found = true;
                break;
            }
            eps *= 0.5;
        }
        if (!found)
            throw InadmissibleInput("estimate_constants: no ball sustains the acceleration floor");
        p.eps2 = eps;

        double t0 = -1.0;
        for (double t = 0.0; t <= 400.0; t += 0.25)
            if (std::abs(p.e1(t)) < 0.25 * p.a) {
                t0 = t;
                break;
            }
        if (t0 < 0.0)
            throw InadmissibleInput("estimate_constants: forcing never drops below a/4");
        p.T0 = t0;
    }

    // Flow-map sensitivity: finite-difference the autonomous flow around the
    // profile start over two periods and take the worst amplification.
    const double horizon = std::max(2.0 * p.T, 2.0);
    const double fd = 1e-6;
    auto rhs = [&p](double, const Vec<2>& y, Vec<2>& dy) {
        dy[0] = y[1];
        dy[1] = p.f(y[1], y[0]);
    };
    DensePath<2> base;
    integrate<2>(rhs, 0.0, Vec<2>{p.m, 0.0}, horizon, Tolerances{}, &base);
    double bmax = 1.0;
    for (int probe = 0; probe < 4; ++probe) {
        Vec<2> y0{p.m, 0.0};
        y0[probe / 2] += (probe % 2 ? -fd : fd);
        DensePath<2> path;
        integrate<2>(rhs, 0.0, y0, horizon, Tolerances{}, &path);
        for (int i = 0; i <= 128; ++i) {
            const double t = horizon * i / 128.0;
            const Vec<2> a = base.eval(t), b = path.eval(t);
            bmax = std::max(bmax, (std::abs(a[0] - b[0]) + std::abs(a[1] - b[1])) / fd);
        }
    }
    p.B = bmax;
}

bool check_decay(const MatchProblem& p, double horizon) {
    if (!(horizon > 0.0)) throw InadmissibleInput("check_decay: horizon must be positive");
    const DecayGrid d = make_decay_grid(p, 0.0, horizon, 4097);
    const double total = d.tail_from(0.0);
    const double inc1 = d.tail_from(0.25 * horizon) - d.tail_from(0.5 * horizon);
    const double inc2 = d.tail_from(0.5 * horizon);
    (void)total;
    return inc2 <= std::max(0.6 * inc1, 1e-8);
}

bool check_nondegeneracy(const MatchProblem& p) {
    if (!(p.A_nd > 0.0) || !(p.eps1 > 0.0)) return false;
    if (p.kind == PsiCase::PeriodicPsi) {
        const double h0 = p.H(0.0, p.m);
        for (int i = -200; i <= 200; ++i) {
            const double dy = p.eps1 * i / 200.0;
            if (std::abs(dy) < 1e-9) continue;
            if (std::abs(p.H(0.0, p.m + dy) - h0) < p.A_nd * std::pow(std::abs(dy), p.l))
                return false;
        }
        return true;
    }
    for (int i = -40; i <= 40; ++i)
        for (int j = -40; j <= 40; ++j) {
            const double x = p.eps1 * i / 40.0, dy = p.eps1 * j / 40.0;
            const double r = std::abs(x) + std::abs(dy);
            if (r < 1e-9 || r > p.eps1) continue;
            const double floor =
                p.A_nd * (std::pow(std::abs(x), p.l) + std::pow(std::abs(dy), p.l));
            if (p.H(x, p.m + dy) < floor) return false;
        }
    return true;
}

void validate(const MatchProblem& p, double horizon) {
    if (!check_nondegeneracy(p))
        throw InadmissibleInput("validate: sampled non-degeneracy bound fails");
    if (!check_decay(p, horizon))
        throw InadmissibleInput("validate: decay integral is not Cauchy over doubling horizons");
}

Trajectory integrate_perturbed(const MatchProblem& p, std::array<double, 2> init,
                               double t0, double t1, const Tolerances& tol) {
    Trajectory tr;
    tr.t0 = t0;
    tr.t1 = t1;
    tr.apriori = std::max({1.0, std::abs(init[0]) + std::abs(init[1]),
                           std::max(std::abs(p.m), std::abs(p.M)) + p.Lambda}) +
                 1.0;
    const double cap = 10.0 * tr.apriori;
    auto f = p.f;
    auto e1 = p.e1;
    auto rhs = [&f, &e1](double t, const Vec<2>& y, Vec<2>& dy) {
        dy[0] = y[1];
        dy[1] = f(y[1], y[0]) + e1(t);
    };
    bool escaped = false;
    tr.stats = integrate<2>(rhs, t0, Vec<2>{init[0], init[1]}, t1, tol, &tr.path,
                            [cap, &escaped](double, const Vec<2>& y) {
                                if (std::abs(y[0]) + std::abs(y[1]) > cap) {
                                    escaped = true;
                                    return false;
                                }
                                return true;
                            });
    if (escaped)
        throw IntegrationFailure("integrate_perturbed: trajectory escaped the a priori bound");
    return tr;
}

void fit_slack(MatchProblem& p, const Trajectory& traj) {
    const auto& nodes = traj.path.nodes;
    if (nodes.size() < 2) throw InadmissibleInput("fit_slack: trajectory has no dense output");
    auto ts = std::make_shared<std::vector<double>>();
    auto env = std::make_shared<std::vector<double>>();
    ts->reserve(nodes.size());
    env->reserve(nodes.size());
    double hscale = 1.0;
    for (const auto& nd : nodes) {
        ts->push_back(nd.t);
        env->push_back(std::abs(p.H(nd.y[1], nd.y[0])));
        hscale = std::max(hscale, env->back());
    }
    // Running maximum from the right makes the envelope monotone
    // non-increasing; the floor absorbs round-off in the evaluated H so the
    // fit stays a majorant of what the numbers actually are.
    const double floor = 1e-12 * hscale;
    for (std::size_t i = env->size() - 1; i-- > 0;) (*env)[i] = std::max((*env)[i], (*env)[i + 1]);
    for (auto& e : *env) e = std::max(e, floor);
    p.e2 = [ts, env](double t) {
        if (t <= ts->front()) return env->front();
        if (t >= ts->back()) return env->back();
        const std::size_t i =
            static_cast<std::size_t>(std::upper_bound(ts->begin(), ts->end(), t) - ts->begin()) -
            1;
        return (*env)[i];
    };
}

double tail_level(const Trajectory& traj, const std::function<double(double, double)>& q,
                  double window) {
    const auto& nd = traj.path.nodes;
    if (nd.size() < 2) throw InadmissibleInput("tail_level: trajectory has no dense output");
    const double cutoff = nd.back().t - window;
    double sum = 0.0;
    long cnt = 0;
    for (const auto& node : nd)
        if (node.t >= cutoff) {
            sum += q(node.y[1], node.y[0]);
            ++cnt;
        }
    if (cnt == 0) throw InadmissibleInput("tail_level: empty tail window");
    return sum / cnt;
}

CriticalPoints find_critical_points(const Trajectory& traj, const MatchProblem& p) {
    CriticalPoints cp;
    const auto& nodes = traj.path.nodes;
    if (nodes.size() < 2)
        throw InadmissibleInput("find_critical_points: trajectory has no dense output");
    if (!(p.A_nd > 0.0))
        throw InadmissibleInput("find_critical_points: non-degeneracy data missing");

    if (p.kind == PsiCase::ConstantPsi) {
        double entry = std::numeric_limits<double>::quiet_NaN();
        double worst = 0.0;
        for (const auto& nd : nodes) {
            const double dist = std::abs(nd.y[1]) + std::abs(nd.y[0] - p.m);
            if (std::isnan(entry)) {
                if (dist < p.eps2) entry = nd.t;
                continue;
            }
            const double lhs = std::pow(std::abs(nd.y[1]), p.l) +
                               std::pow(std::abs(nd.y[0] - p.m), p.l);
            worst = std::max(worst, p.A_nd * lhs / std::max(p.e2(nd.t), 1e-300));
        }
        if (std::isnan(entry))
            throw InadmissibleInput("find_critical_points: trajectory never enters the tracked ball");
        cp.entry_time = entry;
        cp.worst_pointwise = worst;
        return cp;
    }

    if (!(p.T > 0.0)) throw InadmissibleInput("find_critical_points: need a positive period");
    auto vat = [&traj](double t) { return eval_v(traj, t); };
    auto acc = [&traj, &p](double t) {
        const auto s = traj.at(t);
        return p.f(s[1], s[0]) + p.e1(t);
    };
    auto record = [&](double t, long slot) {
        cp.tau.push_back(t);
        cp.slot.push_back(slot);
        cp.value_gap.push_back(std::abs(traj.at(t)[0] - p.m));
        cp.slack_gap.push_back(std::pow(std::max(p.e2(t), 0.0) / p.A_nd, 1.0 / p.l));
    };

    // Anchor: the first admissible upward crossing of y' (or the start node
    // itself when the run begins at rest on the minimum branch).
    double tau0 = std::numeric_limits<double>::quiet_NaN();
    if (std::abs(nodes.front().y[1]) <= 1e-12 * std::max(1.0, std::abs(nodes.front().y[0])) &&
        acc(nodes.front().t) > 0.0 && std::abs(nodes.front().y[0] - p.m) <= p.eps1) {
        tau0 = nodes.front().t;
    } else {
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            if (!(nodes[i].y[1] <= 0.0 && nodes[i + 1].y[1] > 0.0)) continue;
            const double r = find_root(vat, nodes[i].t, nodes[i + 1].t, 1e-12);
            if (acc(r) > 0.0 && std::abs(traj.at(r)[0] - p.m) <= p.eps1) {
                tau0 = r;
                break;
            }
        }
    }
    if (std::isnan(tau0))
        throw InadmissibleInput("find_critical_points: no critical time near the tracked minimum");
    record(tau0, 0);

    // March window by window; each window is centered one period past the
    // last accepted critical time (advanced by whole periods across missed
    // windows) and the candidate closest to its center wins.
    long last_slot = 0;
    double last_tau = tau0;
    for (long w = 1;; ++w) {
        const double center = last_tau + p.T * static_cast<double>(w - last_slot);
        if (center + 0.5 * p.T > traj.t1) break;
        if (w - last_slot > 64) break; // lost the trail
        const double lo = center - 0.5 * p.T + 1e-9;
        const double hi = center + 0.5 * p.T;
        double best = std::numeric_limits<double>::quiet_NaN();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            if (nodes[i].t < lo || nodes[i + 1].t > hi) continue;
            if (!(nodes[i].y[1] <= 0.0 && nodes[i + 1].y[1] > 0.0)) continue;
            const double r = find_root(vat, nodes[i].t, nodes[i + 1].t, 1e-12);
            if (!(acc(r) > 0.0) || std::abs(traj.at(r)[0] - p.m) > p.eps1) continue;
            if (std::abs(r - center) < best_dist) {
                best_dist = std::abs(r - center);
                best = r;
            }
        }
        if (std::isnan(best)) {
            cp.missed.push_back(w);
            continue;
        }
        record(best, w);
        last_tau = best;
        last_slot = w;
    }
    return cp;
}

MatchResult match_orbit(const MatchProblem& p, const Trajectory& traj, const PsiProfile& psi) {
    if (p.kind == PsiCase::ConstantPsi)
        throw InadmissibleInput("match_orbit: constant attractor has no critical-time recursion");
    const CriticalPoints cp = find_critical_points(traj, p);
    if (cp.tau.size() < 4)
        throw InadmissibleInput("match_orbit: need at least 4 tracked windows");

    MatchResult r;
    r.tau = cp.tau;
    r.T = p.T;
    r.m = p.m;
    r.M = p.M;
    const std::size_t n = cp.tau.size();
    r.delta.assign(n, 0.0);
    r.s.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.s[i] = cp.tau[i] - cp.slot[i] * p.T;
    for (std::size_t i = 1; i < n; ++i)
        r.delta[i] = cp.tau[i] - cp.tau[i - 1] - (cp.slot[i] - cp.slot[i - 1]) * p.T;

    // Truncate the shift sum at a negligible increment or 64 windows.
    std::size_t stop = 1;
    for (std::size_t i = 1; i < n; ++i) {
        stop = i;
        if (std::abs(r.delta[i]) < 1e-10 || i == 64) break;
    }
    // Two consecutive non-contracting increments above the noise scale mean
    // the declared period does not fit the trajectory; one alone may be a
    // fluctuation and is tolerated.
    if (stop >= 3 && std::abs(r.delta[stop]) > 1e-6 &&
        std::abs(r.delta[stop]) >= 0.98 * std::abs(r.delta[stop - 1]) &&
        std::abs(r.delta[stop - 1]) >= 0.98 * std::abs(r.delta[stop - 2]))
        throw IntegrationFailure("match_orbit: shift increments do not contract");

    double tail = 0.0;
    const double dl = std::abs(r.delta[stop]);
    if (dl >= 1e-10) {
        double ratio = 0.5;
        if (stop >= 2 && std::abs(r.delta[stop - 1]) > 1e-300)
            ratio = std::min(dl / std::abs(r.delta[stop - 1]), 0.9);
        tail = (r.delta[stop] > 0 ? 1.0 : -1.0) * dl * ratio / (1.0 - ratio);
    }
    r.tail = tail;
    r.s_inf = r.s[stop] + tail;

    // Envelope samples against the shifted profile, with the decay-tail
    // bound evaluated over the same horizon.
    const double tstart = cp.tau.front();
    const double tend = std::min(traj.t1, cp.tau.back() + p.T);
    const DecayGrid grid = make_decay_grid(p, std::max(traj.t0, tstart - 1.0), traj.t1, 4097);
    const int npts = std::max(65, static_cast<int>(std::ceil((tend - tstart) / p.T * 64.0)));
    r.envelope.reserve(npts + 1);
    for (int i = 0; i <= npts; ++i) {
        const double t = tstart + (tend - tstart) * i / npts;
        const auto y = traj.at(t);
        const auto ps = psi.eval(t - r.s_inf);
        const double val = std::abs(y[0] - ps[0]) + std::abs(y[1] - ps[1]);
        r.envelope.push_back({t, val, grid.tail_from(t - 1.0)});
    }
    r.C_fit = ratio_stats(r.envelope).cfit;
    return r;
}

EnvelopeCheck verify_envelope(const MatchResult& r, const MatchProblem& p) {
    EnvelopeCheck out;
    const RatioStats rs = ratio_stats(r.envelope);
    out.C_fit = rs.cfit;
    const double horizon =
        r.envelope.empty() ? std::max(8.0 * p.T, 8.0) : r.envelope.back()[0] + 1.0;
    out.ok = rs.tiny_ok && rs.trend_ok && rs.cfit <= 1e3 &&
             check_decay(p, std::max(horizon, 4.0));
    return out;
}

// ---- builders ----------------------------------------------------------

PsiProfile sigma_profile(const Params& pa, double h, const Tolerances& tol) {
    const ClassInfo ci = classify(pa, h);
    PsiProfile ps;
    if (ci.kind == SolutionKind::CylinderConstant) {
        const double ys = y_star(pa);
        ps.m = ps.M = ys;
        ps.T = 0.0;
        ps.eval = [ys](double) { return std::array<double, 2>{ys, 0.0}; };
        return ps;
    }
    if (ci.kind != SolutionKind::Periodic)
        throw InadmissibleInput("sigma_profile: level set is not a bounded oscillation");
    auto orb = std::make_shared<Orbit>(build_orbit(pa, h, 0.0, 64.0, tol));
    if (!orb->period || !(*orb->period > 0.0))
        throw NoPeriod("sigma_profile: period detection failed");
    ps.m = xi_minus(pa, h);
    ps.M = xi_plus(pa, h);
    ps.T = *orb->period;
    ps.eval = [orb](double t) {
        const RadialState s = orbit_state(*orb, t);
        return std::array<double, 2>{s.xi, s.xi_dot};
    };
    return ps;
}

MatchProblem sigma_match_problem(const Params& pa, double h, double e1_scale, double e1_rate,
                                 const PsiProfile& psi) {
    const ClassInfo ci = classify(pa, h);
    MatchProblem p;
    p.f = [pa](double x, double y) { return rhs_accel(pa, RadialState{y, x}); };
    p.H = [pa, h](double x, double y) { return h - first_integral(pa, RadialState{y, x}); };
    p.e1 = [e1_scale, e1_rate](double t) { return e1_scale * std::exp(-e1_rate * t); };
    p.e2 = [](double) { return 0.0; };

    if (ci.kind == SolutionKind::CylinderConstant) {
        p.kind = PsiCase::ConstantPsi;
        p.l = 2.0;
        p.eps1 = 0.25;
    } else if (ci.kind == SolutionKind::Periodic) {
        p.kind = PsiCase::PeriodicPsi;
        p.l = 1.0;
        // The ball must stay on the near side of the hilltop, where the
        // level-set gap |H(0,y)| is still comparable to |y - m|.
        p.eps1 = std::min(0.75 * (y_star(pa) - psi.m), 0.45);
    } else {
        throw InadmissibleInput("sigma_match_problem: level set is not a bounded oscillation");
    }

    double ratio_min = std::numeric_limits<double>::infinity();
    if (p.kind == PsiCase::PeriodicPsi) {
        const double h0 = p.H(0.0, psi.m);
        for (int i = -200; i <= 200; ++i) {
            const double dy = p.eps1 * i / 200.0;
            if (std::abs(dy) < 1e-6) continue;
            ratio_min = std::min(ratio_min,
                                 std::abs(p.H(0.0, psi.m + dy) - h0) / std::abs(dy));
        }
    } else {
        for (int i = -40; i <= 40; ++i)
            for (int j = -40; j <= 40; ++j) {
                const double x = p.eps1 * i / 40.0, dy = p.eps1 * j / 40.0;
                const double rr = std::abs(x) + std::abs(dy);
                if (rr < 1e-6 || rr > p.eps1) continue;
                ratio_min = std::min(ratio_min, p.H(x, psi.m + dy) / (x * x + dy * dy));
            }
    }
    if (!(ratio_min > 0.0))
        throw InadmissibleInput("sigma_match_problem: degenerate level-set gap on the ball");
    p.A_nd = 0.9 * ratio_min;

    estimate_constants(p, psi);
    return p;
}

PsiProfile k1_profile(int n, double dinf, const Tolerances& tol) {
    const K1Constants kc = k1_constants(n);
    if (!(dinf > kc.dstar && dinf < 0.0))
        throw InadmissibleInput("k1_profile: energy level outside the oscillatory range");
    // Lower turning value: the root of the energy at rest left of the well
    // bottom.
    auto at_rest = [n, dinf](double y) { return k1_energy(n, 0.0, y) - dinf; };
    const double m = find_root(at_rest, 1e-9, kc.eps0, 1e-14);

    auto rhs = [n](double, const Vec<2>& y, Vec<2>& dy) {
        dy[0] = y[1];
        dy[1] = k1_accel(n, y[0]);
    };
    auto path = std::make_shared<DensePath<2>>();
    integrate<2>(rhs, 0.0, Vec<2>{m, 0.0}, 64.0, tol, path.get());

    // First return to rest on the rising branch = one period.
    double T = 0.0;
    const auto& nd = path->nodes;
    for (std::size_t i = 0; i + 1 < nd.size(); ++i) {
        if (nd[i].t < 0.5) continue;
        if (nd[i].y[1] <= 0.0 && nd[i + 1].y[1] > 0.0) {
            T = find_root([&path](double t) { return path->eval(t)[1]; }, nd[i].t, nd[i + 1].t,
                          1e-12);
            break;
        }
    }
    if (!(T > 0.0)) throw NoPeriod("k1_profile: no return to the starting rest point");

    PsiProfile ps;
    ps.m = m;
    ps.T = T;
    // Upper turning value: the rest root on the far side of the well bottom
    // (the energy vanishes at 1, which lies above any admissible level).
    ps.M = find_root(at_rest, kc.eps0, 1.0, 1e-14);
    ps.eval = [path, T](double t) {
        double tr = std::fmod(t, T);
        if (tr < 0.0) tr += T;
        const Vec<2> y = path->eval(tr);
        return std::array<double, 2>{y[0], y[1]};
    };
    return ps;
}

MatchProblem k1_match_problem(int n, double dinf, double e1_scale, double e1_rate,
                              const PsiProfile& psi) {
    const K1Constants kc = k1_constants(n);
    if (!(dinf > kc.dstar && dinf < 0.0))
        throw InadmissibleInput("k1_match_problem: energy level outside the oscillatory range");
    MatchProblem p;
    p.f = [n](double, double y) { return k1_accel(n, y); };
    p.H = [n, dinf](double x, double y) { return k1_energy(n, x, y) - dinf; };
    p.e1 = [e1_scale, e1_rate](double t) { return e1_scale * std::exp(-e1_rate * t); };
    p.e2 = [](double) { return 0.0; };
    p.kind = PsiCase::PeriodicPsi;
    p.l = 1.0;
    p.eps1 = 0.75 * (kc.eps0 - psi.m);

    double ratio_min = std::numeric_limits<double>::infinity();
    const double h0 = p.H(0.0, psi.m);
    for (int i = -200; i <= 200; ++i) {
        const double dy = p.eps1 * i / 200.0;
        if (std::abs(dy) < 1e-6) continue;
        ratio_min =
            std::min(ratio_min, std::abs(p.H(0.0, psi.m + dy) - h0) / std::abs(dy));
    }
    if (!(ratio_min > 0.0))
        throw InadmissibleInput("k1_match_problem: degenerate energy gap on the ball");
    p.A_nd = 0.9 * ratio_min;

    estimate_constants(p, psi);
    return p;
}

} // namespace syl
