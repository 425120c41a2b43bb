#pragma once

// Asymptotic matching for perturbed second-order dynamics.  Given a
// trajectory of
//
//     y'' = f(y', y) + e1(t)
//
// whose conserved combination H(y', y) is only approximately zero
// (|H| <= e2(t), e2 monotone non-increasing), track the critical times
// tau_j near the minimum m of the periodic attractor psi, difference them
// into per-period shifts delta_j, sum the shifts into the limiting phase
// s_inf, and certify the convergence envelope
//
//     |y - psi(. - s_inf)| + |y' - psi'(. - s_inf)|
//
// against the tail integral of e2^{1/l} + sup-tail |e1|.  The degenerate
// case of a constant attractor has no critical-time recursion; there the
// deliverable is a pointwise bound on |y'|^l + |y - m|^l instead.

#include <array>
#include <functional>
#include <vector>

#include "syl/common.hpp"
#include "syl/integrate.hpp"
#include "syl/orbit.hpp"
#include "syl/params.hpp"

namespace syl {

// Attractor shape: a genuine periodic profile, or the constant profile
// sitting at the well bottom.
enum class PsiCase { ConstantPsi, PeriodicPsi };

const char* to_string(PsiCase c);

// Reference profile of the autonomous equation, normalized so that
// psi(0) = m is the tracked minimum and psi'(0) = 0.  eval must accept any
// real argument (it reduces by the period internally) and returns
// {psi, psi'}.
struct PsiProfile {
    std::function<std::array<double, 2>(double)> eval;
    double m = 0.0;
    double M = 0.0;
    double T = 0.0; // minimal period; 0 for the constant profile
};

// Problem record: the autonomous field, its conserved combination, the
// forcing, the slack bound, the non-degeneracy data, and the estimated
// tracking constants.  Builders fill everything except e2, which starts as
// the zero function and is normally fitted from a trajectory (fit_slack).
struct MatchProblem {
    std::function<double(double, double)> f;  // acceleration f(y', y)
    std::function<double(double, double)> H;  // conserved combination, zero on psi
    std::function<double(double)> e1;         // forcing term
    std::function<double(double)> e2;         // monotone non-increasing bound on |H|
    double l = 1.0;                           // non-degeneracy exponent
    double A_nd = 0.0;                        // non-degeneracy constant
    double eps1 = 0.0;                        // radius where non-degeneracy holds
    PsiCase kind = PsiCase::PeriodicPsi;

    double m = 0.0, M = 0.0, T = 0.0; // attractor range and period

    // Estimated constants of the tracking argument (estimate_constants):
    double a = 0.0;      // |f(0, m)|
    double eps2 = 0.0;   // radius where |f| >= 3a/4
    double T0 = 0.0;     // time from which |e1| < a/4
    double Lambda = 0.0; // sup of |psi'| and |psi''| over one period
    double B = 0.0;      // flow-map sensitivity over two periods
};

// Fill p.m/M/T from the profile and estimate a, eps2, T0, Lambda, B.
// eps2 is found by halving from eps1 until the sampled minimum of |f| on
// the diamond |x| + |y-m| <= eps2 clears 3a/4; T0 by scanning |e1| < a/4.
// Throws InadmissibleInput when either search fails.
void estimate_constants(MatchProblem& p, const PsiProfile& psi);

// Doubling-horizon Cauchy check of the decay integral
// int (e2^{1/l} + sup_{tau >= t} |e1(tau)|) dt: the increment over the
// second half must be well below the increment over the second quarter,
// or negligible outright.
bool check_decay(const MatchProblem& p, double horizon);

// Sampled non-degeneracy.  Periodic attractor:
// |H(0,y) - H(0,m)| >= A_nd |y-m|^l for |y-m| <= eps1.  Constant attractor:
// H(x,y) >= A_nd (|x|^l + |y-m|^l) on the diamond |x| + |y-m| <= eps1.
bool check_nondegeneracy(const MatchProblem& p);

// Both checks; throws InadmissibleInput naming the one that failed.
void validate(const MatchProblem& p, double horizon);

// Dense trajectory of the perturbed equation.
struct Trajectory {
    DensePath<2> path; // (y, y')
    double t0 = 0.0, t1 = 0.0;
    double apriori = 0.0; // escape guard threshold is 10 x this
    IntegStats stats;

    std::array<double, 2> at(double t) const;
};

// Integrate y'' = f(y', y) + e1(t) over [t0, t1] with dense output.
// The a priori bound is max(1, |init|, max(|m|,|M|) + Lambda) + 1; the run
// aborts with IntegrationFailure when |y| + |y'| exceeds 10 x that.
Trajectory integrate_perturbed(const MatchProblem& p, std::array<double, 2> init,
                               double t0, double t1, const Tolerances& tol = {});

// Replace p.e2 by the running monotone non-increasing envelope of
// |H(y', y)| along the trajectory, floored near round-off so the fitted
// slack stays a true majorant of the numerically evaluated H.
void fit_slack(MatchProblem& p, const Trajectory& traj);

// Mean of q(y', y) over the trajectory nodes in the final `window` time
// units.  The forcing changes the conserved combination while it acts, so
// the level the trajectory actually settles on must be read off the tail;
// the attractor profile and H are then rebuilt at that level before
// matching.
double tail_level(const Trajectory& traj, const std::function<double(double, double)>& q,
                  double window = 2.0);

// Critical-time tracking output.
//
// Periodic attractor: tau[i] solves y'(tau) = 0 with y''(tau) > 0 and
// |y(tau) - m| <= eps1, one per period slot; slot[i] counts periods since
// tau[0], and slots where no admissible root was found are listed in
// missed (reported, not fatal).  value_gap[i] = |y(tau_i) - m| and
// slack_gap[i] = (e2(tau_i)/A_nd)^{1/l} is the bound it is measured
// against.
//
// Constant attractor: tau stays empty; entry_time is the first time the
// trajectory enters the eps2-ball around (0, m), and worst_pointwise the
// largest sampled value of A_nd (|y'|^l + |y-m|^l) / e2 from entry_time on
// (<= 1 when the slack bound does its job).
struct CriticalPoints {
    std::vector<double> tau;
    std::vector<long> slot;
    std::vector<long> missed;
    std::vector<double> value_gap;
    std::vector<double> slack_gap;
    double entry_time = 0.0;
    double worst_pointwise = 0.0;
};

CriticalPoints find_critical_points(const Trajectory& traj, const MatchProblem& p);

// Matching output.  delta[i] is the shift of tau[i] against tau[i-1]
// advanced by whole periods (delta[0] = 0); s[i] = tau[i] - slot[i] * T;
// s_inf = s at the truncation index plus a geometric tail estimate.
// envelope rows are {t, value, bound} with value the C^1 distance to
// psi(. - s_inf) and bound the tail integral of e2^{1/l} + sup-tail |e1|
// over [t-1, horizon].  C_fit is the largest value/bound ratio over rows
// whose bound is large enough to be informative (see verify_envelope).
struct MatchResult {
    std::vector<double> tau;
    std::vector<double> delta;
    std::vector<double> s;
    double s_inf = 0.0;
    double tail = 0.0; // tail estimate included in s_inf
    double T = 0.0, m = 0.0, M = 0.0;
    std::vector<std::array<double, 3>> envelope;
    double C_fit = 0.0;
};

// Track critical times and assemble the MatchResult.  The shift sum is
// truncated at |delta| < 1e-10 or 64 windows, whichever comes first.
// Needs at least 4 tracked windows (InadmissibleInput otherwise, and for a
// constant attractor).  Throws IntegrationFailure when consecutive shifts
// stop contracting: |delta_J| >= 0.98 |delta_{J-1}| while still above 1e-6
// means the trajectory is not locking onto the profile.
MatchResult match_orbit(const MatchProblem& p, const Trajectory& traj,
                        const PsiProfile& psi);

// Envelope certification.  Ratios value/bound are formed only where
// bound >= 1e-8: below that the mathematical envelope sits under
// double-precision integration noise and the ratio stops being
// informative; such rows must instead satisfy value <= 1e-7.  ok requires
// those small-bound rows to pass, C_fit <= 1e3, no upward trend in the
// ratios (late maximum <= 5 x early maximum), and the decay Cauchy check
// over the sampled horizon.
struct EnvelopeCheck {
    bool ok = false;
    double C_fit = 0.0;
};

EnvelopeCheck verify_envelope(const MatchResult& r, const MatchProblem& p);

// ---- builders ----------------------------------------------------------

// Radial-equation instance in its own variables: f is the state-form
// acceleration, H(x, y) = h + e^{-ny} - e^{(2k-n)y}(1 - x^2)^k, and the
// tracked minimum is the lower turning value of the h-level set.  Interior
// h gives a periodic attractor; the top of the range gives the constant
// one (l = 2 instead of 1).  e1(t) = e1_scale * exp(-e1_rate * t).
PsiProfile sigma_profile(const Params& pa, double h, const Tolerances& tol = {});
MatchProblem sigma_match_problem(const Params& pa, double h, double e1_scale,
                                 double e1_rate, const PsiProfile& psi);

// Classical second-order instance in the scaled profile variable
// psi = |x|^{(n-2)/2} u:  psi'' = a psi - b psi^{(n+2)/(n-2)} with energy
// H(x, y) = x^2 + a (y^{2n/(n-2)} - y^2) - dinf, a = (n-2)^2/4,
// b = n(n-2)/4.  Needs dstar(n) < dinf < 0 for a periodic attractor.
PsiProfile k1_profile(int n, double dinf, const Tolerances& tol = {});
MatchProblem k1_match_problem(int n, double dinf, double e1_scale, double e1_rate,
                              const PsiProfile& psi);

} // namespace syl
