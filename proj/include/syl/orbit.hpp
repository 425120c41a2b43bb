#pragma once

#include <optional>
#include <string>

#include "syl/integrate.hpp"
#include "syl/params.hpp"

namespace syl {

// Global classes of radial solutions, keyed by (regime, h):
//   Spherical        h = 0 (any regime): xi = ln cosh t, the round metric
//   Periodic         2k < n, 0 < h < h*: Delaunay-type oscillation
//   CylinderConstant 2k < n, h = h*:     the constant cylinder xi = y*
//   ConeLike         2k = n, 0 < h < 1:  asymptotically conical, slope -> sqrt(1-h^{1/k})
//   FiniteLimit      2k > n, h > 0:      u tends to a positive limit at the puncture,
//                                        correction exponent 2 - n/k
enum class SolutionKind { Spherical, Periodic, CylinderConstant, ConeLike, FiniteLimit };

const char* to_string(SolutionKind k);

struct ClassInfo {
    SolutionKind kind = SolutionKind::Spherical;
    double exponent = 0.0; // asymptotic exponent where meaningful, else NaN
};

// 1 - v^2 evaluated as (1-v)(1+v) (exact subtraction near |v| = 1).
inline double slope_factor(double v) { return (1.0 - v) * (1.0 + v); }

// Acceleration of the radial profile:
//   xi_ddot = (n/2k) e^{-2k xi} (1-xi_dot^2)^{1-k} - ((n-2k)/2k)(1-xi_dot^2).
// Signals DegenerateSlope when |1-xi_dot^2| < guard with k >= 2.
double rhs_accel(const Params& p, const RadialState& s, double guard = 1e-13);

struct RhsPartials {
    double d_xi;     // partial wrt xi
    double d_xi_dot; // partial wrt xi_dot
};
RhsPartials rhs_partials(const Params& p, const RadialState& s, double guard = 1e-13);

// Third derivative along the flow, d/dt of rhs_accel.
double rhs_accel_dt(const Params& p, const RadialState& s, double guard = 1e-13);

// Acceleration with the first integral folded in:
//   xi_ddot = (1-xi_dot^2) [ (n/2k) w - (n-2k)/(2k) ],
//   w = e^{-n xi} / (h + e^{-n xi}).
// Identical to rhs_accel on the level set {first_integral = h} but regular
// through 1-xi_dot^2 -> 0, so orbits along and near the separatrix stay
// well conditioned. Orbit construction integrates this form.
double orbit_accel(const Params& p, double h, const RadialState& s);

// Conserved quantity h = e^{(2k-n) xi} (1-xi_dot^2)^k - e^{-n xi}.
double first_integral(const Params& p, const RadialState& s);

// Stationarity function g(y) = e^{(2k-n) y} - e^{-n y} (first integral at
// zero slope) and its derivative.
double stationary_value(const Params& p, double y);
double stationary_slope(const Params& p, double y);

// Location and height of the maximum of g for 2k < n:
//   y* = ln(n/(n-2k)) / (2k),  h* = (2k/(n-2k)) ((n-2k)/n)^{n/2k}.
double y_star(const Params& p);
double hstar(const Params& p);

// Smallest nonnegative root of g(y) = h — the canonical minimum of the
// profile. Subcritical: bisection on [0, y*] + two Newton polish steps.
// Critical: closed form -ln(1-h)/n. Supercritical: unique root of the
// increasing g. Throws for h outside the regime's admissible range.
double xi_minus(const Params& p, double h);

// Largest root of g(y) = h (the profile maximum), 2k < n, 0 < h < h*.
double xi_plus(const Params& p, double h);

// Classification by (regime, h); throws InadmissibleInput for h outside
// the admissible set. h within a ~64 eps window of h* counts as h*.
ClassInfo classify(const Params& p, double h);

// A constructed global solution with dense output over [t_min, t_max].
class Orbit {
public:
    Params params;
    double h = 0.0;
    ClassInfo cls;
    std::optional<double> period; // set for Periodic; 0 for CylinderConstant
    IntegStats stats;
    double max_drift = 0.0; // max |first_integral - h| over accepted nodes
    double t_min = 0.0, t_max = 0.0;
    Tolerances tol;

    RadialState at(double t) const;
    double xi(double t) const { return at(t).xi; }
    double xi_dot(double t) const { return at(t).xi_dot; }
    double xi_ddot(double t) const { return orbit_accel(params, h, at(t)); }

    const DensePath<2>& path() const { return path_; }
    DensePath<2>& path() { return path_; }

private:
    DensePath<2> path_;
};

// Canonical orbit: xi(0) = xi_minus-analogue, xi_dot(0) = 0, integrated over
// [t_min, t_max] (t_min <= 0 <= t_max). Period populated for Periodic class.
Orbit build_orbit(const Params& p, double h, double t_min, double t_max,
                  const Tolerances& tol = {});

// Distance between consecutive minima of the canonical periodic orbit,
// root-polished on the dense output; checks the phase returns to 1e-8.
// Integrates past the stored span if needed. Throws NoPeriod on failure.
double detect_period(const Orbit& o);

// Orbit state at arbitrary t: inside the stored span this is o.at(t);
// outside it, periodic orbits are reduced modulo the period (the stored
// span must cover one full period). Throws for non-periodic orbits
// evaluated outside their span.
RadialState orbit_state(const Orbit& o, double t);

// k = 1 classical constants: the constant cylinder height
// eps0 = ((n-2)/n)^{(n-2)/4} and the energy floor
// dstar = -((n-2)/2) ((n-2)/n)^{n/2}.
struct K1Constants {
    double eps0;
    double dstar;
};
K1Constants k1_constants(int n);

// k = 1 equation in the scaled profile psi = e^{-(n-2) xi / 2}:
//   psi_tt = ((n-2)^2/4) psi - (n(n-2)/4) psi^{(n+2)/(n-2)}
// with conserved energy
//   D = psi_dot^2 + ((n-2)^2/4) (psi^{2n/(n-2)} - psi^2).
double k1_accel(int n, double psi);
double k1_energy(int n, double psi_dot, double psi);

} // namespace syl
