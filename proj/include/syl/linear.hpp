#pragma once

// Linearization of the curvature operator along a radial orbit: coefficient
// functions, per-harmonic mode operators, explicit kernel bases, Floquet
// monodromy, the Liouville normal form with its enclosure bound, and a
// variation-of-constants solver for exponentially decaying sources.

#include <array>
#include <complex>
#include <functional>

#include "syl/orbit.hpp"

namespace syl {

enum class ModeLabel { Zero, Translational, Higher };

const char* to_string(ModeLabel l);

// One spherical-harmonic channel, represented by its Laplacian eigenvalue on
// the unit (n-1)-sphere: 0, n-1, or any value >= 2n.
struct ModeSpec {
    double lambda = 0.0;
    ModeLabel label = ModeLabel::Zero;

    // Validates membership of lambda in {0} u {n-1} u [2n, inf).
    static ModeSpec make(const Params& p, double lambda);
    static ModeSpec zero() { return {0.0, ModeLabel::Zero}; }
    static ModeSpec translational(const Params& p);
    static ModeSpec higher(const Params& p, double lambda);
};

// Coefficient functions of the linearized operator along an orbit.
//
// A, B, C are the raw state forms: they read the acceleration off the
// profile state alone. B_over_A, C_over_A and the zeroth-order coefficient
// fold in the conserved quantity h instead, which keeps them regular where
// 1 - xi_dot^2 degenerates. On the orbit the two routes agree; comparing
// them measures integration drift.
//
// Holds a reference to the orbit; keep it alive. Evaluation outside the
// stored span reduces t modulo the period (periodic orbits only).
class LinearCoeffs {
public:
    explicit LinearCoeffs(const Orbit& o) : o_(&o) {}

    double A(double t) const; // (1 - xi_dot^2)/2
    double B(double t) const; // -xi_dot [ (k-1) xi_ddot + (n-2k)(1 - xi_dot^2)/2 ]
    double C(double t) const; // ((k-1) xi_ddot + (n-2k+1)(1 - xi_dot^2)/2) / (n-1)

    // B/A = ((2k-n)/k - (n(k-1)/k) w) xi_dot,           w = e^{-n xi}/(e^{-n xi} + h)
    // C/A = (n(k-1)/(k(n-1))) w + (n-k)/(k(n-1))
    double B_over_A(double t) const;
    double C_over_A(double t) const;

    // Zeroth-order coefficient of the mode operator at lambda = 0:
    // n w (1 - xi_dot^2).
    double zeroth(double t) const;

    const Orbit& orbit() const { return *o_; }

private:
    const Orbit* o_;
};

// A C^2 test function presented as a 2-jet: {value, first, second derivative}.
using Jet2 = std::array<double, 3>;
using C2Fn = std::function<Jet2(double)>;

// t -> L[phi](t) = phi'' + (B/A) phi' + (-lambda C/A + zeroth) phi.
// Holds a reference to the orbit.
std::function<double(double)> mode_residual(const Orbit& o, const ModeSpec& m, const C2Fn& phi);

// Kernel elements with their jets, for feeding mode_residual:
C2Fn slope_jet(const Orbit& o);                // xi_dot          (lambda = 0)
C2Fn decaying_translation_jet(const Orbit& o); // e^{-t}(1+xi_dot) (lambda = n-1)
C2Fn growing_translation_jet(const Orbit& o);  // e^{ t}(1-xi_dot) (lambda = n-1)

// Period map of a mode operator in (phi, phi') coordinates, integrated at
// tight tolerance jointly with the orbit state.
struct Monodromy {
    std::array<std::array<double, 2>, 2> M{}; // column j = image of unit frame j
    double det = 0.0;
    double trace = 0.0;
    std::array<std::complex<double>, 2> multipliers{};
    bool complex_pair = false;
    // |log|mu_dominant|| / T; reported as 0 for a complex pair on the unit
    // circle (diagnostic, not an error).
    double rho = 0.0;
    bool jordan_flag = false; // |trace-2| <= 1e-6 and |det-1| <= 1e-8
    double T = 0.0;
};

Monodromy monodromy(const Orbit& o, const ModeSpec& m);

// A solution basis {minus, plus} of one mode operator. Each branch returns
// {value, derivative}; both are valid for every real t, extended past the
// directly integrated window by the periodic structure. W is the Wronskian
// plus*minus' - minus*plus', evaluated through its closed form anchored at
// t = 0. Closures reference the orbit; keep it alive.
struct FundamentalPair {
    std::function<std::array<double, 2>(double)> minus, plus;
    std::function<double(double)> W;
    double W0 = 0.0;     // W(0)
    double Tprime = 0.0; // zero-mode pair: dT/dh
    double rho = 0.0;    // per-period decay/growth rate (0, 1, or the Floquet exponent)
    std::array<double, 2> multipliers{1.0, 1.0}; // per-period factors (minus, plus)
};

using OrbitFamily = std::function<Orbit(double /*h*/)>;

// lambda = 0 basis: plus = xi_dot (periodic), minus = the derivative of the
// solution family in h, integrated from the variational equation with data
// (d xi_minus/dh, 0) = (1/g'(xi_minus), 0). dT/dh comes from a centered
// difference of the period across the family (one Richardson step); the
// family callback defaults to rebuilding canonical orbits. Periodic orbits
// with interior h only. `span` is the directly integrated window (default:
// three periods; evaluation beyond it uses the per-period shift rule).
FundamentalPair zero_mode_pair(const Orbit& o, const OrbitFamily& family = {},
                               double span = 0.0);

// lambda = n-1 basis in closed form: e^{-t}(1+xi_dot), e^{t}(1-xi_dot).
// Degenerate (W identically 0) on the h = 0 orbit.
FundamentalPair translational_pair(const Orbit& o);

// lambda >= 2n basis from the Floquet multipliers: the decaying branch is
// integrated backward across one period from its value at T (forward
// integration would amplify projection error by the growing multiplier).
FundamentalPair higher_mode_pair(const Orbit& o, const ModeSpec& m);

// Liouville normal form: V L[V^{-1} psi] = psi'' + E psi with
//   V = e^{(1-n/2k) xi} (e^{-n xi} + h)^{(k-1)/2k}.
// Requires 2k <= n (h = 0 allowed). For lambda >= 2n, E <= -Cn holds along
// the orbit, with Cn = 2 + 2/(n-1) when the discriminant
// 2(n+3)k^2 - 4(n+1)k - n(n-1) is nonnegative and (n+1)/2 otherwise.
struct LiouvilleTransform {
    std::function<double(double)> V;
    std::function<double(double)> E;
    std::function<double(double)> dlogV;      // V'/V
    std::function<double(double)> ddV_over_V; // V''/V
    double Cn = 0.0;
    double discriminant = 0.0;
};

LiouvilleTransform liouville(const Orbit& o, const ModeSpec& m);

// Decaying solution of L[phi] = r on t >= 0 for |r| <~ e^{-beta t}, by
// variation of constants over the mode's fundamental pair, with quadrature
// tails truncated so the discarded mass stays below 1e-12 at t = 0.
//
// a_coeff is the coefficient of the decaying kernel element e^{-t}(1+xi_dot)
// in phi's tail: nonzero only for Translational modes with beta > 1 (for
// beta < 1 the whole solution already decays at rate beta). Translational
// modes reject rates within 1e-3 of 1; Higher modes reject rates within
// 1e-3 of the mode exponent and require beta < rho. Zero-mode solutions
// grow only polynomially per period, so any positive rate is admissible.
struct VcSolution {
    std::function<double(double)> phi;
    double a_coeff = 0.0;
};

VcSolution vc_solve(const Orbit& o, const ModeSpec& m,
                    const std::function<double(double)>& r, double beta);

} // namespace syl
