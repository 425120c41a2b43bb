#pragma once

#include <cstdint>

#include "syl/common.hpp"

namespace syl {

// Criticality of the pair (n,k) relative to 2k = n.
enum class Regime { Subcritical, Critical, Supercritical };

// Dimension n and Hessian-equation order k, 1 <= k <= n, n >= 3.
// c_norm is the curvature normalization 2^{-k} * binom(n,k), kept exact
// (integer binomial over an exact power of two) before the final division.
struct Params {
    int n = 0;
    int k = 0;
    double c_norm = 0.0;
    Regime regime = Regime::Subcritical;

    static Params make(int n, int k);
};

// State of the radial profile xi at one time: value and slope.
struct RadialState {
    double xi = 0.0;
    double xi_dot = 0.0;
};

// The two distinct Schouten eigenvalues of a radial metric in cylindrical
// gauge: lam with multiplicity n-1 and lam+mu simple.
struct SchoutenEigs {
    double lam = 0.0;
    double mu = 0.0;
    double t = 0.0;
};

std::uint64_t binomial(int n, int k);

// lam = (1/2) e^{2t} (1 - xi_dot^2),  mu = e^{2t} (xi_ddot + xi_dot^2 - 1).
SchoutenEigs schouten_eigs(const Params& p, const RadialState& s, double xi_ddot, double t);

// j-th elementary symmetric function of the eigenvalue multiset
// {lam (n-1 times), lam + mu}, via the closed form
//   sigma_j = (1/n) binom(n,j) lam^{j-1} (n lam + j mu).
// Throws InadmissibleInput for j outside [1, n].
double sigma_j(const Params& p, const SchoutenEigs& e, int j);

// Strict cone condition: sigma_j > 0 for all j = 1..k.
bool gamma_k_plus(const Params& p, const SchoutenEigs& e);

// Conversions along the dictionary between the three profiles of one
// solution:  u (punctured-ball), U = |x|^{(n-2)/2} u (scaled), and the
// cylindrical potential w with U = e^{-(n-2) w / 2}.  t = -ln|x|.
enum class ConvertDir {
    WToU,     // w -> U            (t unused)
    UToW,     // U -> w            (t unused; requires U > 0)
    UToBall,  // U -> u = e^{(n-2)t/2} U
    BallToU,  // u -> U = e^{-(n-2)t/2} u   (requires u > 0)
};

double convert(const Params& p, double value, double t, ConvertDir dir);

} // namespace syl
