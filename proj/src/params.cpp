#include "syl/params.hpp"

#include <cmath>
#include <string>

namespace syl {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        // exact at every step: r * (n-k+i) is divisible by i
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return r;
}

Params Params::make(int n, int k) {
    if (n < 3) throw InadmissibleInput("Params: need n >= 3, got n=" + std::to_string(n));
    if (k < 1 || k > n)
        throw InadmissibleInput("Params: need 1 <= k <= n, got k=" + std::to_string(k));
    Params p;
    p.n = n;
    p.k = k;
    // 2^{-k} binom(n,k): integer binomial divided by an exact power of two.
    p.c_norm = static_cast<double>(binomial(n, k)) / std::ldexp(1.0, k);
    p.regime = (2 * k < n) ? Regime::Subcritical
             : (2 * k == n) ? Regime::Critical
                            : Regime::Supercritical;
    return p;
}

SchoutenEigs schouten_eigs(const Params&, const RadialState& s, double xi_ddot, double t) {
    SchoutenEigs e;
    const double e2t = std::exp(2.0 * t);
    e.lam = 0.5 * e2t * (1.0 - s.xi_dot * s.xi_dot);
    e.mu = e2t * (xi_ddot + s.xi_dot * s.xi_dot - 1.0);
    e.t = t;
    return e;
}

double sigma_j(const Params& p, const SchoutenEigs& e, int j) {
    if (j < 1 || j > p.n)
        throw InadmissibleInput("sigma_j: j must lie in [1, n], got j=" + std::to_string(j));
    const double c = static_cast<double>(binomial(p.n, j)) / static_cast<double>(p.n);
    return c * std::pow(e.lam, j - 1) * (p.n * e.lam + j * e.mu);
}

bool gamma_k_plus(const Params& p, const SchoutenEigs& e) {
    for (int j = 1; j <= p.k; ++j)
        if (!(sigma_j(p, e, j) > 0.0)) return false;
    return true;
}

double convert(const Params& p, double value, double t, ConvertDir dir) {
    const double a = 0.5 * static_cast<double>(p.n - 2);
    switch (dir) {
        case ConvertDir::WToU:
            return std::exp(-a * value);
        case ConvertDir::UToW:
            if (!(value > 0.0)) throw InadmissibleInput("convert: U must be positive");
            return -std::log(value) / a;
        case ConvertDir::UToBall:
            return std::exp(a * t) * value;
        case ConvertDir::BallToU:
            if (!(value > 0.0)) throw InadmissibleInput("convert: u must be positive");
            return std::exp(-a * t) * value;
    }
    throw InadmissibleInput("convert: unknown direction");
}

} // namespace syl
