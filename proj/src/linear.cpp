#include "syl/linear.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "syl/numerics.hpp"

namespace syl {

namespace {

// Coefficient bundle with the conserved quantity folded in.
struct HF {
    double w;      // e^{-n xi} / (h + e^{-n xi})
    double q;      // 1 - xi_dot^2
    double BA;     // B/A
    double CA;     // C/A
    double zeroth; // n w (1 - xi_dot^2)
};

HF hf_at(const Params& p, double h, double xi, double v) {
    const double n = static_cast<double>(p.n), k = static_cast<double>(p.k);
    HF f;
    const double en = std::exp(-n * xi);
    f.w = en / (h + en);
    f.q = slope_factor(v);
    f.BA = ((2.0 * k - n) / k - (n * (k - 1.0) / k) * f.w) * v;
    f.CA = (n * (k - 1.0) / (k * (n - 1.0))) * f.w + (n - k) / (k * (n - 1.0));
    f.zeroth = n * f.w * f.q;
    return f;
}

Tolerances tight_tol(const Orbit& o) {
    Tolerances t = o.tol;
    t.rel = 1e-12;
    t.abs = 1e-14;
    return t;
}

double require_period(const Orbit& o, const char* who) {
    if (o.cls.kind != SolutionKind::Periodic || !o.period || *o.period <= 0.0)
        throw NoPeriod(std::string(who) + ": needs a periodic orbit");
    return *o.period;
}

// Wronskian through its closed form W(t) = W0 * wcf(t)/wcf(0),
// wcf = e^{((n-2k)/k) xi} (e^{-n xi} + h)^{-(k-1)/k}.
std::function<double(double)> closed_form_wronskian(const Orbit* o, double W0) {
    const double n = static_cast<double>(o->params.n), k = static_cast<double>(o->params.k);
    const double h = o->h;
    auto wcf = [n, k, h](const RadialState& s) {
        const double en = std::exp(-n * s.xi);
        return std::exp(((n - 2.0 * k) / k) * s.xi) * std::pow(en + h, -(k - 1.0) / k);
    };
    const double w0 = wcf(orbit_state(*o, 0.0));
    return [o, W0, wcf, w0](double t) { return W0 * wcf(orbit_state(*o, t)) / w0; };
}

// Per-period scaling factor mu^m with the sign handled for negative mu.
double power_scale(double mu, long m) {
    if (m == 0) return 1.0;
    double s = std::exp(static_cast<double>(m) * std::log(std::abs(mu)));
    if (mu < 0.0 && (m & 1)) s = -s;
    return s;
}

} // namespace

const char* to_string(ModeLabel l) {
    switch (l) {
    case ModeLabel::Zero: return "zero";
    case ModeLabel::Translational: return "translational";
    case ModeLabel::Higher: return "higher";
    }
    return "?";
}

ModeSpec ModeSpec::make(const Params& p, double lambda) {
    if (lambda == 0.0) return zero();
    if (lambda == static_cast<double>(p.n - 1)) return {lambda, ModeLabel::Translational};
    if (lambda >= 2.0 * p.n) return {lambda, ModeLabel::Higher};
    throw InadmissibleInput("ModeSpec: eigenvalue must be 0, n-1, or >= 2n");
}

ModeSpec ModeSpec::translational(const Params& p) {
    return {static_cast<double>(p.n - 1), ModeLabel::Translational};
}

ModeSpec ModeSpec::higher(const Params& p, double lambda) {
    if (!(lambda >= 2.0 * p.n))
        throw InadmissibleInput("ModeSpec: higher eigenvalues start at 2n");
    return {lambda, ModeLabel::Higher};
}

double LinearCoeffs::A(double t) const {
    return 0.5 * slope_factor(orbit_state(*o_, t).xi_dot);
}

double LinearCoeffs::B(double t) const {
    const RadialState s = orbit_state(*o_, t);
    const double n = static_cast<double>(o_->params.n), k = static_cast<double>(o_->params.k);
    const double add = rhs_accel(o_->params, s);
    return -s.xi_dot * ((k - 1.0) * add + 0.5 * (n - 2.0 * k) * slope_factor(s.xi_dot));
}

double LinearCoeffs::C(double t) const {
    const RadialState s = orbit_state(*o_, t);
    const double n = static_cast<double>(o_->params.n), k = static_cast<double>(o_->params.k);
    const double add = rhs_accel(o_->params, s);
    return ((k - 1.0) * add + 0.5 * (n - 2.0 * k + 1.0) * slope_factor(s.xi_dot)) / (n - 1.0);
}

double LinearCoeffs::B_over_A(double t) const {
    const RadialState s = orbit_state(*o_, t);
    return hf_at(o_->params, o_->h, s.xi, s.xi_dot).BA;
}

double LinearCoeffs::C_over_A(double t) const {
    const RadialState s = orbit_state(*o_, t);
    return hf_at(o_->params, o_->h, s.xi, s.xi_dot).CA;
}

double LinearCoeffs::zeroth(double t) const {
    const RadialState s = orbit_state(*o_, t);
    return hf_at(o_->params, o_->h, s.xi, s.xi_dot).zeroth;
}

std::function<double(double)> mode_residual(const Orbit& o, const ModeSpec& m, const C2Fn& phi) {
    const Orbit* op = &o;
    const double lambda = m.lambda;
    return [op, lambda, phi](double t) {
        const RadialState s = orbit_state(*op, t);
        const HF f = hf_at(op->params, op->h, s.xi, s.xi_dot);
        const Jet2 j = phi(t);
        return j[2] + f.BA * j[1] + (-lambda * f.CA + f.zeroth) * j[0];
    };
}

C2Fn slope_jet(const Orbit& o) {
    const Orbit* op = &o;
    return [op](double t) -> Jet2 {
        const Params& p = op->params;
        const double n = static_cast<double>(p.n), k = static_cast<double>(p.k);
        const RadialState s = orbit_state(*op, t);
        const double add = orbit_accel(p, op->h, s);
        const double en = std::exp(-n * s.xi);
        const double w = en / (op->h + en);
        const double G = (0.5 * n / k) * w - 0.5 * (n - 2.0 * k) / k;
        const double addd = -2.0 * s.xi_dot * add * G -
                            (n * n / (2.0 * k)) * slope_factor(s.xi_dot) * s.xi_dot * w * (1.0 - w);
        return {s.xi_dot, add, addd};
    };
}

C2Fn decaying_translation_jet(const Orbit& o) {
    const C2Fn sj = slope_jet(o);
    return [sj](double t) -> Jet2 {
        const Jet2 v = sj(t);
        const double em = std::exp(-t);
        return {em * (1.0 + v[0]), em * (v[1] - (1.0 + v[0])), em * (v[2] - 2.0 * v[1] + 1.0 + v[0])};
    };
}

C2Fn growing_translation_jet(const Orbit& o) {
    const C2Fn sj = slope_jet(o);
    return [sj](double t) -> Jet2 {
        const Jet2 v = sj(t);
        const double ep = std::exp(t);
        return {ep * (1.0 - v[0]), ep * (1.0 - v[0] - v[1]), ep * (1.0 - v[0] - 2.0 * v[1] - v[2])};
    };
}

Monodromy monodromy(const Orbit& o, const ModeSpec& m) {
    const double T = require_period(o, "monodromy");
    const Params p = o.params;
    const double h = o.h, lambda = m.lambda;

    auto rhs = [p, h, lambda](double, const Vec<6>& u, Vec<6>& du) {
        const RadialState s{u[0], u[1]};
        du[0] = u[1];
        du[1] = orbit_accel(p, h, s);
        const HF f = hf_at(p, h, u[0], u[1]);
        const double q0 = -lambda * f.CA + f.zeroth;
        du[2] = u[3];
        du[3] = -f.BA * u[3] - q0 * u[2];
        du[4] = u[5];
        du[5] = -f.BA * u[5] - q0 * u[4];
    };

    // The frame over a full period is conditioned like e^{2 rho T}; assembled
    // in one sweep its determinant would drown in amplified roundoff. Short
    // segments keep every transfer matrix mild: the determinant is the
    // product of the segment determinants, the trace comes from the matrix
    // product (which only needs accuracy relative to the growing root).
    const int nseg = std::max(2, static_cast<int>(std::ceil(T / 0.5)));
    std::array<std::array<double, 2>, 2> M{{{1.0, 0.0}, {0.0, 1.0}}};
    double det = 1.0;
    double xi = xi_minus(p, h), v = 0.0;
    for (int seg = 0; seg < nseg; ++seg) {
        const double t0 = T * seg / nseg, t1 = T * (seg + 1) / nseg;
        Vec<6> y{xi, v, 1.0, 0.0, 0.0, 1.0};
        Vec<6> yT = y;
        integrate<6>(rhs, t0, y, t1, tight_tol(o), nullptr, [&](double, const Vec<6>& u) {
            yT = u;
            return true;
        });
        const double a = yT[2], c = yT[3], b = yT[4], d = yT[5];
        det *= a * d - b * c;
        const std::array<std::array<double, 2>, 2> Mn{
            {{a * M[0][0] + b * M[1][0], a * M[0][1] + b * M[1][1]},
             {c * M[0][0] + d * M[1][0], c * M[0][1] + d * M[1][1]}}};
        M = Mn;
        xi = yT[0];
        v = yT[1];
    }

    Monodromy out;
    out.T = T;
    out.M = M;
    out.det = det;
    out.trace = M[0][0] + M[1][1];
    out.jordan_flag = std::abs(out.trace - 2.0) <= 1e-6 && std::abs(out.det - 1.0) <= 1e-8;

    const double disc = out.trace * out.trace - 4.0 * out.det;
    if (disc < 0.0) {
        out.complex_pair = true;
        const double im = 0.5 * std::sqrt(-disc);
        out.multipliers = {std::complex<double>(0.5 * out.trace, -im),
                           std::complex<double>(0.5 * out.trace, im)};
        out.rho = 0.0;
        return out;
    }
    const double rt = std::sqrt(disc);
    // Dominant multiplier by the cancellation-free root; its partner is the
    // structural reciprocal (unit determinant), which stays accurate where
    // trace - mu would cancel catastrophically.
    const double big = (out.trace >= 0.0) ? 0.5 * (out.trace + rt) : 0.5 * (out.trace - rt);
    const double small = (big != 0.0) ? 1.0 / big : 0.0;
    out.multipliers = {std::complex<double>(small, 0.0), std::complex<double>(big, 0.0)};
    out.rho = (big != 0.0) ? std::abs(std::log(std::abs(big))) / T : 0.0;
    return out;
}

FundamentalPair zero_mode_pair(const Orbit& o, const OrbitFamily& family, double span) {
    const double T = require_period(o, "zero_mode_pair");
    const Params p = o.params;
    if (span <= 0.0) span = 3.0 * T;
    span = std::max(span, 2.0 * T + 1.0);

    // dT/dh: centered difference plus one Richardson step.
    const double hs = hstar(p);
    const double step = std::min({1e-5 * o.h, 0.25 * (hs - o.h), 0.25 * o.h});
    if (!(step > 1e-13 * hs))
        throw InadmissibleInput("zero_mode_pair: h too close to a regime boundary");
    auto period_at = [&](double hh) {
        const Orbit ob = family ? family(hh) : build_orbit(p, hh, 0.0, 1.0, o.tol);
        if (!ob.period || *ob.period <= 0.0)
            throw NoPeriod("zero_mode_pair: family member has no period");
        return *ob.period;
    };
    const double d1 = (period_at(o.h + step) - period_at(o.h - step)) / (2.0 * step);
    const double d2 = (period_at(o.h + 2.0 * step) - period_at(o.h - 2.0 * step)) / (4.0 * step);
    const double Tp = (4.0 * d1 - d2) / 3.0;

    // Joint integration of the orbit with the variational column. The column
    // differentiates the h-free state form of the flow, which is what the
    // family derivative satisfies; the orbit itself rides the folded field.
    const double xim = xi_minus(p, o.h);
    const double gp = stationary_slope(p, xim);
    auto rhs = [p, h = o.h](double, const Vec<4>& u, Vec<4>& du) {
        const RadialState s{u[0], u[1]};
        du[0] = u[1];
        du[1] = orbit_accel(p, h, s);
        const RhsPartials pr = rhs_partials(p, s);
        du[2] = u[3];
        du[3] = pr.d_xi * u[2] + pr.d_xi_dot * u[3];
    };
    auto path = std::make_shared<DensePath<4>>();
    Vec<4> y0{xim, 0.0, 1.0 / gp, 0.0};
    integrate<4>(rhs, 0.0, y0, span, tight_tol(o), path.get());

    FundamentalPair out;
    out.Tprime = Tp;
    out.rho = 0.0;
    out.multipliers = {1.0, 1.0};
    const double add0 = orbit_accel(p, o.h, {xim, 0.0});
    out.W0 = -add0 / gp;
    out.W = closed_form_wronskian(&o, out.W0);

    const double hcap = o.h;
    out.plus = [path, T, span, p, hcap](double t) -> std::array<double, 2> {
        double t0 = t;
        if (!(t >= 0.0 && t <= span)) {
            t0 = std::fmod(t, T);
            if (t0 < 0.0) t0 += T;
        }
        const Vec<4> u = path->eval(t0);
        return {u[1], orbit_accel(p, hcap, {u[0], u[1]})};
    };
    out.minus = [path, T, span, Tp, p, hcap](double t) -> std::array<double, 2> {
        double t0 = t;
        long m = 0;
        if (!(t >= 0.0 && t <= span)) {
            t0 = std::fmod(t, T);
            if (t0 < 0.0) t0 += T;
            m = std::lround((t - t0) / T);
        }
        const Vec<4> u = path->eval(t0);
        if (m == 0) return {u[2], u[3]};
        const double shift = static_cast<double>(m) * Tp;
        const double a0 = orbit_accel(p, hcap, {u[0], u[1]});
        return {u[2] - shift * u[1], u[3] - shift * a0};
    };
    return out;
}

FundamentalPair translational_pair(const Orbit& o) {
    const Orbit* op = &o;
    FundamentalPair out;
    out.rho = 1.0;
    if (o.cls.kind == SolutionKind::Periodic && o.period && *o.period > 0.0)
        out.multipliers = {std::exp(-*o.period), std::exp(*o.period)};

    out.minus = [op](double t) -> std::array<double, 2> {
        const RadialState s = orbit_state(*op, t);
        const double add = orbit_accel(op->params, op->h, s);
        const double em = std::exp(-t);
        return {em * (1.0 + s.xi_dot), em * (add - (1.0 + s.xi_dot))};
    };
    out.plus = [op](double t) -> std::array<double, 2> {
        const RadialState s = orbit_state(*op, t);
        const double add = orbit_accel(op->params, op->h, s);
        const double ep = std::exp(t);
        return {ep * (1.0 - s.xi_dot), ep * (1.0 - s.xi_dot - add)};
    };
    const std::array<double, 2> m0 = out.minus(0.0), p0 = out.plus(0.0);
    out.W0 = p0[0] * m0[1] - m0[0] * p0[1];
    out.W = closed_form_wronskian(&o, out.W0);
    return out;
}

FundamentalPair higher_mode_pair(const Orbit& o, const ModeSpec& m) {
    if (m.label != ModeLabel::Higher)
        throw InadmissibleInput("higher_mode_pair: mode must lie in the higher range");
    const Monodromy mo = monodromy(o, m);
    if (mo.complex_pair)
        throw InadmissibleInput("higher_mode_pair: multipliers form a complex pair");
    double mu_m = mo.multipliers[0].real(), mu_p = mo.multipliers[1].real();
    if (std::abs(mu_m) > std::abs(mu_p)) std::swap(mu_m, mu_p);
    if (!(std::abs(mu_p) > 1.0 + 1e-9 && std::abs(mu_m) < 1.0 - 1e-9))
        throw InadmissibleInput("higher_mode_pair: multipliers sit on the unit circle");

    auto eigvec = [&](double mu) -> std::array<double, 2> {
        const double a = mo.M[0][0] - mu, b = mo.M[0][1];
        const double c = mo.M[1][0], d = mo.M[1][1] - mu;
        const std::array<double, 2> v1{b, -a}, v2{d, -c};
        const double n1 = std::hypot(v1[0], v1[1]), n2 = std::hypot(v2[0], v2[1]);
        std::array<double, 2> v = (n1 >= n2) ? v1 : v2;
        const double nn = std::max(n1, n2);
        if (nn == 0.0) throw IntegrationFailure("higher_mode_pair: defective period map");
        v[0] /= nn;
        v[1] /= nn;
        if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) {
            v[0] = -v[0];
            v[1] = -v[1];
        }
        return v;
    };
    const std::array<double, 2> vm = eigvec(mu_m), vp = eigvec(mu_p);

    const Params p = o.params;
    const double T = mo.T, h = o.h, lambda = m.lambda;
    const double xim = xi_minus(p, h);
    auto rhs = [p, h, lambda](double, const Vec<4>& u, Vec<4>& du) {
        const RadialState s{u[0], u[1]};
        du[0] = u[1];
        du[1] = orbit_accel(p, h, s);
        const HF f = hf_at(p, h, u[0], u[1]);
        du[2] = u[3];
        du[3] = -f.BA * u[3] - (-lambda * f.CA + f.zeroth) * u[2];
    };

    auto path_p = std::make_shared<DensePath<4>>();
    Vec<4> yp{xim, 0.0, vp[0], vp[1]};
    integrate<4>(rhs, 0.0, yp, T, tight_tol(o), path_p.get());

    // Decaying branch backward across one period from the stable direction:
    // backward integration is self-correcting for it (forward would hand its
    // projection error to the growing branch). The value at 0 comes out
    // scaled by roughly 1/mu_m; normalize the branch there.
    DensePath<4> bw;
    Vec<4> ym{xim, 0.0, vm[0], vm[1]};
    integrate<4>(rhs, T, ym, 0.0, tight_tol(o), &bw);
    auto path_m = std::make_shared<DensePath<4>>();
    path_m->nodes.assign(bw.nodes.rbegin(), bw.nodes.rend());
    const Vec<4> z0 = path_m->eval(0.0);
    const double znorm = std::hypot(z0[2], z0[3]);
    if (!(znorm > 0.0)) throw IntegrationFailure("higher_mode_pair: vanishing stable branch");
    const double cm = ((z0[2] < 0.0 || (z0[2] == 0.0 && z0[3] < 0.0)) ? -1.0 : 1.0) / znorm;

    auto branch = [T](std::shared_ptr<DensePath<4>> path, double mu, double c0) {
        return [path, T, mu, c0](double t) -> std::array<double, 2> {
            double t0 = t;
            long m = 0;
            if (!(t >= 0.0 && t <= T)) {
                t0 = std::fmod(t, T);
                if (t0 < 0.0) t0 += T;
                m = std::lround((t - t0) / T);
            }
            const Vec<4> u = path->eval(t0);
            const double s = c0 * power_scale(mu, m);
            return {s * u[2], s * u[3]};
        };
    };

    FundamentalPair out;
    out.rho = mo.rho;
    out.multipliers = {mu_m, mu_p};
    out.minus = branch(path_m, mu_m, cm);
    out.plus = branch(path_p, mu_p, 1.0);
    const std::array<double, 2> m0 = out.minus(0.0), p0 = out.plus(0.0);
    out.W0 = p0[0] * m0[1] - m0[0] * p0[1];
    out.W = closed_form_wronskian(&o, out.W0);
    return out;
}

LiouvilleTransform liouville(const Orbit& o, const ModeSpec& m) {
    const Params& p = o.params;
    if (2 * p.k > p.n)
        throw InadmissibleInput("liouville: the normal form needs 2k <= n");
    const double n = static_cast<double>(p.n), k = static_cast<double>(p.k);
    const double h = o.h, lambda = m.lambda;
    const Orbit* op = &o;

    LiouvilleTransform out;
    out.discriminant =
        static_cast<double>(2 * (p.n + 3) * p.k * p.k - 4 * (p.n + 1) * p.k - p.n * (p.n - 1));
    out.Cn = (out.discriminant >= 0.0) ? 2.0 + 2.0 / (n - 1.0) : 0.5 * (n + 1.0);

    out.V = [op, n, k, h](double t) {
        const RadialState s = orbit_state(*op, t);
        const double en = std::exp(-n * s.xi);
        return std::exp((1.0 - 0.5 * n / k) * s.xi) * std::pow(en + h, 0.5 * (k - 1.0) / k);
    };
    out.dlogV = [op, n, k, h](double t) {
        const RadialState s = orbit_state(*op, t);
        const double en = std::exp(-n * s.xi);
        const double w = en / (h + en);
        return s.xi_dot * ((1.0 - 0.5 * n / k) - 0.5 * (n * (k - 1.0) / k) * w);
    };
    auto ddv = [op, n, k, h](double t) {
        const RadialState s = orbit_state(*op, t);
        const double en = std::exp(-n * s.xi);
        const double w = en / (h + en);
        const double p0 = (2.0 * k - n) * (2.0 * k - n) / (4.0 * k * k) +
                          n * (n - 2.0 * k) * (k - 2.0) * w / (4.0 * k * k) -
                          n * n * (k - 1.0) * w * w / (4.0 * k * k);
        const double p1 = n * n * (k - 1.0) * w * (1.0 - w) / (2.0 * k) +
                          n * (n - 2.0 * k) * w / (4.0 * k) + n * n * (k - 1.0) * w * w / (4.0 * k);
        return p0 + p1 * s.xi_dot * s.xi_dot;
    };
    out.ddV_over_V = ddv;
    out.E = [op, lambda, ddv](double t) {
        const RadialState s = orbit_state(*op, t);
        const HF f = hf_at(op->params, op->h, s.xi, s.xi_dot);
        return -ddv(t) - lambda * f.CA + f.zeroth;
    };
    return out;
}

VcSolution vc_solve(const Orbit& o, const ModeSpec& m,
                    const std::function<double(double)>& r, double beta) {
    const double T = require_period(o, "vc_solve");
    if (!(beta > 1e-3))
        throw InadmissibleInput("vc_solve: decay rate must exceed 1e-3");

    FundamentalPair pair;
    double gr = 0.0; // growth rate of the growing branch
    switch (m.label) {
    case ModeLabel::Zero:
        pair = zero_mode_pair(o);
        break;
    case ModeLabel::Translational:
        if (std::abs(beta - 1.0) < 1e-3)
            throw InadmissibleInput("vc_solve: decay rate inside the excluded window around 1");
        pair = translational_pair(o);
        gr = 1.0;
        if (std::abs(pair.W0) < 1e-12)
            throw InadmissibleInput("vc_solve: translational basis degenerates here");
        break;
    case ModeLabel::Higher:
        pair = higher_mode_pair(o, m);
        gr = pair.rho;
        if (std::abs(beta - gr) < 1e-3)
            throw InadmissibleInput(
                "vc_solve: decay rate inside the excluded window around the mode exponent");
        if (beta > gr)
            throw InadmissibleInput("vc_solve: decay rate must stay below the mode exponent");
        break;
    }

    // Probe the declared decay of the source over the quadrature range.
    double c_early = 0.0, c_late = 0.0;
    const double probe = (std::log(1e12) + 2.0) / beta;
    for (int i = 0; i <= 48; ++i) {
        const double s = probe * i / 48.0;
        const double v = std::abs(r(s)) * std::exp(std::min(beta * s, 700.0));
        (i <= 24 ? c_early : c_late) = std::max(i <= 24 ? c_early : c_late, v);
    }
    if (c_late > 100.0 * std::max(c_early, 1e-300) && c_late > 1e-10)
        throw InadmissibleInput("vc_solve: source does not decay at the declared rate");
    const double cr = std::max(c_early, c_late);
    VcSolution sol;
    if (cr == 0.0) {
        sol.phi = [](double) { return 0.0; };
        return sol;
    }

    auto tail_from = [](double coeff, double rate) {
        const double c = std::max(coeff, 1e-30);
        return std::max(1.0, std::log(c / (rate * 1e-12)) / rate);
    };

    if (m.label == ModeLabel::Zero) {
        const double Tp = pair.Tprime;
        auto plus = pair.plus;
        auto minus = pair.minus;
        auto W = pair.W;
        auto pfun = [plus, minus, Tp, T](double s) {
            return minus(s)[0] + (Tp / T) * s * plus(s)[0];
        };
        // Scales of the bounded factors over a few periods.
        double cb = 0.0;
        for (int i = 0; i <= 96; ++i) {
            const double s = 3.0 * T * i / 96.0;
            cb = std::max(cb, std::max(std::abs(plus(s)[0]), std::abs(pfun(s))) / std::abs(W(s)));
        }
        double L = tail_from(cb, beta);
        for (int i = 0; i < 3; ++i)
            L = std::max(1.0, std::log(std::max(cb, 1e-30) * (L + 1.0 / beta) / (beta * 1e-12)) / beta);
        const double Lz = L;
        const double polyrate = std::max(1.0, std::abs(Tp) / T);
        sol.phi = [plus, W, pfun, r, Tp, T, Lz, beta, cr, polyrate](double t) {
            if (t < 0.0) throw InadmissibleInput("vc_solve: evaluation is for t >= 0");
            const double qt = std::max(
                1e-11 * cr * std::exp(std::max(-beta * t, -600.0)) / (1.0 + polyrate * t), 1e-280);
            auto g0 = [&](double s) { return plus(s)[0] * r(s) / W(s); };
            auto g1 = [&](double s) { return pfun(s) * r(s) / W(s); };
            auto g2 = [&](double s) { return (s - t) * plus(s)[0] * r(s) / W(s); };
            const double i0 = adaptive_simpson(g0, t, t + Lz, qt);
            const double i1 = adaptive_simpson(g1, t, t + Lz, qt);
            const double i2 = adaptive_simpson(g2, t, t + Lz, qt);
            return -pfun(t) * i0 + plus(t)[0] * i1 - (Tp / T) * plus(t)[0] * i2;
        };
        return sol;
    }

    auto plus = pair.plus;
    auto minus = pair.minus;
    auto W = pair.W;
    // sup of the periodic parts of the branches, growth factored out
    double cbm = 0.0, cbp = 0.0;
    for (int i = 0; i <= 96; ++i) {
        const double s = 2.0 * T * i / 96.0;
        const double wv = std::abs(W(s));
        cbm = std::max(cbm, std::abs(minus(s)[0]) * std::exp(gr * s) / wv);
        cbp = std::max(cbp, std::abs(plus(s)[0]) * std::exp(-gr * s) / wv);
    }
    const double Lm = tail_from(cbm, gr + beta);
    auto g_plus = [plus, r, W](double s) { return plus(s)[0] * r(s) / W(s); };
    auto g_minus = [minus, r, W](double s) { return minus(s)[0] * r(s) / W(s); };

    // The solution decays at rate min(beta, gr): quadrature tolerances track
    // that scale divided by the branch magnitude each integral is paired with.
    const double mu_dec = std::min(beta, gr);
    sol.phi = [minus, plus, g_plus, g_minus, Lm, gr, beta, mu_dec, cr](double t) {
        if (t < 0.0) throw InadmissibleInput("vc_solve: evaluation is for t >= 0");
        const double qt1 =
            std::max(1e-11 * cr * std::exp(std::min((gr - mu_dec) * t, 600.0)), 1e-280);
        const double qt2 =
            std::max(1e-11 * cr * std::exp(std::max(-(gr + mu_dec) * t, -600.0)), 1e-280);
        const double i1 = (t > 0.0) ? adaptive_simpson(g_plus, 0.0, t, qt1) : 0.0;
        const double i2 = adaptive_simpson(g_minus, t, t + Lm, qt2);
        return minus(t)[0] * i1 + plus(t)[0] * i2;
    };
    if (m.label == ModeLabel::Translational && beta > 1.0) {
        const double La = tail_from(cbp, beta - 1.0);
        sol.a_coeff = adaptive_simpson(g_plus, 0.0, La, 1e-12 * cr * std::max(cbp, 1.0));
    }
    return sol;
}

} // namespace syl
