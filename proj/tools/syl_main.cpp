// Command-line front end: orbit construction and classification, Floquet
// spectrum sweeps, matching experiments, and selftest. Emits plot-ready CSV
// and JSON only (no rendering); all writes are atomic and byte-identical
// for identical inputs.
//
// Exit codes: 0 ok, 1 failed checks (selftest red, spectrum determinant
// violation), 2 bad input, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "syl/linear.hpp"
#include "syl/match.hpp"
#include "syl/orbit.hpp"
#include "syl/params.hpp"
#include "syl/report.hpp"
#include "syl/selftest.hpp"
#include "syl/sweep.hpp"

namespace {

using nlohmann::json;

json load_env_config() {
    const char* path = std::getenv("SYL_CONFIG");
    if (path == nullptr || *path == '\0') return json::object();
    std::ifstream in(path);
    if (!in) throw syl::InadmissibleInput(std::string("SYL_CONFIG unreadable: ") + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw syl::InadmissibleInput(std::string("SYL_CONFIG parse error: ") + e.what());
    }
    if (!j.is_object()) throw syl::InadmissibleInput("SYL_CONFIG: expected a JSON object");
    return j;
}

// Precedence: explicit flag > SYL_CONFIG entry > built-in default.
template <typename T>
void apply_config(const json& cfg, const CLI::Option* opt, const char* key, T& value) {
    if (opt != nullptr && opt->count() > 0) return;
    const auto it = cfg.find(key);
    if (it != cfg.end()) value = it->get<T>();
}

std::vector<double> parse_grid(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw syl::InadmissibleInput(std::string(what) + ": cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw syl::InadmissibleInput(std::string(what) + ": empty grid");
    return out;
}

void emit(const std::string& dir, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / name).string();
    syl::write_file_atomic(path, content);
    std::printf("wrote %s\n", path.c_str());
}

struct ToleranceFlags {
    double rel = syl::Tolerances{}.rel;
    double abs = syl::Tolerances{}.abs;
    double max_step = syl::Tolerances{}.max_step;
    CLI::Option* rel_opt = nullptr;
    CLI::Option* abs_opt = nullptr;
    CLI::Option* step_opt = nullptr;

    void attach(CLI::App* cmd) {
        rel_opt = cmd->add_option("--tol", rel, "relative step tolerance");
        abs_opt = cmd->add_option("--abs", abs, "absolute step tolerance");
        step_opt = cmd->add_option("--max-step", max_step, "maximum step size");
    }
    syl::Tolerances resolve(const json& cfg) {
        apply_config(cfg, rel_opt, "tol_rel", rel);
        apply_config(cfg, abs_opt, "tol_abs", abs);
        apply_config(cfg, step_opt, "max_step", max_step);
        syl::Tolerances t;
        t.rel = rel;
        t.abs = abs;
        t.max_step = max_step;
        return t;
    }
};

// ---- orbit --------------------------------------------------------------

int cmd_orbit(int n, int k, double h, double tmax, double dt, const syl::Tolerances& tol,
              const std::string& out) {
    const syl::Params p = syl::Params::make(n, k);
    const syl::Orbit o = syl::build_orbit(p, h, 0.0, tmax, tol);
    emit(out, "orbit.csv", syl::orbit_csv(o, dt));
    emit(out, "orbit_meta.json", syl::orbit_meta_json(o));
    return 0;
}

int cmd_classify(int n, int k, double h) {
    const syl::Params p = syl::Params::make(n, k);
    const syl::ClassInfo ci = syl::classify(p, h);
    std::printf("{\"n\": %d, \"k\": %d, \"h\": %s, \"class\": \"%s\", \"exponent\": %s}\n", n,
                k, syl::fmt_g15(h).c_str(), syl::to_string(ci.kind),
                std::isnan(ci.exponent) ? "null" : syl::fmt_g15(ci.exponent).c_str());
    return 0;
}

// ---- spectrum -------------------------------------------------------------

int cmd_spectrum(int n, int k, const std::string& h_csv, const std::string& lam_csv,
                 bool e_traces, const syl::Tolerances& tol, const std::string& out) {
    const syl::Params p = syl::Params::make(n, k);
    const std::vector<double> hs = parse_grid(h_csv, "--h-grid");
    const std::vector<double> lams = parse_grid(lam_csv, "--lambda-list");

    // validate everything up front: failures past this point are numerical
    for (const double h : hs)
        if (syl::classify(p, h).kind != syl::SolutionKind::Periodic)
            throw syl::InadmissibleInput("--h-grid: spectrum needs periodic levels");
    std::vector<syl::ModeSpec> modes;
    for (const double lam : lams) modes.push_back(syl::ModeSpec::make(p, lam));

    struct Cell {
        std::vector<syl::SpectrumRow> rows;
        std::vector<std::string> traces; // parallel to rows, empty when unused
    };
    const auto grid = syl::run_grid(hs.size(), [&](std::size_t i) {
        const syl::Orbit o = syl::build_orbit(p, hs[i], 0.0, 80.0, tol);
        Cell cell;
        for (const syl::ModeSpec& m : modes) {
            const syl::Monodromy mo = syl::monodromy(o, m);
            syl::SpectrumRow row;
            row.n = n;
            row.k = k;
            row.h = hs[i];
            row.lambda = m.lambda;
            row.rho = mo.rho;
            row.det_M = mo.det;
            row.trace_M = mo.trace;
            row.jordan_flag = mo.jordan_flag;
            cell.rows.push_back(row);
            std::string trace;
            if (e_traces && m.label == syl::ModeLabel::Higher) {
                const syl::LiouvilleTransform lt = syl::liouville(o, m);
                trace = syl::e_trace_csv(lt, mo.T, mo.T / 256.0);
            }
            cell.traces.push_back(trace);
        }
        return cell;
    });

    std::vector<syl::SpectrumRow> rows;
    double det_err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid[i].ok) throw syl::Error("spectrum cell failed: " + grid[i].error);
        for (std::size_t j = 0; j < grid[i].value.rows.size(); ++j) {
            rows.push_back(grid[i].value.rows[j]);
            det_err = std::max(det_err, std::abs(grid[i].value.rows[j].det_M - 1.0));
            if (!grid[i].value.traces[j].empty())
                emit(out, "e_trace_" + std::to_string(i) + "_" + std::to_string(j) + ".csv",
                     grid[i].value.traces[j]);
        }
    }
    emit(out, "spectrum.json", syl::spectrum_json(rows));
    if (det_err > 1e-6) {
        std::fprintf(stderr, "determinant violation: max |det M - 1| = %g\n", det_err);
        return 1;
    }
    return 0;
}

// ---- match ----------------------------------------------------------------

int cmd_match(const std::string& preset, int n, int k, double h, double scale, double rate,
              double shift, double offset, double t1, const syl::Tolerances& tol,
              const std::string& out) {
    const bool classical = preset == "k1";
    if (!classical && preset != "sigma")
        throw syl::InadmissibleInput("--preset: expected sigma or k1");
    if (classical && k != 1) throw syl::InadmissibleInput("--preset k1 requires --k 1");
    if (scale < 0.0) throw syl::InadmissibleInput("--e1-scale must be nonnegative");

    const syl::Params p = syl::Params::make(n, k);
    const double dseed = -0.25 * (n - 2.0) * (n - 2.0) * h; // classical dictionary

    auto profile_at = [&](double level) {
        return classical ? syl::k1_profile(n, level, tol) : syl::sigma_profile(p, level, tol);
    };
    auto problem_at = [&](double level, const syl::PsiProfile& ps) {
        return classical ? syl::k1_match_problem(n, level, scale, rate, ps)
                         : syl::sigma_match_problem(p, level, scale, rate, ps);
    };

    const double seed_level = classical ? dseed : h;
    const syl::PsiProfile seed_psi = profile_at(seed_level);
    syl::MatchProblem seed = problem_at(seed_level, seed_psi);

    std::array<double, 2> init{seed_psi.m + offset, 0.0};
    if (shift != 0.0) init = seed_psi.eval(-shift);
    const syl::Trajectory traj = syl::integrate_perturbed(seed, init, 0.0, t1, tol);

    // the settled conserved level is read off the tail; profile and problem
    // are rebuilt there before matching
    const double level =
        classical
            ? syl::tail_level(traj,
                              [n](double x, double y) { return syl::k1_energy(n, x, y); })
            : syl::tail_level(traj, [&p](double x, double y) {
                  return syl::first_integral(p, syl::RadialState{y, x});
              });
    const syl::PsiProfile psi = profile_at(level);
    syl::MatchProblem prob = problem_at(level, psi);
    syl::fit_slack(prob, traj);

    const syl::MatchResult mr = syl::match_orbit(prob, traj, psi);
    const syl::EnvelopeCheck ec = syl::verify_envelope(mr, prob);

    emit(out, "match.json", syl::match_json(mr, ec, classical ? "D_inf" : "h_inf", level));
    emit(out, "envelope.csv", syl::envelope_csv(mr));
    std::printf("s_inf = %s, windows = %zu, ok = %s\n", syl::fmt_g15(mr.s_inf).c_str(),
                mr.tau.size(), ec.ok ? "true" : "false");
    return 0;
}

// ---- sweep ----------------------------------------------------------------

int cmd_sweep(int n, int k, const std::string& h_csv, const syl::Tolerances& tol,
              const std::string& out) {
    const syl::Params p = syl::Params::make(n, k);
    const std::vector<double> hs = parse_grid(h_csv, "--h-grid");
    for (const double h : hs)
        if (syl::classify(p, h).kind != syl::SolutionKind::Periodic)
            throw syl::InadmissibleInput("--h-grid: sweep covers the periodic family");

    struct Row {
        double h, T, drift;
    };
    const auto grid = syl::run_grid(hs.size(), [&](std::size_t i) {
        const syl::Orbit o = syl::build_orbit(p, hs[i], 0.0, 30.0, tol);
        return Row{hs[i], o.period.value_or(0.0), o.max_drift};
    });

    std::ostringstream csv;
    csv << "h,T,max_drift\n";
    for (const auto& item : grid) {
        if (!item.ok) throw syl::Error("sweep cell failed: " + item.error);
        csv << syl::fmt_g15(item.value.h) << ',' << syl::fmt_g15(item.value.T) << ','
            << syl::fmt_g15(item.value.drift) << '\n';
    }
    emit(out, "sweep.csv", csv.str());
    return 0;
}

// ---- selftest ---------------------------------------------------------------

int cmd_selftest(bool quick, bool inject_drift) {
    const auto results = syl::run_acceptance(quick, inject_drift);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %-24s (%8.1f ms) %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(),
                    r.ms, r.detail.c_str());
        all = all && r.pass;
    }
    std::printf("%s\n", all ? "all checks passed" : "CHECKS FAILED");
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial curvature-profile laboratory: orbits, Floquet spectra, matching"};
    app.require_subcommand(1);

    int n = 5, k = 2;
    double h = 0.3, tmax = 30.0, dt = 0.05;
    std::string out = ".";
    std::string h_csv, lam_csv, preset = "sigma";
    double scale = 0.1, rate = 1.0, shift = 0.0, offset = 0.05, t1 = 70.0;
    bool e_traces = false, quick = false, inject_drift = false;

    auto add_nk = [&](CLI::App* cmd) {
        cmd->add_option("--n", n, "dimension")->required();
        cmd->add_option("--k", k, "symmetric-function index")->required();
    };
    // the automatic -h short flag would collide with --h
    auto subcommand = [&app](const char* name, const char* desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->set_help_flag("--help", "print help");
        return cmd;
    };

    CLI::App* orbit = subcommand("orbit", "construct one profile, emit CSV + metadata");
    add_nk(orbit);
    orbit->add_option("--h", h, "first-integral value")->required();
    orbit->add_option("--tmax", tmax, "integration horizon");
    CLI::Option* orbit_dt = orbit->add_option("--dt", dt, "CSV sample spacing");
    CLI::Option* orbit_out = orbit->add_option("--out", out, "output directory");
    ToleranceFlags orbit_tol;
    orbit_tol.attach(orbit);

    CLI::App* cls = subcommand("classify", "print the class record for (n, k, h)");
    add_nk(cls);
    cls->add_option("--h", h, "first-integral value")->required();

    CLI::App* spec = subcommand("spectrum", "Floquet spectrum over (h, lambda) grids");
    add_nk(spec);
    spec->add_option("--h-grid", h_csv, "comma-separated first-integral values")->required();
    spec->add_option("--lambda-list", lam_csv, "comma-separated eigenvalues")->required();
    spec->add_flag("--e-traces", e_traces, "emit normal-form potential traces");
    CLI::Option* spec_out = spec->add_option("--out", out, "output directory");
    ToleranceFlags spec_tol;
    spec_tol.attach(spec);

    CLI::App* match = subcommand("match", "perturbed-orbit matching experiment");
    match->add_option("--preset", preset, "sigma (radial) or k1 (classical)");
    add_nk(match);
    match->add_option("--h", h, "seed first-integral value")->required();
    match->add_option("--e1-scale", scale, "forcing amplitude");
    match->add_option("--e1-rate", rate, "forcing decay rate");
    match->add_option("--shift", shift, "seed a pure phase shift instead of an offset");
    match->add_option("--offset", offset, "initial displacement from the profile minimum");
    match->add_option("--t1", t1, "trajectory horizon");
    CLI::Option* match_out = match->add_option("--out", out, "output directory");
    ToleranceFlags match_tol;
    match_tol.attach(match);

    CLI::App* sweep = subcommand("sweep", "period/drift table over an h grid");
    add_nk(sweep);
    sweep->add_option("--h-grid", h_csv, "comma-separated first-integral values")->required();
    CLI::Option* sweep_out = sweep->add_option("--out", out, "output directory");
    ToleranceFlags sweep_tol;
    sweep_tol.attach(sweep);

    CLI::App* self = subcommand("selftest", "run the release checks");
    self->add_flag("--quick", quick, "trim the densest grids");
    self->add_flag("--inject-drift", inject_drift)->group(""); // negative control

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const json cfg = load_env_config();
        apply_config(cfg, orbit_dt, "dt", dt);
        for (CLI::Option* o : {orbit_out, spec_out, match_out, sweep_out})
            apply_config(cfg, o, "out_dir", out);

        if (orbit->parsed())
            return cmd_orbit(n, k, h, tmax, dt, orbit_tol.resolve(cfg), out);
        if (cls->parsed()) return cmd_classify(n, k, h);
        if (spec->parsed())
            return cmd_spectrum(n, k, h_csv, lam_csv, e_traces, spec_tol.resolve(cfg), out);
        if (match->parsed())
            return cmd_match(preset, n, k, h, scale, rate, shift, offset, t1,
                             match_tol.resolve(cfg), out);
        if (sweep->parsed()) return cmd_sweep(n, k, h_csv, sweep_tol.resolve(cfg), out);
        if (self->parsed()) return cmd_selftest(quick, inject_drift);
    } catch (const syl::InadmissibleInput& e) {
        std::fprintf(stderr, "inadmissible input: %s\n", e.what());
        return 2;
    } catch (const syl::Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 3;
    }
    return 2;
}
