#pragma once

// Run-artifact serialization. All numeric fields are printed at 15
// significant digits, so identical inputs give byte-identical files, and
// every write goes through a temp-file-then-rename so interrupted runs
// never leave truncated output behind.

#include <string>
#include <vector>

#include "syl/linear.hpp"
#include "syl/match.hpp"
#include "syl/orbit.hpp"

namespace syl {

std::string fmt_g15(double x);

void write_file_atomic(const std::string& path, const std::string& content);

// CSV `t,xi,xi_dot,h_residual`, sampled every dt across the stored span.
std::string orbit_csv(const Orbit& o, double dt);

// JSON record {n, k, h, class, exponent, T, max_drift}; exponent and T are
// null where the class carries none.
std::string orbit_meta_json(const Orbit& o);

struct SpectrumRow {
    int n = 0, k = 0;
    double h = 0.0;
    double lambda = 0.0;
    double rho = 0.0;
    double det_M = 0.0;
    double trace_M = 0.0;
    bool jordan_flag = false;
};

// JSON array of {n, k, h, lambda, rho, det_M, trace_M, jordan_flag}.
std::string spectrum_json(const std::vector<SpectrumRow>& rows);

// CSV `t,E` of the normal-form potential over [0, span].
std::string e_trace_csv(const LiouvilleTransform& lt, double span, double dt);

// JSON {s_inf, T, num_windows, C_fit, ok, level_key: level, tau, delta};
// level_key names the settled conserved level of the preset that produced
// the run (first-integral value or classical energy).
std::string match_json(const MatchResult& r, const EnvelopeCheck& c,
                       const std::string& level_key, double level);

// CSV `t,envelope,bound`.
std::string envelope_csv(const MatchResult& r);

} // namespace syl
