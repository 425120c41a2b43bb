#include "syl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace syl {

std::string fmt_g15(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("write_file_atomic: cannot open " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error("write_file_atomic: short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw Error("write_file_atomic: rename failed for " + path);
    }
}

std::string orbit_csv(const Orbit& o, double dt) {
    if (!(dt > 0.0)) throw InadmissibleInput("orbit_csv: dt must be positive");
    std::ostringstream out;
    out << "t,xi,xi_dot,h_residual\n";
    const long steps = static_cast<long>((o.t_max - o.t_min) / dt + 0.5);
    for (long i = 0; i <= steps; ++i) {
        const double t = o.t_min + dt * static_cast<double>(i);
        if (t > o.t_max + 1e-12) break;
        const RadialState s = o.at(std::min(t, o.t_max));
        out << fmt_g15(t) << ',' << fmt_g15(s.xi) << ',' << fmt_g15(s.xi_dot) << ','
            << fmt_g15(first_integral(o.params, s) - o.h) << '\n';
    }
    return out.str();
}

std::string orbit_meta_json(const Orbit& o) {
    std::ostringstream out;
    out << "{\n"
        << "  \"n\": " << o.params.n << ",\n"
        << "  \"k\": " << o.params.k << ",\n"
        << "  \"h\": " << fmt_g15(o.h) << ",\n"
        << "  \"class\": \"" << to_string(o.cls.kind) << "\",\n"
        << "  \"exponent\": "
        << (std::isnan(o.cls.exponent) ? std::string("null") : fmt_g15(o.cls.exponent))
        << ",\n"
        << "  \"T\": " << (o.period ? fmt_g15(*o.period) : std::string("null")) << ",\n"
        << "  \"max_drift\": " << fmt_g15(o.max_drift) << "\n"
        << "}\n";
    return out.str();
}

std::string spectrum_json(const std::vector<SpectrumRow>& rows) {
    std::ostringstream out;
    out << "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SpectrumRow& r = rows[i];
        out << "  {\"n\": " << r.n << ", \"k\": " << r.k << ", \"h\": " << fmt_g15(r.h)
            << ", \"lambda\": " << fmt_g15(r.lambda) << ", \"rho\": " << fmt_g15(r.rho)
            << ", \"det_M\": " << fmt_g15(r.det_M) << ", \"trace_M\": " << fmt_g15(r.trace_M)
            << ", \"jordan_flag\": " << (r.jordan_flag ? "true" : "false") << '}'
            << (i + 1 < rows.size() ? "," : "") << '\n';
    }
    out << "]\n";
    return out.str();
}

std::string e_trace_csv(const LiouvilleTransform& lt, double span, double dt) {
    if (!(dt > 0.0 && span > 0.0))
        throw InadmissibleInput("e_trace_csv: span and dt must be positive");
    std::ostringstream out;
    out << "t,E\n";
    const long steps = static_cast<long>(span / dt + 0.5);
    for (long i = 0; i <= steps; ++i) {
        const double t = dt * static_cast<double>(i);
        out << fmt_g15(t) << ',' << fmt_g15(lt.E(t)) << '\n';
    }
    return out.str();
}

std::string match_json(const MatchResult& r, const EnvelopeCheck& c,
                       const std::string& level_key, double level) {
    std::ostringstream out;
    out << "{\n"
        << "  \"s_inf\": " << fmt_g15(r.s_inf) << ",\n"
        << "  \"T\": " << fmt_g15(r.T) << ",\n"
        << "  \"num_windows\": " << r.tau.size() << ",\n"
        << "  \"C_fit\": " << fmt_g15(c.C_fit) << ",\n"
        << "  \"ok\": " << (c.ok ? "true" : "false") << ",\n"
        << "  \"" << level_key << "\": " << fmt_g15(level) << ",\n";
    auto array = [&out](const char* name, const std::vector<double>& v, bool last) {
        out << "  \"" << name << "\": [";
        for (std::size_t i = 0; i < v.size(); ++i)
            out << fmt_g15(v[i]) << (i + 1 < v.size() ? ", " : "");
        out << ']' << (last ? "" : ",") << '\n';
    };
    array("tau", r.tau, false);
    array("delta", r.delta, true);
    out << "}\n";
    return out.str();
}

std::string envelope_csv(const MatchResult& r) {
    std::ostringstream out;
    out << "t,envelope,bound\n";
    for (const auto& row : r.envelope)
        out << fmt_g15(row[0]) << ',' << fmt_g15(row[1]) << ',' << fmt_g15(row[2]) << '\n';
    return out.str();
}

} // namespace syl
